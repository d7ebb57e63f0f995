#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "semprune/cooccur.hpp"
#include "semprune/embedding.hpp"

namespace semprune::interpret {

struct Pc1Result {
  std::vector<std::string> words;
  std::vector<double> scores;
  /// One loading per feature in `features`, same order.
  std::vector<double> loadings;
  FeatureSet features;
  double explained_variance_ratio = 0.0;
};

/// First principal component of the rows of `e` restricted to `features`.
/// The sign is fixed so the loading of largest magnitude is positive (first
/// such loading on ties).
[[nodiscard]] Pc1Result pca_first_pc(const EmbeddingMatrix& e, const FeatureSet& features);

struct InterpretationHit {
  std::string word;
  double rho = 0.0;
  double p = 1.0;
  double nonzero_fraction = 0.0;
  std::size_t frequency_rank = 0;
  /// PMI with each category word, in category order.
  std::vector<double> pmi_values;
};

struct InterpretOptions {
  std::size_t frequency_cutoff = 15000;
  double nonzero_threshold = 0.6;
  double alpha = 0.05;
  /// Tokens capitalized in more than this share of occurrences count as
  /// proper nouns.
  double proper_noun_threshold = 0.5;
  std::size_t workers = 1;
};

/// Candidate counts after each filter stage, in application order.
struct FilterCounts {
  std::size_t context_size = 0;
  std::size_t after_frequency = 0;
  std::size_t after_lexical = 0;
  std::size_t after_nonzero = 0;
  std::size_t tested = 0;
  std::size_t significant = 0;
};

struct Interpretation {
  std::vector<InterpretationHit> hits;
  FilterCounts counts;
  std::vector<std::string> missing_category_words;
};

[[nodiscard]] bool is_number_like(std::string_view token);

/// Correlates the PMI profile of every category-context word with the PC1
/// scores and keeps words passing the frequency, lexical, nonzero-share and
/// significance filters. Hits are ordered by |rho| descending, then word.
[[nodiscard]] Interpretation interpret_category(const cooccur::CorpusStats& stats, const Pc1Result& pc1,
                                                const std::vector<std::string>& category,
                                                const InterpretOptions& options = {});

struct Comparison {
  std::size_t n_pruned = 0;
  std::size_t n_full = 0;
  std::size_t n_common = 0;
  std::vector<std::string> common;
};

[[nodiscard]] Comparison compare_pruned_full(const std::vector<InterpretationHit>& pruned,
                                             const std::vector<InterpretationHit>& full);

}  // namespace semprune::interpret
