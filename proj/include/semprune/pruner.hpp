#pragma once

#include <atomic>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semprune/embedding.hpp"
#include "semprune/stats.hpp"

namespace semprune::prune {

/// Curve value for the single-feature prefix. Pearson similarity over one
/// component is undefined, so that prefix can never win the argmax.
inline constexpr double kUnselectable = std::numeric_limits<double>::lowest();

struct FeatureRanking {
  /// Feature indices, most important first.
  std::vector<std::size_t> order;
  /// D score per feature index (not per rank).
  std::vector<double> d_scores;
};

struct PruneSolution {
  double baseline_rho = 0.0;
  FeatureRanking ranking;
  /// Entry k is the fit of the top-(k+1) ranked features.
  std::vector<double> curve;
  /// Ranked prefix ending at the first curve maximum.
  FeatureSet selected;
  double selected_rho = 0.0;
  std::size_t n_pairs = 0;
};

struct FoldResult {
  std::string target_word;
  double baseline_test_rho = 0.0;
  double pruned_test_rho = 0.0;
  std::size_t n_retained = 0;
  std::size_t n_test_pairs = 0;
  /// Test series too short or constant; rho values are meaningless and the
  /// fold is left out of the t-test.
  bool degenerate = false;
};

struct CrossValidation {
  std::vector<FoldResult> folds;
  /// Paired t of pruned minus baseline test rho; empty when fewer than two
  /// usable folds remain or every difference is identical.
  std::optional<stats::PairedT> t_test;
};

struct CvSummary {
  std::size_t n_folds = 0;
  std::size_t n_degenerate = 0;
  double baseline_mean = 0.0;
  double baseline_sd = 0.0;
  double pruned_mean = 0.0;
  double pruned_sd = 0.0;
  double retained_mean = 0.0;
  double retained_sd = 0.0;
  std::optional<stats::PairedT> t_test;
};

/// Instrumentation for the search budget.
struct SearchCounters {
  std::atomic<std::size_t> leave_one_out_builds{0};
  std::atomic<std::size_t> prefix_evaluations{0};
};

struct PruneOptions {
  std::size_t workers = 1;
  SearchCounters* counters = nullptr;
};

/// D_f = fit(all features) - fit(all features except f), evaluated on
/// `pairs`. Order is by descending D, ties broken by ascending feature index.
[[nodiscard]] FeatureRanking rank_features(const EmbeddingMatrix& e, const SimilarityStructure& human,
                                           const PairIndex& pairs, const PruneOptions& options = {});

[[nodiscard]] std::vector<double> reinsertion_curve(const EmbeddingMatrix& e, const SimilarityStructure& human,
                                                    const PairIndex& pairs, const FeatureRanking& ranking,
                                                    const PruneOptions& options = {});

[[nodiscard]] PruneSolution prune(const EmbeddingMatrix& e, const SimilarityStructure& human,
                                  const PairIndex& pairs, const PruneOptions& options = {});

/// Leave-one-word-out evaluation. Pairs the human structure lacks are dropped
/// from both partitions.
[[nodiscard]] CrossValidation cross_validate(const EmbeddingMatrix& e, const SimilarityStructure& human,
                                             const PruneOptions& options = {});

[[nodiscard]] CvSummary summarize(const CrossValidation& cv);

using CategorySets = std::vector<std::pair<std::string, FeatureSet>>;

/// How many categories retained each feature.
[[nodiscard]] std::vector<std::size_t> retention_counts(const CategorySets& solutions, std::size_t n_features);

struct OverlapMatrix {
  std::vector<std::string> categories;
  /// Row-major, categories x categories.
  std::vector<double> dice;

  [[nodiscard]] double at(std::size_t a, std::size_t b) const { return dice[a * categories.size() + b]; }
};

[[nodiscard]] OverlapMatrix overlap_matrix(const CategorySets& solutions);

}  // namespace semprune::prune
