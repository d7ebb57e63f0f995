#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace semprune {

/// Feature (column) indices into an EmbeddingMatrix. Order is meaningful
/// where a ranking produced it.
using FeatureSet = std::vector<std::size_t>;

/// Word labels by feature columns, row-major.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::vector<std::string> words, std::size_t dims, std::vector<double> data);

  [[nodiscard]] std::size_t size() const noexcept { return words_.size(); }
  [[nodiscard]] std::size_t dims() const noexcept { return dims_; }
  [[nodiscard]] const std::vector<std::string>& words() const noexcept { return words_; }
  [[nodiscard]] const std::string& word(std::size_t i) const { return words_.at(i); }
  [[nodiscard]] std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * dims_, dims_};
  }
  [[nodiscard]] double at(std::size_t i, std::size_t f) const { return data_[i * dims_ + f]; }
  [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }
  [[nodiscard]] std::optional<std::size_t> index_of(const std::string& word) const;

  /// Rows for `words`, in that order. Throws UnknownWord naming the first
  /// missing label.
  [[nodiscard]] EmbeddingMatrix select_words(const std::vector<std::string>& words) const;

  /// Sequence 0..dims-1.
  [[nodiscard]] FeatureSet all_features() const;

 private:
  std::vector<std::string> words_;
  std::size_t dims_ = 0;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

/// Unordered word pair stored as (first < second).
struct WordPair {
  std::uint32_t first = 0;
  std::uint32_t second = 0;

  friend auto operator<=>(const WordPair&, const WordPair&) = default;
};

/// Sorted, duplicate-free list of word pairs in lexicographic (i, j) order.
class PairIndex {
 public:
  PairIndex() = default;
  /// Sorts the input; throws InvalidInput on self-pairs or duplicates.
  explicit PairIndex(std::vector<WordPair> pairs);

  /// All (n² - n) / 2 pairs over n words.
  [[nodiscard]] static PairIndex complete(std::size_t n_words);

  [[nodiscard]] std::size_t size() const noexcept { return pairs_.size(); }
  [[nodiscard]] bool empty() const noexcept { return pairs_.empty(); }
  [[nodiscard]] const WordPair& operator[](std::size_t k) const { return pairs_[k]; }
  [[nodiscard]] auto begin() const noexcept { return pairs_.begin(); }
  [[nodiscard]] auto end() const noexcept { return pairs_.end(); }
  [[nodiscard]] const std::vector<WordPair>& pairs() const noexcept { return pairs_; }

  [[nodiscard]] std::optional<std::size_t> position(std::size_t i, std::size_t j) const;
  [[nodiscard]] bool contains(std::size_t i, std::size_t j) const { return position(i, j).has_value(); }

  friend bool operator==(const PairIndex&, const PairIndex&) = default;

 private:
  std::vector<WordPair> pairs_;
};

enum class SimilaritySource { Human, Model };

/// Pairwise similarity values aligned to a PairIndex.
struct SimilarityStructure {
  std::size_t n_words = 0;
  PairIndex pairs;
  std::vector<double> values;
  SimilaritySource source = SimilaritySource::Model;
  /// Pairs whose similarity was forced to 0 because one of the two rows had
  /// zero variance over the feature subset.
  std::size_t degenerate_pairs = 0;

  [[nodiscard]] std::optional<double> value(std::size_t i, std::size_t j) const;
};

struct FoldSpec {
  std::size_t target_word_index = 0;
  PairIndex test_pairs;
  PairIndex train_pairs;
};

/// Model RSM: Pearson correlation between every pair of word rows restricted
/// to `subset`. Features are read in ascending index order regardless of the
/// order of `subset`, so any permutation of a subset gives bit-identical
/// values.
[[nodiscard]] SimilarityStructure build_rsm(const EmbeddingMatrix& e, const FeatureSet& subset);
[[nodiscard]] SimilarityStructure build_rsm(const EmbeddingMatrix& e, const FeatureSet& subset,
                                            const PairIndex& pairs);

/// One fold per word; fold i tests on every pair containing word i.
[[nodiscard]] std::vector<FoldSpec> make_folds(std::size_t n_words);

/// Partition of `available` into the pairs touching `target` and the rest.
[[nodiscard]] FoldSpec make_fold(const PairIndex& available, std::size_t target);

/// Second-order isomorphism: Spearman correlation of model and human values
/// over `pairs`.
[[nodiscard]] double two_oi(const SimilarityStructure& model, const SimilarityStructure& human,
                            const PairIndex& pairs);

/// The subset of `pairs` that `s` has values for.
[[nodiscard]] PairIndex covered_pairs(const SimilarityStructure& s, const PairIndex& pairs);

/// Values of `s` gathered in `pairs` order. Throws MissingPair.
[[nodiscard]] std::vector<double> gather(const SimilarityStructure& s, const PairIndex& pairs);

// --- file formats -----------------------------------------------------------

/// GloVe text format: word followed by whitespace-separated values. A leading
/// "<count> <dims>" header line (word2vec text convention) is skipped. When
/// `keep` is given only those words are retained.
[[nodiscard]] EmbeddingMatrix load_embeddings(const std::filesystem::path& path,
                                              const std::unordered_set<std::string>* keep = nullptr);

struct RatingRow {
  std::string word_a;
  std::string word_b;
  double rating = 0.0;
};

struct HumanRatings {
  /// Distinct words in order of first appearance.
  std::vector<std::string> words;
  std::vector<RatingRow> rows;
};

/// Rows of word_a, word_b, mean_rating separated by tab, comma, or
/// whitespace. A header row is detected by a non-numeric rating field.
[[nodiscard]] HumanRatings load_human_ratings(const std::filesystem::path& path);

/// Human structure indexed by positions in `words`. Rows naming words outside
/// the list or self-pairs are ignored; repeated pairs are averaged.
[[nodiscard]] SimilarityStructure human_structure(const HumanRatings& ratings,
                                                  const std::vector<std::string>& words);

}  // namespace semprune
