#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace semprune::cooccur {

using LabelSet = std::set<std::string>;

struct Token {
  std::string text;  // lowercased
  bool capitalized = false;
};

/// Splits on every byte that is not an ASCII letter or digit (bytes >= 0x80
/// are kept as word characters) and lowercases ASCII.
[[nodiscard]] std::vector<Token> tokenize(std::string_view line);

/// Unigram and windowed pair counts over a corpus. Token ids follow first
/// occurrence order so counting the same stream twice gives identical state.
class CorpusStats {
 public:
  CorpusStats() = default;
  explicit CorpusStats(std::size_t window);

  [[nodiscard]] std::size_t window() const noexcept { return window_; }
  [[nodiscard]] std::uint64_t total_tokens() const noexcept { return total_tokens_; }
  [[nodiscard]] std::uint64_t total_pairs() const noexcept { return total_pairs_; }
  [[nodiscard]] std::size_t vocab_size() const noexcept { return tokens_.size(); }
  [[nodiscard]] const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  [[nodiscard]] std::optional<std::uint32_t> id(std::string_view word) const;
  [[nodiscard]] bool contains(std::string_view word) const { return id(word).has_value(); }
  [[nodiscard]] std::uint64_t count(std::string_view word) const;
  [[nodiscard]] std::uint64_t pair_count(std::string_view a, std::string_view b) const;
  [[nodiscard]] std::uint64_t pair_count(std::uint32_t a, std::uint32_t b) const;
  /// Share of occurrences that started with an uppercase letter.
  [[nodiscard]] double capitalized_fraction(std::string_view word) const;
  /// 1-based rank by descending unigram count, ties in lexicographic order.
  [[nodiscard]] std::size_t frequency_rank(std::string_view word) const;
  /// Ids co-occurring with `id` at least once, ascending.
  [[nodiscard]] const std::vector<std::uint32_t>& neighbors(std::uint32_t id) const { return neighbors_.at(id); }

  /// Unordered pair counts keyed by (low id << 32 | high id).
  [[nodiscard]] const std::unordered_map<std::uint64_t, std::uint64_t>& pair_table() const noexcept {
    return pairs_;
  }
  [[nodiscard]] std::uint64_t unigram(std::uint32_t id) const { return unigrams_.at(id); }
  [[nodiscard]] std::uint64_t capitalized(std::uint32_t id) const { return capitalized_.at(id); }

  // Builders. finalize() must run after the last mutation.
  std::uint32_t add_token(std::string_view word, std::uint64_t count, std::uint64_t capitalized_count);
  void add_pair(std::uint32_t a, std::uint32_t b, std::uint64_t count);
  void set_totals(std::uint64_t tokens, std::uint64_t pairs);
  void finalize();

  friend bool operator==(const CorpusStats& a, const CorpusStats& b);

  [[nodiscard]] static std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) noexcept;

 private:
  std::size_t window_ = 2;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::uint64_t> unigrams_;
  std::vector<std::uint64_t> capitalized_;
  std::unordered_map<std::uint64_t, std::uint64_t> pairs_;
  std::uint64_t total_tokens_ = 0;
  std::uint64_t total_pairs_ = 0;
  std::vector<std::vector<std::uint32_t>> neighbors_;
  std::vector<std::size_t> frequency_rank_;
};

/// Counts every unordered position pair at distance <= window within a line.
/// Lines are independent, so shards of lines are counted on separate
/// workers and merged by addition.
[[nodiscard]] CorpusStats count_corpus(const std::vector<std::string>& lines, std::size_t window,
                                       std::size_t workers = 1);
[[nodiscard]] CorpusStats count_corpus(std::istream& in, std::size_t window, std::size_t workers = 1);
[[nodiscard]] CorpusStats count_corpus_file(const std::filesystem::path& path, std::size_t window,
                                            std::size_t workers = 1);

/// log2(P(w,i) / (P(w) P(i))), or 0 when the pair never co-occurs.
[[nodiscard]] double pmi(const CorpusStats& stats, std::string_view w, std::string_view i);

/// N(i): every word with a nonzero joint count with i.
[[nodiscard]] LabelSet immediate_context(const CorpusStats& stats, std::string_view i);

/// Union of immediate contexts. Category words absent from the corpus are
/// skipped and reported through `missing`.
[[nodiscard]] LabelSet category_context(const CorpusStats& stats, const std::vector<std::string>& category,
                                        std::vector<std::string>* missing = nullptr);

struct PmiVector {
  std::string target;
  std::vector<std::string> contexts;
  std::vector<double> values;
  double nonzero_fraction = 0.0;
};

/// PMI of `w` with each category word in order. Category words that are not
/// in the corpus contribute the 0 sentinel.
[[nodiscard]] PmiVector pmi_vector(const CorpusStats& stats, std::string_view w,
                                   const std::vector<std::string>& category);

// --- cache ------------------------------------------------------------------

/// FNV-1a 64 over the file bytes.
[[nodiscard]] std::uint64_t corpus_fingerprint(const std::filesystem::path& path);

void save_cache(const CorpusStats& stats, std::uint64_t fingerprint, const std::filesystem::path& path);

struct CachedStats {
  std::uint64_t fingerprint = 0;
  CorpusStats stats;
};

[[nodiscard]] CachedStats load_cache(const std::filesystem::path& path);

struct CacheResult {
  CorpusStats stats;
  bool rebuilt = false;
  /// Set when a cache file existed but did not match the corpus or window.
  std::optional<std::string> warning;
};

/// Loads `cache` if its fingerprint and window match `corpus`, otherwise
/// counts the corpus and rewrites the cache.
[[nodiscard]] CacheResult load_or_count(const std::filesystem::path& corpus, const std::filesystem::path& cache,
                                        std::size_t window, std::size_t workers = 1);

}  // namespace semprune::cooccur
