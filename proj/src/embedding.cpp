#include "semprune/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "semprune/error.hpp"
#include "semprune/stats.hpp"

namespace semprune {

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> words, std::size_t dims, std::vector<double> data)
    : words_(std::move(words)), dims_(dims), data_(std::move(data)) {
  if (dims_ < 2) throw Error(ErrorCode::InvalidInput, "embedding needs at least 2 feature columns");
  if (data_.size() != words_.size() * dims_) {
    throw Error(ErrorCode::LengthMismatch, "embedding data size does not match words x dims");
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidInput, "embedding contains a non-finite value");
  }
  lookup_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!lookup_.emplace(words_[i], i).second) {
      throw Error(ErrorCode::InvalidInput, "duplicate embedding word '" + words_[i] + "'");
    }
  }
}

std::optional<std::size_t> EmbeddingMatrix::index_of(const std::string& word) const {
  const auto it = lookup_.find(word);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

EmbeddingMatrix EmbeddingMatrix::select_words(const std::vector<std::string>& words) const {
  std::vector<double> data;
  data.reserve(words.size() * dims_);
  for (const auto& w : words) {
    const auto idx = index_of(w);
    if (!idx) throw Error(ErrorCode::UnknownWord, "word '" + w + "' has no embedding");
    const auto r = row(*idx);
    data.insert(data.end(), r.begin(), r.end());
  }
  return EmbeddingMatrix(words, dims_, std::move(data));
}

FeatureSet EmbeddingMatrix::all_features() const {
  FeatureSet all(dims_);
  for (std::size_t f = 0; f < dims_; ++f) all[f] = f;
  return all;
}

PairIndex::PairIndex(std::vector<WordPair> pairs) : pairs_(std::move(pairs)) {
  std::sort(pairs_.begin(), pairs_.end());
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    if (pairs_[k].first >= pairs_[k].second) {
      throw Error(ErrorCode::InvalidInput, "pair entries must satisfy i < j");
    }
    if (k > 0 && pairs_[k] == pairs_[k - 1]) throw Error(ErrorCode::InvalidInput, "duplicate pair");
  }
}

PairIndex PairIndex::complete(std::size_t n_words) {
  std::vector<WordPair> pairs;
  pairs.reserve(n_words * (n_words - (n_words > 0 ? 1 : 0)) / 2);
  for (std::uint32_t i = 0; i < n_words; ++i) {
    for (std::uint32_t j = i + 1; j < n_words; ++j) pairs.push_back({i, j});
  }
  PairIndex index;
  index.pairs_ = std::move(pairs);
  return index;
}

std::optional<std::size_t> PairIndex::position(std::size_t i, std::size_t j) const {
  if (i == j) return std::nullopt;
  if (i > j) std::swap(i, j);
  const WordPair key{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)};
  const auto it = std::lower_bound(pairs_.begin(), pairs_.end(), key);
  if (it == pairs_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - pairs_.begin());
}

std::optional<double> SimilarityStructure::value(std::size_t i, std::size_t j) const {
  const auto pos = pairs.position(i, j);
  if (!pos) return std::nullopt;
  return values[*pos];
}

SimilarityStructure build_rsm(const EmbeddingMatrix& e, const FeatureSet& subset) {
  return build_rsm(e, subset, PairIndex::complete(e.size()));
}

SimilarityStructure build_rsm(const EmbeddingMatrix& e, const FeatureSet& subset, const PairIndex& pairs) {
  if (subset.size() < 2) {
    throw Error(ErrorCode::SubsetTooSmall, "similarity needs at least 2 features");
  }
  FeatureSet sorted = subset;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::InvalidInput, "feature subset contains duplicates");
  }
  if (sorted.back() >= e.dims()) throw Error(ErrorCode::InvalidInput, "feature index out of range");

  const std::size_t width = sorted.size();
  std::vector<double> restricted(e.size() * width);
  for (std::size_t w = 0; w < e.size(); ++w) {
    for (std::size_t k = 0; k < width; ++k) restricted[w * width + k] = e.at(w, sorted[k]);
  }

  SimilarityStructure out;
  out.n_words = e.size();
  out.pairs = pairs;
  out.source = SimilaritySource::Model;
  out.values.resize(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [a, b] = pairs[k];
    if (a >= e.size() || b >= e.size()) throw Error(ErrorCode::InvalidInput, "pair index out of range");
    const std::span<const double> ra(restricted.data() + a * width, width);
    const std::span<const double> rb(restricted.data() + b * width, width);
    try {
      out.values[k] = stats::pearson_r(ra, rb);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::ConstantSeries) throw;
      out.values[k] = 0.0;
      ++out.degenerate_pairs;
    }
  }
  return out;
}

std::vector<FoldSpec> make_folds(std::size_t n_words) {
  if (n_words < 4) throw Error(ErrorCode::TooFewWords, "cross-validation needs at least 4 words");
  const PairIndex all = PairIndex::complete(n_words);
  std::vector<FoldSpec> folds;
  folds.reserve(n_words);
  for (std::size_t i = 0; i < n_words; ++i) folds.push_back(make_fold(all, i));
  return folds;
}

FoldSpec make_fold(const PairIndex& available, std::size_t target) {
  std::vector<WordPair> test;
  std::vector<WordPair> train;
  for (const auto& p : available) {
    (p.first == target || p.second == target ? test : train).push_back(p);
  }
  return FoldSpec{target, PairIndex(std::move(test)), PairIndex(std::move(train))};
}

std::vector<double> gather(const SimilarityStructure& s, const PairIndex& pairs) {
  if (s.pairs == pairs) return s.values;
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    const auto v = s.value(p.first, p.second);
    if (!v) {
      throw Error(ErrorCode::MissingPair, "no similarity value for pair (" + std::to_string(p.first) + ", " +
                                              std::to_string(p.second) + ")");
    }
    out.push_back(*v);
  }
  return out;
}

double two_oi(const SimilarityStructure& model, const SimilarityStructure& human, const PairIndex& pairs) {
  if (pairs.size() < 3) throw Error(ErrorCode::InsufficientSamples, "2OI needs at least 3 pairs");
  const auto m = gather(model, pairs);
  const auto h = gather(human, pairs);
  return stats::spearman_rho(m, h);
}

PairIndex covered_pairs(const SimilarityStructure& s, const PairIndex& pairs) {
  std::vector<WordPair> kept;
  for (const auto& p : pairs) {
    if (s.pairs.contains(p.first, p.second)) kept.push_back(p);
  }
  return PairIndex(std::move(kept));
}

// --- loaders ----------------------------------------------------------------

namespace {

bool parse_double(std::string_view text, double& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '"')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '"' || text.back() == '\r')) text.remove_suffix(1);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  char delim = 0;
  if (line.find('\t') != std::string::npos) {
    delim = '\t';
  } else if (line.find(',') != std::string::npos) {
    delim = ',';
  }
  if (delim == 0) {
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) fields.push_back(tok);
    return fields;
  }
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, delim)) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') field = field.substr(1, field.size() - 2);
    fields.push_back(field);
  }
  return fields;
}

}  // namespace

EmbeddingMatrix load_embeddings(const std::filesystem::path& path, const std::unordered_set<std::string>* keep) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open embedding file " + path.string());

  std::vector<std::string> words;
  std::vector<double> data;
  std::size_t dims = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto space = line.find(' ');
    if (space == std::string::npos) {
      throw Error(ErrorCode::InvalidInput, path.filename().string() + ":" + std::to_string(line_no) +
                                               ": expected a word followed by values");
    }
    std::string word = line.substr(0, space);
    if (line_no == 1) {
      double a = 0.0;
      double b = 0.0;
      const auto rest = line.substr(space + 1);
      if (rest.find(' ') == std::string::npos && parse_double(word, a) && parse_double(rest, b)) continue;
    }
    if (keep != nullptr && !keep->contains(word)) continue;

    std::vector<double> values;
    if (dims > 0) values.reserve(dims);
    std::string_view rest(line);
    rest.remove_prefix(space + 1);
    while (!rest.empty()) {
      const auto next = rest.find(' ');
      const auto tok = rest.substr(0, next);
      if (!tok.empty()) {
        double v = 0.0;
        if (!parse_double(tok, v)) {
          throw Error(ErrorCode::InvalidInput, path.filename().string() + ":" + std::to_string(line_no) +
                                                   ": bad value '" + std::string(tok) + "'");
        }
        values.push_back(v);
      }
      if (next == std::string_view::npos) break;
      rest.remove_prefix(next + 1);
    }
    if (dims == 0) dims = values.size();
    if (values.size() != dims) {
      throw Error(ErrorCode::InvalidInput, path.filename().string() + ":" + std::to_string(line_no) +
                                               ": inconsistent dimension count");
    }
    words.push_back(std::move(word));
    data.insert(data.end(), values.begin(), values.end());
  }
  if (words.empty()) throw Error(ErrorCode::InvalidInput, "no embeddings loaded from " + path.string());
  return EmbeddingMatrix(std::move(words), dims, std::move(data));
}

HumanRatings load_human_ratings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open ratings file " + path.string());

  HumanRatings out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() < 3) {
      throw Error(ErrorCode::InvalidInput, path.filename().string() + ":" + std::to_string(line_no) +
                                               ": expected word_a, word_b, rating");
    }
    double rating = 0.0;
    if (!parse_double(fields[2], rating)) {
      if (first_row) {
        first_row = false;
        continue;
      }
      throw Error(ErrorCode::InvalidInput, path.filename().string() + ":" + std::to_string(line_no) +
                                               ": rating is not a number");
    }
    first_row = false;
    for (const auto* w : {&fields[0], &fields[1]}) {
      if (seen.insert(*w).second) out.words.push_back(*w);
    }
    out.rows.push_back({fields[0], fields[1], rating});
  }
  if (out.rows.empty()) throw Error(ErrorCode::InvalidInput, "no ratings in " + path.string());
  return out;
}

SimilarityStructure human_structure(const HumanRatings& ratings, const std::vector<std::string>& words) {
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < words.size(); ++i) pos.emplace(words[i], i);

  std::map<WordPair, std::pair<double, std::size_t>> acc;
  for (const auto& row : ratings.rows) {
    const auto a = pos.find(row.word_a);
    const auto b = pos.find(row.word_b);
    if (a == pos.end() || b == pos.end() || a->second == b->second) continue;
    const auto i = static_cast<std::uint32_t>(std::min(a->second, b->second));
    const auto j = static_cast<std::uint32_t>(std::max(a->second, b->second));
    auto& slot = acc[WordPair{i, j}];
    slot.first += row.rating;
    slot.second += 1;
  }

  SimilarityStructure out;
  out.n_words = words.size();
  out.source = SimilaritySource::Human;
  std::vector<WordPair> pairs;
  pairs.reserve(acc.size());
  out.values.reserve(acc.size());
  for (const auto& [pair, sum_count] : acc) {
    pairs.push_back(pair);
    out.values.push_back(sum_count.first / static_cast<double>(sum_count.second));
  }
  out.pairs = PairIndex(std::move(pairs));
  return out;
}

}  // namespace semprune
