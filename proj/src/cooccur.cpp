#include "semprune/cooccur.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <sstream>

#include "semprune/error.hpp"
#include "semprune/parallel.hpp"

namespace semprune::cooccur {

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

constexpr char kCacheMagic[] = "semprune-corpus-cache";
constexpr int kCacheVersion = 1;

}  // namespace

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && !is_word_byte(static_cast<unsigned char>(line[k]))) ++k;
    const std::size_t start = k;
    while (k < line.size() && is_word_byte(static_cast<unsigned char>(line[k]))) ++k;
    if (k == start) break;
    Token tok;
    tok.text.assign(line.substr(start, k - start));
    tok.capitalized = line[start] >= 'A' && line[start] <= 'Z';
    for (auto& c : tok.text) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    out.push_back(std::move(tok));
  }
  return out;
}

// --- CorpusStats ------------------------------------------------------------

CorpusStats::CorpusStats(std::size_t window) : window_(window) {
  if (window == 0) throw Error(ErrorCode::InvalidInput, "co-occurrence window must be >= 1");
}

std::uint64_t CorpusStats::pair_key(std::uint32_t a, std::uint32_t b) noexcept {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::optional<std::uint32_t> CorpusStats::id(std::string_view word) const {
  const auto it = ids_.find(std::string(word));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t CorpusStats::count(std::string_view word) const {
  const auto i = id(word);
  return i ? unigrams_[*i] : 0;
}

std::uint64_t CorpusStats::pair_count(std::uint32_t a, std::uint32_t b) const {
  const auto it = pairs_.find(pair_key(a, b));
  return it == pairs_.end() ? 0 : it->second;
}

std::uint64_t CorpusStats::pair_count(std::string_view a, std::string_view b) const {
  const auto ia = id(a);
  const auto ib = id(b);
  if (!ia || !ib) return 0;
  return pair_count(*ia, *ib);
}

double CorpusStats::capitalized_fraction(std::string_view word) const {
  const auto i = id(word);
  if (!i) throw Error(ErrorCode::UnknownWord, "'" + std::string(word) + "' is not in the corpus");
  return static_cast<double>(capitalized_[*i]) / static_cast<double>(unigrams_[*i]);
}

std::size_t CorpusStats::frequency_rank(std::string_view word) const {
  const auto i = id(word);
  if (!i) throw Error(ErrorCode::UnknownWord, "'" + std::string(word) + "' is not in the corpus");
  return frequency_rank_[*i];
}

std::uint32_t CorpusStats::add_token(std::string_view word, std::uint64_t count, std::uint64_t capitalized_count) {
  const auto [it, inserted] = ids_.emplace(std::string(word), static_cast<std::uint32_t>(tokens_.size()));
  if (inserted) {
    tokens_.emplace_back(word);
    unigrams_.push_back(0);
    capitalized_.push_back(0);
  }
  unigrams_[it->second] += count;
  capitalized_[it->second] += capitalized_count;
  return it->second;
}

void CorpusStats::add_pair(std::uint32_t a, std::uint32_t b, std::uint64_t count) {
  if (a >= tokens_.size() || b >= tokens_.size()) throw Error(ErrorCode::InvalidInput, "pair id out of range");
  if (count > 0) pairs_[pair_key(a, b)] += count;
}

void CorpusStats::set_totals(std::uint64_t tokens, std::uint64_t pairs) {
  total_tokens_ = tokens;
  total_pairs_ = pairs;
}

void CorpusStats::finalize() {
  const std::size_t v = tokens_.size();
  neighbors_.assign(v, {});
  for (const auto& [key, c] : pairs_) {
    const auto a = static_cast<std::uint32_t>(key >> 32);
    const auto b = static_cast<std::uint32_t>(key & 0xffffffffU);
    neighbors_[a].push_back(b);
    if (a != b) neighbors_[b].push_back(a);
  }
  for (auto& n : neighbors_) std::sort(n.begin(), n.end());

  std::vector<std::uint32_t> order(v);
  std::iota(order.begin(), order.end(), 0U);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (unigrams_[a] != unigrams_[b]) return unigrams_[a] > unigrams_[b];
    return tokens_[a] < tokens_[b];
  });
  frequency_rank_.assign(v, 0);
  for (std::size_t r = 0; r < v; ++r) frequency_rank_[order[r]] = r + 1;
}

bool operator==(const CorpusStats& a, const CorpusStats& b) {
  return a.window_ == b.window_ && a.tokens_ == b.tokens_ && a.unigrams_ == b.unigrams_ &&
         a.capitalized_ == b.capitalized_ && a.pairs_ == b.pairs_ && a.total_tokens_ == b.total_tokens_ &&
         a.total_pairs_ == b.total_pairs_;
}

// --- counting ---------------------------------------------------------------

CorpusStats count_corpus(const std::vector<std::string>& lines, std::size_t window, std::size_t workers) {
  CorpusStats stats(window);

  // Vocabulary is assigned sequentially so ids are stable.
  std::vector<std::vector<std::uint32_t>> encoded(lines.size());
  std::uint64_t total_tokens = 0;
  for (std::size_t l = 0; l < lines.size(); ++l) {
    for (const auto& tok : tokenize(lines[l])) {
      encoded[l].push_back(stats.add_token(tok.text, 1, tok.capitalized ? 1 : 0));
      ++total_tokens;
    }
  }
  if (total_tokens == 0) throw Error(ErrorCode::EmptyCorpus, "corpus contains no tokens");

  const std::size_t shards = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(lines.size(), 1));
  std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> partial(shards);
  std::vector<std::uint64_t> partial_pairs(shards, 0);
  parallel_for(shards, workers, [&](std::size_t s) {
    const std::size_t begin = lines.size() * s / shards;
    const std::size_t end = lines.size() * (s + 1) / shards;
    auto& table = partial[s];
    for (std::size_t l = begin; l < end; ++l) {
      const auto& ids = encoded[l];
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const std::size_t last = std::min(ids.size(), i + window + 1);
        for (std::size_t j = i + 1; j < last; ++j) {
          ++table[CorpusStats::pair_key(ids[i], ids[j])];
          ++partial_pairs[s];
        }
      }
    }
  });

  std::uint64_t total_pairs = 0;
  for (std::size_t s = 0; s < shards; ++s) {
    for (const auto& [key, c] : partial[s]) {
      stats.add_pair(static_cast<std::uint32_t>(key >> 32), static_cast<std::uint32_t>(key & 0xffffffffU), c);
    }
    total_pairs += partial_pairs[s];
  }
  stats.set_totals(total_tokens, total_pairs);
  stats.finalize();
  return stats;
}

CorpusStats count_corpus(std::istream& in, std::size_t window, std::size_t workers) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(std::move(line));
  return count_corpus(lines, window, workers);
}

CorpusStats count_corpus_file(const std::filesystem::path& path, std::size_t window, std::size_t workers) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open corpus " + path.string());
  return count_corpus(in, window, workers);
}

// --- queries ----------------------------------------------------------------

double pmi(const CorpusStats& stats, std::string_view w, std::string_view i) {
  const auto iw = stats.id(w);
  const auto ii = stats.id(i);
  if (!iw) throw Error(ErrorCode::UnknownWord, "'" + std::string(w) + "' is not in the corpus");
  if (!ii) throw Error(ErrorCode::UnknownWord, "'" + std::string(i) + "' is not in the corpus");
  const std::uint64_t joint = stats.pair_count(*iw, *ii);
  if (joint == 0) return 0.0;
  const double p_joint = static_cast<double>(joint) / static_cast<double>(stats.total_pairs());
  const double p_w = static_cast<double>(stats.unigram(*iw)) / static_cast<double>(stats.total_tokens());
  const double p_i = static_cast<double>(stats.unigram(*ii)) / static_cast<double>(stats.total_tokens());
  return std::log2(p_joint / (p_w * p_i));
}

LabelSet immediate_context(const CorpusStats& stats, std::string_view i) {
  const auto id = stats.id(i);
  if (!id) throw Error(ErrorCode::UnknownWord, "'" + std::string(i) + "' is not in the corpus");
  LabelSet out;
  for (auto n : stats.neighbors(*id)) out.insert(stats.tokens()[n]);
  return out;
}

LabelSet category_context(const CorpusStats& stats, const std::vector<std::string>& category,
                          std::vector<std::string>* missing) {
  LabelSet out;
  for (const auto& word : category) {
    const auto id = stats.id(word);
    if (!id) {
      if (missing) missing->push_back(word);
      continue;
    }
    for (auto n : stats.neighbors(*id)) out.insert(stats.tokens()[n]);
  }
  return out;
}

PmiVector pmi_vector(const CorpusStats& stats, std::string_view w, const std::vector<std::string>& category) {
  if (!stats.contains(w)) throw Error(ErrorCode::UnknownWord, "'" + std::string(w) + "' is not in the corpus");
  PmiVector out;
  out.target = std::string(w);
  out.contexts = category;
  out.values.reserve(category.size());
  std::size_t nonzero = 0;
  for (const auto& c : category) {
    const double v = stats.contains(c) ? pmi(stats, w, c) : 0.0;
    if (v != 0.0) ++nonzero;
    out.values.push_back(v);
  }
  out.nonzero_fraction =
      category.empty() ? 0.0 : static_cast<double>(nonzero) / static_cast<double>(category.size());
  return out;
}

// --- cache ------------------------------------------------------------------

std::uint64_t corpus_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open corpus " + path.string());
  std::uint64_t h = 14695981039346656037ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const auto n = in.gcount();
    for (std::streamsize k = 0; k < n; ++k) {
      h ^= static_cast<unsigned char>(buf[k]);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

void save_cache(const CorpusStats& stats, std::uint64_t fingerprint, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write cache " + path.string());
  out << kCacheMagic << ' ' << kCacheVersion << '\n';
  out << "fingerprint " << std::hex << std::setw(16) << std::setfill('0') << fingerprint << std::dec << '\n';
  out << "window " << stats.window() << '\n';
  out << "totals " << stats.total_tokens() << ' ' << stats.total_pairs() << '\n';
  out << "vocab " << stats.vocab_size() << '\n';
  for (std::uint32_t i = 0; i < stats.vocab_size(); ++i) {
    out << stats.tokens()[i] << '\t' << stats.unigram(i) << '\t' << stats.capitalized(i) << '\n';
  }
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs(stats.pair_table().begin(), stats.pair_table().end());
  std::sort(pairs.begin(), pairs.end());
  out << "pairs " << pairs.size() << '\n';
  for (const auto& [key, c] : pairs) out << (key >> 32) << '\t' << (key & 0xffffffffU) << '\t' << c << '\n';
  if (!out) throw Error(ErrorCode::Io, "failed writing cache " + path.string());
}

CachedStats load_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open cache " + path.string());
  auto fail = [&](const std::string& why) { return Error(ErrorCode::InvalidInput, path.string() + ": " + why); };

  std::string magic;
  int version = 0;
  std::string key;
  CachedStats cached;
  std::size_t window = 0;
  std::uint64_t tokens = 0;
  std::uint64_t pairs = 0;
  std::size_t vocab = 0;
  in >> magic >> version;
  if (magic != kCacheMagic || version != kCacheVersion) throw fail("not a corpus cache");
  in >> key >> std::hex >> cached.fingerprint >> std::dec;
  if (key != "fingerprint") throw fail("missing fingerprint");
  in >> key >> window;
  if (key != "window") throw fail("missing window");
  in >> key >> tokens >> pairs;
  if (key != "totals") throw fail("missing totals");
  in >> key >> vocab;
  if (key != "vocab" || !in) throw fail("missing vocabulary");

  CorpusStats stats(window);
  for (std::size_t i = 0; i < vocab; ++i) {
    std::string token;
    std::uint64_t count = 0;
    std::uint64_t caps = 0;
    if (!(in >> token >> count >> caps)) throw fail("truncated vocabulary");
    stats.add_token(token, count, caps);
  }
  std::size_t n_pairs = 0;
  in >> key >> n_pairs;
  if (key != "pairs" || !in) throw fail("missing pair table");
  for (std::size_t k = 0; k < n_pairs; ++k) {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    std::uint64_t c = 0;
    if (!(in >> a >> b >> c)) throw fail("truncated pair table");
    stats.add_pair(a, b, c);
  }
  stats.set_totals(tokens, pairs);
  stats.finalize();
  cached.stats = std::move(stats);
  return cached;
}

CacheResult load_or_count(const std::filesystem::path& corpus, const std::filesystem::path& cache,
                          std::size_t window, std::size_t workers) {
  const std::uint64_t fingerprint = corpus_fingerprint(corpus);
  CacheResult result;
  if (std::filesystem::exists(cache)) {
    try {
      auto cached = load_cache(cache);
      if (cached.fingerprint == fingerprint && cached.stats.window() == window) {
        result.stats = std::move(cached.stats);
        return result;
      }
      result.warning = "corpus cache " + cache.filename().string() + " is stale; rebuilding";
    } catch (const Error& err) {
      result.warning = "corpus cache unreadable (" + std::string(err.what()) + "); rebuilding";
    }
  }
  result.stats = count_corpus_file(corpus, window, workers);
  result.rebuilt = true;
  save_cache(result.stats, fingerprint, cache);
  return result;
}

}  // namespace semprune::cooccur
