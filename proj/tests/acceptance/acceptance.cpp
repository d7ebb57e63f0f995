// Acceptance suite. Prints one line per criterion and exits nonzero if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <unordered_set>

#include "oracles.hpp"
#include "semprune/cooccur.hpp"
#include "semprune/interpret.hpp"
#include "semprune/pipeline.hpp"
#include "semprune/probe.hpp"
#include "semprune/pruner.hpp"
#include "semprune/stats.hpp"
#include "synth.hpp"
#include "workspace.hpp"

using namespace semprune;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  enum class Kind { Pass, Fail, Skip } kind = Kind::Pass;
  std::string detail;
};

Verdict pass(std::string detail) { return {Verdict::Kind::Pass, std::move(detail)}; }
Verdict fail(std::string detail) { return {Verdict::Kind::Fail, std::move(detail)}; }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

std::string sci(double v) {
  std::ostringstream ss;
  ss.precision(2);
  ss << std::scientific << v;
  return ss.str();
}

double curve_max(const std::vector<double>& c) { return *std::max_element(c.begin(), c.end()); }

// 1 ---------------------------------------------------------------------------

Verdict curve_maximum() {
  const auto start = std::chrono::steady_clock::now();
  testing::Rng rng(1001);
  for (int trial = 0; trial < 200; ++trial) {
    const auto e = testing::random_embedding(rng, rng.between(5, 15), rng.between(6, 40));
    const auto human = testing::random_human(rng, e.size());
    const auto sol = prune::prune(e, human, human.pairs);
    if (!(sol.selected_rho >= sol.curve.back()) || sol.selected_rho != curve_max(sol.curve) ||
        sol.curve.back() != sol.baseline_rho) {
      return fail("instance " + std::to_string(trial) + " selected " + fixed(sol.selected_rho, 17) + " final " +
                  fixed(sol.curve.back(), 17));
    }
  }
  const double t = seconds_since(start);
  if (t >= 30.0) return fail("200 instances took " + fixed(t, 2) + " s");
  return pass("200 instances, " + fixed(t, 2) + " s");
}

// 2 ---------------------------------------------------------------------------

Verdict planted_recovery() {
  const auto start = std::chrono::steady_clock::now();
  testing::Rng rng(2002);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = rng.between(10, 30);
    const auto subset = testing::random_subset(rng, f, rng.between(2, 6));
    const auto e = testing::planted_embedding(rng, rng.between(40, 60), f, subset, 0.3);
    const auto human = testing::planted_human(e, subset);
    const auto sol = prune::prune(e, human, human.pairs);
    worst = std::max(worst, std::abs(curve_max(sol.curve) - 1.0));
  }
  const double t = seconds_since(start);

  // Same construction with i.i.d. features and few words, where the one-shot
  // ranking can put a background feature ahead of a planted one.
  int misses = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = rng.between(10, 30);
    const auto subset = testing::random_subset(rng, f, rng.between(2, 6));
    const auto e = testing::planted_embedding(rng, rng.between(5, 15), f, subset, 1.0);
    const auto sol = prune::prune(e, testing::planted_human(e, subset), PairIndex::complete(e.size()));
    if (std::abs(curve_max(sol.curve) - 1.0) > 1e-9) ++misses;
  }
  const std::string note = "; i.i.d. features with N in [5,15] miss in " + std::to_string(misses) + "/100";
  if (worst > 1e-9) return fail("max |max(curve) - 1| = " + sci(worst) + note);
  if (t >= 60.0) return fail("50 instances took " + fixed(t, 2) + " s");
  return pass("50 instances (N in [40,60], background scale 0.3), max |max(curve) - 1| = " + sci(worst) +
              ", " + fixed(t, 2) + " s" + note);
}

// 3 ---------------------------------------------------------------------------

Verdict ranking_oracle() {
  testing::Rng rng(3003);
  std::size_t n_instances = 0;
  for (std::size_t n = 3; n <= 6; ++n) {
    for (std::size_t f = 3; f <= 12; ++f) {
      for (int rep = 0; rep < 10; ++rep) {
        const auto e = testing::random_embedding(rng, n, f);
        const auto human = testing::random_human(rng, n);
        const auto r = prune::rank_features(e, human, human.pairs);
        if (r.d_scores != oracle::naive_d_scores(e, human.values, human.pairs)) {
          return fail("mismatch at N=" + std::to_string(n) + " F=" + std::to_string(f));
        }
        ++n_instances;
      }
    }
  }
  return pass(std::to_string(n_instances) + " instances bit-exact");
}

// 4 ---------------------------------------------------------------------------

Verdict pmi_oracle() {
  testing::Rng rng(4004);
  std::size_t checked = 0;
  for (int corpus = 0; corpus < 20; ++corpus) {
    const auto lines = testing::random_corpus(rng, rng.between(200, 10000), rng.between(10, 400));
    const auto stats = cooccur::count_corpus(lines, 2, 1 + static_cast<std::size_t>(corpus % 4));
    const auto brute = oracle::brute_count(lines, 2);
    const auto where = "corpus " + std::to_string(corpus) + ": ";
    if (stats.total_tokens() != brute.total_tokens || stats.total_pairs() != brute.total_pairs ||
        stats.vocab_size() != brute.unigrams.size()) {
      return fail(where + "totals differ");
    }
    std::vector<std::string> words;
    for (const auto& [w, n] : brute.unigrams) {
      words.push_back(w);
      if (stats.count(w) != n) return fail(where + "unigram " + w);
      if (cooccur::immediate_context(stats, w) != oracle::brute_neighbors(brute, w)) return fail(where + "N(" + w + ")");
    }
    for (const auto& a : words) {
      for (const auto& b : words) {
        if (stats.pair_count(a, b) != oracle::brute_pair(brute, a, b)) return fail(where + "pair " + a + "," + b);
        if (cooccur::pmi(stats, a, b) != oracle::brute_pmi(brute, a, b)) return fail(where + "pmi " + a + "," + b);
        ++checked;
      }
    }
    for (int c = 0; c < 5; ++c) {
      std::vector<std::string> category;
      std::set<std::string> expected;
      for (std::size_t k = 0; k < 1 + rng.below(8); ++k) {
        category.push_back(words[rng.below(words.size())]);
        const auto n = oracle::brute_neighbors(brute, category.back());
        expected.insert(n.begin(), n.end());
      }
      if (cooccur::category_context(stats, category) != expected) return fail(where + "category context");
    }
  }
  return pass("20 corpora, " + std::to_string(checked) + " word pairs exact");
}

// 5 ---------------------------------------------------------------------------

Verdict pca_oracle() {
  testing::Rng rng(5005);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto e = testing::random_embedding(rng, rng.between(3, 15), rng.between(2, 10));
    const auto pc = interpret::pca_first_pc(e, e.all_features());
    Eigen::MatrixXd m(e.size(), e.dims());
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (std::size_t f = 0; f < e.dims(); ++f) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) = e.at(i, f);
    }
    const auto ref = oracle::power_iteration_pc1(m);
    for (std::size_t i = 0; i < e.size(); ++i) worst = std::max(worst, std::abs(pc.scores[i] - ref.scores[i]));
  }
  if (worst > 1e-8) return fail("max score deviation " + sci(worst));

  std::vector<double> rank_one;
  const std::vector<double> direction{0.5, -1.5, 2.0, 0.25};
  for (int i = 0; i < 7; ++i) {
    const double s = rng.normal();
    for (double d : direction) rank_one.push_back(3.0 + s * d);
  }
  const EmbeddingMatrix r1(testing::word_labels(7), 4, rank_one);
  const double ratio = interpret::pca_first_pc(r1, r1.all_features()).explained_variance_ratio;
  if (std::abs(ratio - 1.0) > 1e-12) return fail("rank-1 explained variance ratio " + fixed(ratio, 15));
  return pass("20 matrices, max deviation " + sci(worst) + "; rank-1 ratio " + fixed(ratio, 15));
}

// 6 ---------------------------------------------------------------------------

Verdict plsr_sanity() {
  const auto start = std::chrono::steady_clock::now();
  testing::Rng rng(6006);
  const std::size_t n = 500;
  const std::size_t p = 60;
  const std::size_t q = 65;
  std::vector<double> x;
  for (std::size_t k = 0; k < n * p; ++k) x.push_back(rng.normal());
  const auto words = testing::word_labels(n);
  const EmbeddingMatrix e(words, p, x);
  Eigen::MatrixXd xm(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < p; ++f) xm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) = e.at(i, f);
  }
  Eigen::MatrixXd b(p, q);
  Eigen::MatrixXd noise(n, q);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = rng.normal();
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise.data()[i] = rng.normal();
  std::vector<std::pair<std::string, std::string>> areas;
  std::vector<std::string> dims;
  for (std::size_t d = 0; d < q; ++d) {
    dims.push_back("dim" + std::to_string(d));
    areas.emplace_back(dims.back(), "area" + std::to_string(d % 14));
  }

  probe::ProbeOptions full;
  full.n_components = p;
  full.workers = 4;
  const auto linear = probe::loocv_probe(e, e.all_features(), probe::make_binder(words, dims, xm * b, areas), full);
  const double min_rho = *std::min_element(linear.per_dimension_rho.begin(), linear.per_dimension_rho.end());

  probe::ProbeOptions standard;
  standard.workers = 4;
  const auto random = probe::loocv_probe(e, e.all_features(), probe::make_binder(words, dims, noise, areas), standard);
  const double noise_mean = stats::mean(random.per_dimension_rho);

  const std::string detail = "linear min rho " + fixed(min_rho, 6) + " (" + std::to_string(full.n_components) +
                             " components), noise mean rho " + fixed(noise_mean, 4) + " (" +
                             std::to_string(standard.n_components) + " components), " +
                             fixed(seconds_since(start), 1) + " s";
  if (min_rho < 0.99 || std::abs(noise_mean) >= 0.1) return fail(detail);
  return pass(detail);
}

// 7 ---------------------------------------------------------------------------

Verdict closed_forms() {
  const double rho = stats::spearman_rho(std::vector<double>{1, 2, 3, 4}, std::vector<double>{2, 1, 4, 3});
  const double d = stats::dice(std::set<int>{1, 2, 3}, std::set<int>{2, 3, 4});
  const auto t = stats::paired_t(std::vector<double>{2, 4, 6, 8}, std::vector<double>{1, 2, 3, 4});
  const std::string detail = "rho " + fixed(rho, 15) + ", dice " + fixed(d, 15) + ", t " + fixed(t.t, 6) + " dof " +
                             std::to_string(t.dof);
  if (std::abs(rho - 0.6) > 1e-15 || std::abs(d - 2.0 / 3.0) > 1e-15 || std::abs(t.t - 3.873) > 0.001 ||
      t.dof != 3) {
    return fail(detail);
  }
  return pass(detail);
}

// 8 ---------------------------------------------------------------------------

struct Reference {
  const char* category;
  double baseline;
  double pruned;
  double retained;
};

constexpr Reference kReference[] = {
    {"Furniture", 0.46, 0.63, 121.00}, {"Clothing", 0.37, 0.52, 84.21}, {"Vegetables", 0.30, 0.45, 58.05},
    {"Sports", 0.40, 0.52, 101.39},    {"Vehicles", 0.66, 0.74, 131.05}, {"Fruit", 0.38, 0.42, 88.48},
    {"Birds", 0.20, 0.37, 57.57},      {"Professions", 0.45, 0.57, 102.43}};

std::optional<fs::path> env_path(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return fs::path(v);
}

std::optional<fs::path> ratings_file(const fs::path& dir, const std::string& category) {
  std::string lower = category;
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (const auto& stem : {category, lower}) {
    for (const char* ext : {".csv", ".tsv", ".txt"}) {
      if (fs::exists(dir / (stem + ext))) return dir / (stem + ext);
    }
  }
  return std::nullopt;
}

Verdict real_data() {
  const auto glove = env_path("SEMPRUNE_GLOVE");
  const auto osf = env_path("SEMPRUNE_OSF_DIR");
  if (!glove || !osf || !fs::exists(*glove) || !fs::is_directory(*osf)) {
    return {Verdict::Kind::Skip, "set SEMPRUNE_GLOVE and SEMPRUNE_OSF_DIR to run"};
  }
  std::vector<std::pair<std::string, HumanRatings>> cats;
  std::unordered_set<std::string> keep;
  for (const auto& ref : kReference) {
    const auto path = ratings_file(*osf, ref.category);
    if (!path) return {Verdict::Kind::Skip, std::string("no ratings file for ") + ref.category};
    cats.emplace_back(ref.category, load_human_ratings(*path));
    keep.insert(cats.back().second.words.begin(), cats.back().second.words.end());
  }
  const auto binder_path = env_path("SEMPRUNE_BINDER");
  std::optional<probe::BinderRatings> binder;
  if (binder_path && fs::exists(*binder_path)) {
    const auto areas = env_path("SEMPRUNE_BINDER_AREAS").value_or(fs::path(SEMPRUNE_SOURCE_DIR) / "data" /
                                                                    "binder_areas.tsv");
    binder = probe::load_binder(*binder_path, areas);
    keep.insert(binder->words.begin(), binder->words.end());
  }
  const auto all = load_embeddings(*glove, &keep);

  std::ostringstream detail;
  bool ok = true;
  std::vector<std::pair<std::string, prune::PruneSolution>> solutions;
  prune::PruneOptions options;
  options.workers = 4;
  for (std::size_t c = 0; c < cats.size(); ++c) {
    std::vector<std::string> words;
    for (const auto& w : cats[c].second.words) {
      if (all.index_of(w)) words.push_back(w);
    }
    const auto e = all.select_words(words);
    const auto human = human_structure(cats[c].second, words);
    const auto s = prune::summarize(prune::cross_validate(e, human, options));
    const auto& ref = kReference[c];
    const bool row_ok = std::abs(s.baseline_mean - ref.baseline) <= 0.01 && std::abs(s.pruned_mean - ref.pruned) <= 0.05 &&
                        std::abs(s.retained_mean - ref.retained) <= 15.0;
    ok = ok && row_ok;
    detail << ref.category << " " << fixed(s.baseline_mean, 2) << "/" << fixed(s.pruned_mean, 2) << "/"
           << fixed(s.retained_mean, 1) << (row_ok ? "" : "(!)") << "; ";
    solutions.emplace_back(ref.category, prune::prune(e, human, covered_pairs(human, PairIndex::complete(e.size())), options));
  }
  if (binder) {
    probe::ProbeOptions po;
    po.workers = 4;
    const auto m = probe::probe_all(solutions, all, *binder, 60, po);
    const auto best = [&](const std::string& area) {
      const auto a = static_cast<std::size_t>(std::find(m.areas.begin(), m.areas.end(), area) - m.areas.begin());
      std::size_t top = 0;
      for (std::size_t c = 1; c < m.categories.size(); ++c) {
        if (m.at(c, a) > m.at(top, a)) top = c;
      }
      return m.categories[top];
    };
    const auto cognition = best("Cognition");
    const auto gustation = best("Gustation");
    const bool ordinal = cognition == "Professions" && (gustation == "Fruit" || gustation == "Vegetables");
    ok = ok && ordinal;
    detail << "Cognition best " << cognition << ", Gustation best " << gustation;
  } else {
    detail << "ordinal probe checks need SEMPRUNE_BINDER";
  }
  return ok ? pass(detail.str()) : fail(detail.str());
}

// 9 ---------------------------------------------------------------------------

Verdict determinism() {
  const auto root = fs::temp_directory_path() / "semprune_acceptance";
  const auto ws = testing::make_workspace(root / "ws");
  std::vector<std::map<std::string, std::string>> snaps;
  for (const std::string workers : {"1", "1", "8"}) {
    const auto out = root / ("run" + std::to_string(snaps.size()));
    fs::remove_all(out);
    const std::vector<std::string> base{"--config", ws.config.string(), "--out", out.string(), "--workers", workers};
    std::vector<std::string> sols;
    for (const auto& [name, words] : testing::toy_categories()) sols.push_back((out / (name + ".solution.json")).string());
    std::ostringstream sink;
    for (const std::string cmd : {"prune", "overlap", "interpret", "probe", "count-corpus"}) {
      auto args = base;
      args.push_back(cmd);
      if (cmd != "prune" && cmd != "count-corpus") args.insert(args.end(), sols.begin(), sols.end());
      if (cli::run(args, sink, sink) != 0) return fail(cmd + " failed: " + sink.str());
    }
    snaps.push_back(testing::snapshot(out));
  }
  for (std::size_t k = 1; k < snaps.size(); ++k) {
    if (snaps[k] != snaps[0]) {
      for (const auto& [name, bytes] : snaps[0]) {
        if (!snaps[k].count(name) || snaps[k].at(name) != bytes) return fail(name + " differs in run " + std::to_string(k));
      }
      return fail("file sets differ in run " + std::to_string(k));
    }
  }
  return pass(std::to_string(snaps[0].size()) + " artifacts identical across 2 runs and workers 1/8");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 curve-maximum guarantee", curve_maximum},
      {"2 planted-subspace recovery", planted_recovery},
      {"3 ranking oracle equivalence", ranking_oracle},
      {"4 PMI exact-count oracle", pmi_oracle},
      {"5 PCA oracle", pca_oracle},
      {"6 PLSR sanity", plsr_sanity},
      {"7 statistics closed forms", closed_forms},
      {"8 published category results", real_data},
      {"9 pipeline determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = fail(std::string("exception: ") + e.what());
    }
    const char* tag = v.kind == Verdict::Kind::Pass ? "PASS" : v.kind == Verdict::Kind::Fail ? "FAIL" : "PASS SKIPPED-NO-DATA";
    if (v.kind == Verdict::Kind::Fail) ++failures;
    std::cout << tag << "  " << name << ": " << v.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
