#include "semprune/pruner.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "semprune/error.hpp"
#include "semprune/parallel.hpp"

namespace semprune::prune {

namespace {

// Fit of a candidate RSM. A model series with no variance (every pair
// degenerate, or all similarities equal) carries no ordering information and
// scores 0 so the search can continue; a constant human series is a data
// error and propagates.
double search_fit(const std::vector<double>& model, const std::vector<double>& human) {
  try {
    return stats::spearman_rho(model, human);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::ConstantSeries) throw;
    if (std::all_of(human.begin(), human.end(), [&](double v) { return v == human.front(); })) throw;
    return 0.0;
  }
}

void check_search_inputs(const EmbeddingMatrix& e, const PairIndex& pairs) {
  if (e.dims() < 3) throw Error(ErrorCode::InvalidInput, "feature ranking needs at least 3 features");
  if (pairs.size() < 3) throw Error(ErrorCode::InsufficientSamples, "feature ranking needs at least 3 pairs");
}

}  // namespace

FeatureRanking rank_features(const EmbeddingMatrix& e, const SimilarityStructure& human, const PairIndex& pairs,
                             const PruneOptions& options) {
  check_search_inputs(e, pairs);
  const auto human_values = gather(human, pairs);
  const std::size_t n_features = e.dims();

  const double baseline = search_fit(build_rsm(e, e.all_features(), pairs).values, human_values);

  FeatureRanking ranking;
  ranking.d_scores.assign(n_features, 0.0);
  parallel_for(n_features, options.workers, [&](std::size_t f) {
    FeatureSet reduced;
    reduced.reserve(n_features - 1);
    for (std::size_t g = 0; g < n_features; ++g) {
      if (g != f) reduced.push_back(g);
    }
    const double fit = search_fit(build_rsm(e, reduced, pairs).values, human_values);
    ranking.d_scores[f] = baseline - fit;
    if (options.counters) ++options.counters->leave_one_out_builds;
  });

  ranking.order.resize(n_features);
  std::iota(ranking.order.begin(), ranking.order.end(), std::size_t{0});
  std::stable_sort(ranking.order.begin(), ranking.order.end(), [&](std::size_t a, std::size_t b) {
    return ranking.d_scores[a] > ranking.d_scores[b];
  });
  return ranking;
}

std::vector<double> reinsertion_curve(const EmbeddingMatrix& e, const SimilarityStructure& human,
                                      const PairIndex& pairs, const FeatureRanking& ranking,
                                      const PruneOptions& options) {
  check_search_inputs(e, pairs);
  if (ranking.order.size() != e.dims()) {
    throw Error(ErrorCode::LengthMismatch, "ranking must cover every feature");
  }
  const auto human_values = gather(human, pairs);

  std::vector<double> curve(e.dims(), kUnselectable);
  if (options.counters) ++options.counters->prefix_evaluations;
  parallel_for(e.dims() - 1, options.workers, [&](std::size_t k) {
    const std::size_t prefix = k + 2;
    const FeatureSet subset(ranking.order.begin(), ranking.order.begin() + static_cast<std::ptrdiff_t>(prefix));
    curve[prefix - 1] = search_fit(build_rsm(e, subset, pairs).values, human_values);
    if (options.counters) ++options.counters->prefix_evaluations;
  });
  return curve;
}

PruneSolution prune(const EmbeddingMatrix& e, const SimilarityStructure& human, const PairIndex& pairs,
                    const PruneOptions& options) {
  PruneSolution solution;
  solution.n_pairs = pairs.size();
  solution.ranking = rank_features(e, human, pairs, options);
  solution.curve = reinsertion_curve(e, human, pairs, solution.ranking, options);
  solution.baseline_rho = solution.curve.back();

  // first index wins ties: smallest prefix at equal fit
  const auto best = std::max_element(solution.curve.begin(), solution.curve.end());
  const auto prefix = static_cast<std::size_t>(best - solution.curve.begin()) + 1;
  solution.selected.assign(solution.ranking.order.begin(),
                           solution.ranking.order.begin() + static_cast<std::ptrdiff_t>(prefix));
  solution.selected_rho = *best;
  return solution;
}

CrossValidation cross_validate(const EmbeddingMatrix& e, const SimilarityStructure& human,
                               const PruneOptions& options) {
  const std::size_t n = e.size();
  if (n < 4) throw Error(ErrorCode::TooFewWords, "cross-validation needs at least 4 words");
  const PairIndex available = covered_pairs(human, PairIndex::complete(n));
  const SimilarityStructure full = build_rsm(e, e.all_features(), available);

  CrossValidation cv;
  cv.folds.resize(n);
  parallel_for(n, options.workers, [&](std::size_t i) {
    const FoldSpec fold = make_fold(available, i);
    FoldResult& result = cv.folds[i];
    result.target_word = e.word(i);
    result.n_test_pairs = fold.test_pairs.size();

    PruneOptions inner = options;
    inner.workers = 1;
    const PruneSolution solution = prune(e, human, fold.train_pairs, inner);
    result.n_retained = solution.selected.size();

    if (fold.test_pairs.size() < 3) {
      result.degenerate = true;
      return;
    }
    try {
      result.baseline_test_rho = two_oi(full, human, fold.test_pairs);
      result.pruned_test_rho = two_oi(build_rsm(e, solution.selected, fold.test_pairs), human, fold.test_pairs);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::ConstantSeries) throw;
      result.degenerate = true;
      result.baseline_test_rho = 0.0;
      result.pruned_test_rho = 0.0;
    }
  });

  std::vector<double> pruned;
  std::vector<double> baseline;
  for (const auto& f : cv.folds) {
    if (f.degenerate) continue;
    pruned.push_back(f.pruned_test_rho);
    baseline.push_back(f.baseline_test_rho);
  }
  if (pruned.size() >= 2) {
    try {
      cv.t_test = stats::paired_t(pruned, baseline);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::ZeroVariance) throw;
    }
  }
  return cv;
}

CvSummary summarize(const CrossValidation& cv) {
  CvSummary s;
  s.n_folds = cv.folds.size();
  std::vector<double> baseline;
  std::vector<double> pruned;
  std::vector<double> retained;
  for (const auto& f : cv.folds) {
    if (f.degenerate) {
      ++s.n_degenerate;
      continue;
    }
    baseline.push_back(f.baseline_test_rho);
    pruned.push_back(f.pruned_test_rho);
    retained.push_back(static_cast<double>(f.n_retained));
  }
  if (!baseline.empty()) {
    s.baseline_mean = stats::mean(baseline);
    s.baseline_sd = stats::sample_sd(baseline);
    s.pruned_mean = stats::mean(pruned);
    s.pruned_sd = stats::sample_sd(pruned);
    s.retained_mean = stats::mean(retained);
    s.retained_sd = stats::sample_sd(retained);
  }
  s.t_test = cv.t_test;
  return s;
}

std::vector<std::size_t> retention_counts(const CategorySets& solutions, std::size_t n_features) {
  std::vector<std::size_t> counts(n_features, 0);
  for (const auto& [name, features] : solutions) {
    const std::set<std::size_t> unique(features.begin(), features.end());
    for (std::size_t f : unique) {
      if (f >= n_features) {
        throw Error(ErrorCode::InvalidInput, "category '" + name + "' has a feature index out of range");
      }
      ++counts[f];
    }
  }
  return counts;
}

OverlapMatrix overlap_matrix(const CategorySets& solutions) {
  if (solutions.size() < 2) throw Error(ErrorCode::InvalidInput, "overlap needs at least 2 categories");
  const std::size_t k = solutions.size();
  std::vector<std::set<std::size_t>> sets;
  OverlapMatrix out;
  for (const auto& [name, features] : solutions) {
    out.categories.push_back(name);
    sets.emplace_back(features.begin(), features.end());
  }
  out.dice.assign(k * k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) out.dice[a * k + b] = stats::dice(sets[a], sets[b]);
  }
  return out;
}

}  // namespace semprune::prune
