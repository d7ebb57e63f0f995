#include "semprune/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>

#include "semprune/error.hpp"
#include "semprune/parallel.hpp"
#include "semprune/stats.hpp"

namespace semprune::interpret {

Pc1Result pca_first_pc(const EmbeddingMatrix& e, const FeatureSet& features) {
  const auto n = static_cast<Eigen::Index>(e.size());
  const auto k = static_cast<Eigen::Index>(features.size());
  if (n < 3) throw Error(ErrorCode::InsufficientSamples, "PCA needs at least 3 words");
  if (k < 2) throw Error(ErrorCode::SubsetTooSmall, "PCA needs at least 2 features");

  Eigen::MatrixXd x(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index f = 0; f < k; ++f) {
      const auto col = features[static_cast<std::size_t>(f)];
      if (col >= e.dims()) throw Error(ErrorCode::InvalidInput, "feature index out of range");
      x(i, f) = e.at(static_cast<std::size_t>(i), col);
    }
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double total = sv.squaredNorm();
  if (!(total > 0.0)) throw Error(ErrorCode::DegenerateData, "embedding rows have zero covariance");

  Eigen::VectorXd v = svd.matrixV().col(0);
  Eigen::Index biggest = 0;
  for (Eigen::Index f = 1; f < k; ++f) {
    if (std::abs(v(f)) > std::abs(v(biggest))) biggest = f;
  }
  if (v(biggest) < 0.0) v = -v;

  const Eigen::VectorXd scores = x * v;
  Pc1Result out;
  out.words = e.words();
  out.features = features;
  out.scores.assign(scores.data(), scores.data() + n);
  out.loadings.assign(v.data(), v.data() + k);
  out.explained_variance_ratio = sv(0) * sv(0) / total;
  return out;
}

bool is_number_like(std::string_view token) {
  return std::any_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; });
}

Interpretation interpret_category(const cooccur::CorpusStats& stats, const Pc1Result& pc1,
                                  const std::vector<std::string>& category, const InterpretOptions& options) {
  if (category != pc1.words) {
    throw Error(ErrorCode::InvalidInput, "category order must match the PC1 word order");
  }
  if (category.size() < 4) throw Error(ErrorCode::InsufficientSamples, "interpretation needs at least 4 words");

  Interpretation out;
  const auto context = cooccur::category_context(stats, category, &out.missing_category_words);
  out.counts.context_size = context.size();

  std::vector<std::string> frequent;
  for (const auto& w : context) {
    if (stats.frequency_rank(w) <= options.frequency_cutoff) frequent.push_back(w);
  }
  out.counts.after_frequency = frequent.size();

  std::vector<std::string> lexical;
  for (const auto& w : frequent) {
    if (is_number_like(w) || stats.capitalized_fraction(w) > options.proper_noun_threshold) continue;
    lexical.push_back(w);
  }
  out.counts.after_lexical = lexical.size();

  struct Candidate {
    bool dense = false;
    bool tested = false;
    InterpretationHit hit;
  };
  std::vector<Candidate> candidates(lexical.size());
  parallel_for(lexical.size(), options.workers, [&](std::size_t c) {
    auto& cand = candidates[c];
    const auto vec = cooccur::pmi_vector(stats, lexical[c], category);
    if (!(vec.nonzero_fraction > options.nonzero_threshold)) return;
    cand.dense = true;
    cand.hit.word = lexical[c];
    cand.hit.nonzero_fraction = vec.nonzero_fraction;
    cand.hit.frequency_rank = stats.frequency_rank(lexical[c]);
    cand.hit.pmi_values = vec.values;
    try {
      cand.hit.rho = stats::spearman_rho(vec.values, pc1.scores);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::ConstantSeries) throw;
      return;
    }
    cand.hit.p = stats::spearman_pvalue(cand.hit.rho, category.size());
    cand.tested = true;
  });

  for (auto& cand : candidates) {
    if (!cand.dense) continue;
    ++out.counts.after_nonzero;
    if (!cand.tested) continue;
    ++out.counts.tested;
    if (cand.hit.p < options.alpha) out.hits.push_back(std::move(cand.hit));
  }
  out.counts.significant = out.hits.size();

  std::sort(out.hits.begin(), out.hits.end(), [](const InterpretationHit& a, const InterpretationHit& b) {
    const double ra = std::abs(a.rho);
    const double rb = std::abs(b.rho);
    if (ra != rb) return ra > rb;
    return a.word < b.word;
  });
  return out;
}

Comparison compare_pruned_full(const std::vector<InterpretationHit>& pruned,
                               const std::vector<InterpretationHit>& full) {
  std::set<std::string> a;
  std::set<std::string> b;
  for (const auto& h : pruned) a.insert(h.word);
  for (const auto& h : full) b.insert(h.word);
  Comparison out;
  out.n_pruned = a.size();
  out.n_full = b.size();
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out.common));
  out.n_common = out.common.size();
  return out;
}

}  // namespace semprune::interpret
