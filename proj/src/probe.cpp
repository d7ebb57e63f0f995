#include "semprune/probe.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include <Eigen/Eigenvalues>

#include "semprune/parallel.hpp"
#include "semprune/stats.hpp"
#include "semprune/table_io.hpp"

namespace semprune::probe {

// --- loading ----------------------------------------------------------------

std::vector<std::pair<std::string, std::string>> load_area_map(const std::filesystem::path& path) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto table = io::read_delimited(path);
  for (std::size_t r = 0; r < table.size(); ++r) {
    const auto& row = table[r];
    if (row.size() < 2) {
      throw Error(ErrorCode::InvalidInput, path.filename().string() + ": row " + std::to_string(r + 1) +
                                               " needs dimension and area");
    }
    if (r == 0 && row[0] == "dimension" && row[1] == "area") continue;
    out.emplace_back(row[0], row[1]);
  }
  if (out.empty()) throw Error(ErrorCode::InvalidInput, "empty area map " + path.string());
  return out;
}

BinderRatings make_binder(std::vector<std::string> words, std::vector<std::string> dims, Eigen::MatrixXd values,
                          const std::vector<std::pair<std::string, std::string>>& area_map) {
  if (values.rows() != static_cast<Eigen::Index>(words.size()) ||
      values.cols() != static_cast<Eigen::Index>(dims.size())) {
    throw Error(ErrorCode::LengthMismatch, "ratings matrix shape does not match labels");
  }
  if (!values.allFinite()) throw Error(ErrorCode::InvalidInput, "ratings contain missing or non-finite values");

  std::map<std::string, std::string> dim_to_area;
  for (const auto& [dim, area] : area_map) {
    if (!dim_to_area.emplace(dim, area).second) {
      throw Error(ErrorCode::InvalidInput, "dimension '" + dim + "' assigned to more than one area");
    }
  }

  BinderRatings out;
  for (const auto& [dim, area] : area_map) {
    if (std::find(out.areas.begin(), out.areas.end(), area) == out.areas.end()) out.areas.push_back(area);
  }
  for (const auto& dim : dims) {
    const auto it = dim_to_area.find(dim);
    if (it == dim_to_area.end()) throw Error(ErrorCode::InvalidInput, "dimension '" + dim + "' has no area");
    out.dim_area.push_back(static_cast<std::size_t>(
        std::find(out.areas.begin(), out.areas.end(), it->second) - out.areas.begin()));
  }
  // drop areas with no dimension present in the ratings
  std::vector<std::string> used;
  std::vector<std::size_t> remap(out.areas.size(), 0);
  for (std::size_t a = 0; a < out.areas.size(); ++a) {
    if (std::find(out.dim_area.begin(), out.dim_area.end(), a) != out.dim_area.end()) {
      remap[a] = used.size();
      used.push_back(out.areas[a]);
    }
  }
  for (auto& a : out.dim_area) a = remap[a];
  out.areas = std::move(used);

  out.words = std::move(words);
  out.dims = std::move(dims);
  out.values = std::move(values);
  return out;
}

BinderRatings load_binder(const std::filesystem::path& ratings, const std::filesystem::path& area_map) {
  const auto table = io::read_delimited(ratings);
  if (table.size() < 2) throw Error(ErrorCode::InvalidInput, "ratings file needs a header and rows");
  const auto& header = table.front();
  if (header.size() < 2) throw Error(ErrorCode::InvalidInput, "ratings header needs word and dimension columns");

  std::vector<std::string> dims(header.begin() + 1, header.end());
  std::vector<std::string> words;
  Eigen::MatrixXd values(static_cast<Eigen::Index>(table.size() - 1), static_cast<Eigen::Index>(dims.size()));
  for (std::size_t r = 1; r < table.size(); ++r) {
    const auto& row = table[r];
    if (row.size() != header.size()) {
      throw Error(ErrorCode::InvalidInput, ratings.filename().string() + ": row " + std::to_string(r + 1) +
                                               " has " + std::to_string(row.size()) + " fields, expected " +
                                               std::to_string(header.size()));
    }
    words.push_back(row[0]);
    for (std::size_t d = 0; d < dims.size(); ++d) {
      double v = 0.0;
      if (!io::parse_double(row[d + 1], v)) {
        throw Error(ErrorCode::InvalidInput, ratings.filename().string() + ": row " + std::to_string(r + 1) +
                                                 " column '" + dims[d] + "' is not a number");
      }
      values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(d)) = v;
    }
  }
  return make_binder(std::move(words), std::move(dims), std::move(values), load_area_map(area_map));
}

FeatureSet top_k_features(const prune::PruneSolution& solution, std::size_t k) {
  if (k > solution.ranking.order.size()) {
    throw Error(ErrorCode::KTooLarge, "k = " + std::to_string(k) + " exceeds the " +
                                          std::to_string(solution.ranking.order.size()) + " ranked features");
  }
  return FeatureSet(solution.ranking.order.begin(), solution.ranking.order.begin() + static_cast<std::ptrdiff_t>(k));
}

// --- PLSR -------------------------------------------------------------------

RankDeficient::RankDeficient(std::size_t achieved, std::size_t requested)
    : Error(ErrorCode::RankDeficient, "latent direction collapsed after " + std::to_string(achieved) + " of " +
                                          std::to_string(requested) + " components"),
      achieved_(achieved) {}

PlsrModel plsr_fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, std::size_t n_components) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  const Eigen::Index m = y.cols();
  if (y.rows() != n) throw Error(ErrorCode::LengthMismatch, "predictor and response row counts differ");
  if (n < 2 || p < 1 || m < 1) throw Error(ErrorCode::InsufficientSamples, "PLSR needs rows and columns");
  const auto max_components = static_cast<std::size_t>(std::min<Eigen::Index>(p, n - 1));
  if (n_components < 1 || n_components > max_components) {
    throw Error(ErrorCode::InvalidInput, "n_components must be in [1, " + std::to_string(max_components) + "]");
  }

  PlsrModel model;
  model.x_mean_ = x.colwise().mean();
  model.y_mean_ = y.colwise().mean();
  Eigen::MatrixXd xs = x.rowwise() - model.x_mean_;
  model.x_scale_ = (xs.colwise().squaredNorm() / static_cast<double>(n - 1)).cwiseSqrt();
  for (Eigen::Index j = 0; j < p; ++j) {
    if (model.x_scale_(j) == 0.0) model.x_scale_(j) = 1.0;
  }
  xs = xs.array().rowwise() / model.x_scale_.array();
  const Eigen::MatrixXd ys = y.rowwise() - model.y_mean_;

  const double x_norm = xs.norm();
  const auto k = static_cast<Eigen::Index>(n_components);
  model.weights_.resize(p, k);
  model.x_loadings_.resize(p, k);
  model.y_loadings_.resize(m, k);

  // Cross-covariance of the deflated blocks. Deflating X by t p' moves it to
  // S - (t't) p q'; Y never needs explicit deflation because scores are
  // mutually orthogonal.
  Eigen::MatrixXd cross = xs.transpose() * ys;
  for (Eigen::Index a = 0; a < k; ++a) {
    Eigen::VectorXd w;
    if (m == 1) {
      w = cross.col(0);
    } else {
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cross * cross.transpose());
      w = eig.eigenvectors().col(p - 1);
    }
    const double w_norm = w.norm();
    if (!(w_norm > 0.0)) throw RankDeficient(static_cast<std::size_t>(a), n_components);
    w /= w_norm;
    Eigen::Index biggest = 0;
    w.cwiseAbs().maxCoeff(&biggest);
    if (w(biggest) < 0.0) w = -w;

    const Eigen::VectorXd t = xs * w;
    const double tt = t.squaredNorm();
    if (!(std::sqrt(tt) > 1e-12 * x_norm)) throw RankDeficient(static_cast<std::size_t>(a), n_components);
    const Eigen::VectorXd load = xs.transpose() * t / tt;
    const Eigen::VectorXd q = ys.transpose() * t / tt;

    xs.noalias() -= t * load.transpose();
    cross.noalias() -= tt * load * q.transpose();
    model.weights_.col(a) = w;
    model.x_loadings_.col(a) = load;
    model.y_loadings_.col(a) = q;
  }

  const Eigen::MatrixXd pw = model.x_loadings_.transpose() * model.weights_;
  const Eigen::MatrixXd rotations = model.weights_ * pw.partialPivLu().inverse();
  model.coefficients_ = rotations * model.y_loadings_.transpose();
  model.n_components_ = n_components;
  return model;
}

PlsrModel plsr_fit_adaptive(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, std::size_t n_components) {
  try {
    return plsr_fit(x, y, n_components);
  } catch (const RankDeficient& err) {
    if (err.achieved() == 0) throw;
    return plsr_fit(x, y, err.achieved());
  }
}

Eigen::MatrixXd PlsrModel::predict(const Eigen::MatrixXd& x) const {
  if (x.cols() != x_mean_.size()) throw Error(ErrorCode::LengthMismatch, "predictor column count differs");
  const Eigen::MatrixXd xs = (x.rowwise() - x_mean_).array().rowwise() / x_scale_.array();
  return (xs * coefficients_).rowwise() + y_mean_;
}

// --- LOOCV probing ----------------------------------------------------------

LoocvPredictions loocv_predict(const EmbeddingMatrix& e, const FeatureSet& features, const BinderRatings& binder,
                               const ProbeOptions& options) {
  if (features.empty()) throw Error(ErrorCode::SubsetTooSmall, "probe needs at least one feature");
  for (auto f : features) {
    if (f >= e.dims()) throw Error(ErrorCode::InvalidInput, "feature index out of range");
  }

  LoocvPredictions out;
  std::vector<std::size_t> emb_rows;
  std::vector<Eigen::Index> rating_rows;
  std::unordered_set<std::string> used;
  for (std::size_t r = 0; r < binder.words.size(); ++r) {
    const auto& w = binder.words[r];
    const auto idx = e.index_of(w);
    if (!idx || !used.insert(w).second) {
      out.dropped_words.push_back(w);
      continue;
    }
    out.words.push_back(w);
    emb_rows.push_back(*idx);
    rating_rows.push_back(static_cast<Eigen::Index>(r));
  }

  const auto n = static_cast<Eigen::Index>(out.words.size());
  const auto k = static_cast<Eigen::Index>(features.size());
  if (n < 4) throw Error(ErrorCode::InsufficientSamples, "probe needs at least 4 rated words with embeddings");

  Eigen::MatrixXd x(n, k);
  Eigen::MatrixXd y(n, binder.values.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index f = 0; f < k; ++f) x(i, f) = e.at(emb_rows[static_cast<std::size_t>(i)], features[static_cast<std::size_t>(f)]);
    y.row(i) = binder.values.row(rating_rows[static_cast<std::size_t>(i)]);
  }

  const std::size_t components =
      std::min<std::size_t>(options.n_components, std::min<std::size_t>(static_cast<std::size_t>(k),
                                                                         static_cast<std::size_t>(n - 2)));
  out.n_components = components;
  out.predicted.resize(n, y.cols());
  parallel_for(static_cast<std::size_t>(n), options.workers, [&](std::size_t held) {
    const auto h = static_cast<Eigen::Index>(held);
    Eigen::MatrixXd x_train(n - 1, k);
    Eigen::MatrixXd y_train(n - 1, y.cols());
    if (h > 0) {
      x_train.topRows(h) = x.topRows(h);
      y_train.topRows(h) = y.topRows(h);
    }
    if (h < n - 1) {
      x_train.bottomRows(n - 1 - h) = x.bottomRows(n - 1 - h);
      y_train.bottomRows(n - 1 - h) = y.bottomRows(n - 1 - h);
    }
    const PlsrModel model = plsr_fit_adaptive(x_train, y_train, components);
    out.predicted.row(h) = model.predict(x.row(h));
  });
  out.truth = std::move(y);
  return out;
}

ProbeReport loocv_probe(const EmbeddingMatrix& e, const FeatureSet& features, const BinderRatings& binder,
                        const ProbeOptions& options, std::string category) {
  const auto preds = loocv_predict(e, features, binder, options);

  ProbeReport report;
  report.category = std::move(category);
  report.dims = binder.dims;
  report.areas = binder.areas;
  report.n_features_used = features.size();
  report.n_components = preds.n_components;
  report.n_words = preds.words.size();
  report.dropped_words = preds.dropped_words;

  const auto n = static_cast<std::size_t>(preds.truth.rows());
  std::vector<double> predicted(n);
  std::vector<double> truth(n);
  for (Eigen::Index d = 0; d < preds.truth.cols(); ++d) {
    for (std::size_t i = 0; i < n; ++i) {
      predicted[i] = preds.predicted(static_cast<Eigen::Index>(i), d);
      truth[i] = preds.truth(static_cast<Eigen::Index>(i), d);
    }
    report.per_dimension_rho.push_back(stats::spearman_rho(predicted, truth));
  }

  report.per_area_rho.assign(binder.areas.size(), 0.0);
  std::vector<std::size_t> members(binder.areas.size(), 0);
  for (std::size_t d = 0; d < binder.dims.size(); ++d) {
    report.per_area_rho[binder.dim_area[d]] += report.per_dimension_rho[d];
    ++members[binder.dim_area[d]];
  }
  for (std::size_t a = 0; a < members.size(); ++a) {
    report.per_area_rho[a] /= static_cast<double>(members[a]);
  }
  return report;
}

ProbeMatrix probe_all(const std::vector<std::pair<std::string, prune::PruneSolution>>& categories,
                      const EmbeddingMatrix& e, const BinderRatings& binder, std::size_t k,
                      const ProbeOptions& options) {
  ProbeMatrix out;
  out.areas = binder.areas;
  for (const auto& [name, solution] : categories) {
    if (solution.ranking.order.size() != e.dims()) {
      throw Error(ErrorCode::LengthMismatch, "solution '" + name + "' was ranked over a different feature space");
    }
    const auto features = top_k_features(solution, k);
    out.reports.push_back(loocv_probe(e, features, binder, options, name));
    out.categories.push_back(name);
    const auto& area_rho = out.reports.back().per_area_rho;
    out.values.insert(out.values.end(), area_rho.begin(), area_rho.end());
  }
  return out;
}

}  // namespace semprune::probe
