#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "semprune/embedding.hpp"
#include "semprune/error.hpp"
#include "semprune/pruner.hpp"

namespace semprune::probe {

/// Word-by-dimension human ratings with each dimension assigned to one area.
struct BinderRatings {
  std::vector<std::string> words;
  std::vector<std::string> dims;
  Eigen::MatrixXd values;
  /// Area labels in order of first appearance in the mapping.
  std::vector<std::string> areas;
  /// Index into `areas` for each dimension.
  std::vector<std::size_t> dim_area;
};

/// (dimension, area) rows.
[[nodiscard]] std::vector<std::pair<std::string, std::string>> load_area_map(const std::filesystem::path& path);

/// Ratings file: header `word,<dim>,...` then one row per word. Every
/// dimension must appear exactly once in the area map and no cell may be
/// empty.
[[nodiscard]] BinderRatings load_binder(const std::filesystem::path& ratings,
                                        const std::filesystem::path& area_map);

[[nodiscard]] BinderRatings make_binder(std::vector<std::string> words, std::vector<std::string> dims,
                                        Eigen::MatrixXd values,
                                        const std::vector<std::pair<std::string, std::string>>& area_map);

/// First k features of the solution's ranking.
[[nodiscard]] FeatureSet top_k_features(const prune::PruneSolution& solution, std::size_t k);

/// PLS2 regression fitted by NIPALS deflation. Predictors are centered and
/// scaled to unit variance; responses are centered.
class PlsrModel {
 public:
  [[nodiscard]] Eigen::MatrixXd predict(const Eigen::MatrixXd& x) const;

  [[nodiscard]] std::size_t n_components() const noexcept { return n_components_; }
  [[nodiscard]] const Eigen::MatrixXd& weights() const noexcept { return weights_; }
  [[nodiscard]] const Eigen::MatrixXd& x_loadings() const noexcept { return x_loadings_; }
  [[nodiscard]] const Eigen::MatrixXd& y_loadings() const noexcept { return y_loadings_; }
  /// Coefficients in the scaled predictor space.
  [[nodiscard]] const Eigen::MatrixXd& coefficients() const noexcept { return coefficients_; }
  [[nodiscard]] const Eigen::RowVectorXd& x_mean() const noexcept { return x_mean_; }
  [[nodiscard]] const Eigen::RowVectorXd& x_scale() const noexcept { return x_scale_; }
  [[nodiscard]] const Eigen::RowVectorXd& y_mean() const noexcept { return y_mean_; }

 private:
  friend PlsrModel plsr_fit(const Eigen::MatrixXd&, const Eigen::MatrixXd&, std::size_t);

  std::size_t n_components_ = 0;
  Eigen::RowVectorXd x_mean_;
  Eigen::RowVectorXd x_scale_;
  Eigen::RowVectorXd y_mean_;
  Eigen::MatrixXd weights_;
  Eigen::MatrixXd x_loadings_;
  Eigen::MatrixXd y_loadings_;
  Eigen::MatrixXd coefficients_;
};

/// Thrown when a latent score vector collapses before `requested`
/// components; `achieved` components were extracted cleanly.
class RankDeficient : public Error {
 public:
  RankDeficient(std::size_t achieved, std::size_t requested);
  [[nodiscard]] std::size_t achieved() const noexcept { return achieved_; }

 private:
  std::size_t achieved_;
};

[[nodiscard]] PlsrModel plsr_fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, std::size_t n_components);

/// Fits on the training rows, dropping to the largest component count the
/// data supports if the requested count collapses.
[[nodiscard]] PlsrModel plsr_fit_adaptive(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                          std::size_t n_components);

struct ProbeReport {
  std::string category;
  std::vector<std::string> dims;
  std::vector<std::string> areas;
  std::vector<double> per_dimension_rho;
  std::vector<double> per_area_rho;
  std::size_t n_features_used = 0;
  std::size_t n_components = 0;
  std::size_t n_words = 0;
  /// Ratings rows with no embedding, or repeating an already used word.
  std::vector<std::string> dropped_words;
};

struct ProbeOptions {
  std::size_t n_components = 30;
  std::size_t workers = 1;
};

/// Leave-one-word-out PLSR from the embedding features in `features` to the
/// rated dimensions, scored per dimension by Spearman rho across words.
[[nodiscard]] ProbeReport loocv_probe(const EmbeddingMatrix& e, const FeatureSet& features,
                                      const BinderRatings& binder, const ProbeOptions& options = {},
                                      std::string category = {});

/// The held-out predictions behind a report, rows in the realized word order.
struct LoocvPredictions {
  std::vector<std::string> words;
  Eigen::MatrixXd predicted;
  Eigen::MatrixXd truth;
  std::vector<std::string> dropped_words;
  std::size_t n_components = 0;
};

[[nodiscard]] LoocvPredictions loocv_predict(const EmbeddingMatrix& e, const FeatureSet& features,
                                             const BinderRatings& binder, const ProbeOptions& options = {});

struct ProbeMatrix {
  std::vector<std::string> categories;
  std::vector<std::string> areas;
  /// Row-major categories x areas.
  std::vector<double> values;
  std::vector<ProbeReport> reports;

  [[nodiscard]] double at(std::size_t category, std::size_t area) const {
    return values[category * areas.size() + area];
  }
};

[[nodiscard]] ProbeMatrix probe_all(const std::vector<std::pair<std::string, prune::PruneSolution>>& categories,
                                    const EmbeddingMatrix& e, const BinderRatings& binder, std::size_t k,
                                    const ProbeOptions& options = {});

}  // namespace semprune::probe
