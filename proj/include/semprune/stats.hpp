#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <vector>

namespace semprune::stats {

/// Fractional ranks starting at 1; tied values share the mean of the ranks
/// they span.
[[nodiscard]] std::vector<double> rank_transform(std::span<const double> x);

/// Product-moment correlation. Throws ConstantSeries when either input has
/// zero variance and LengthMismatch / InsufficientSamples on bad shapes.
[[nodiscard]] double pearson_r(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of the rank-transformed inputs (n >= 3).
[[nodiscard]] double spearman_rho(std::span<const double> x, std::span<const double> y);

/// Two-sided p-value for a rank correlation via the Student-t approximation
/// with n - 2 degrees of freedom.
[[nodiscard]] double spearman_pvalue(double rho, std::size_t n);

struct PairedT {
  double t = 0.0;
  std::size_t dof = 0;
};

/// Paired t statistic on a - b. Throws ZeroVariance when every difference is
/// identical.
[[nodiscard]] PairedT paired_t(std::span<const double> a, std::span<const double> b);

[[nodiscard]] double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator); 0 for a single value.
[[nodiscard]] double sample_sd(std::span<const double> x);

/// 2|a ∩ b| / (|a| + |b|). Throws EmptySet if either set is empty.
template <typename T>
[[nodiscard]] double dice(const std::set<T>& a, const std::set<T>& b);

}  // namespace semprune::stats

#include "semprune/detail/dice.ipp"
