#include "semprune/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "semprune/error.hpp"

namespace semprune {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConstantSeries: return "ConstantSeries";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::SubsetTooSmall: return "SubsetTooSmall";
    case ErrorCode::TooFewWords: return "TooFewWords";
    case ErrorCode::MissingPair: return "MissingPair";
    case ErrorCode::UnknownWord: return "UnknownWord";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace stats {

std::vector<double> rank_transform(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  std::vector<double> ranks(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && x[order[end]] == x[order[start]]) ++end;
    // positions start..end-1 hold ranks start+1..end
    const double shared = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = shared;
    start = end;
  }
  return ranks;
}

double mean(std::span<const double> x) {
  if (x.empty()) throw Error(ErrorCode::InsufficientSamples, "mean of an empty series");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, "pearson_r series lengths differ");
  }
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorCode::InsufficientSamples, "pearson_r needs at least 2 values");

  const auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
  };
  if (constant(x) || constant(y)) {
    throw Error(ErrorCode::ConstantSeries, "correlation with a zero-variance series");
  }

  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::ConstantSeries, "correlation with a zero-variance series");
  }
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, "spearman_rho series lengths differ");
  }
  if (x.size() < 3) {
    throw Error(ErrorCode::InsufficientSamples, "spearman_rho needs at least 3 values");
  }
  const auto rx = rank_transform(x);
  const auto ry = rank_transform(y);
  return pearson_r(rx, ry);
}

double spearman_pvalue(double rho, std::size_t n) {
  if (n < 4) throw Error(ErrorCode::InsufficientSamples, "spearman_pvalue needs n >= 4");
  if (!(std::abs(rho) <= 1.0)) {
    throw Error(ErrorCode::InvalidInput, "rank correlation outside [-1, 1]");
  }
  if (std::abs(rho) == 1.0) return 0.0;
  const double dof = static_cast<double>(n - 2);
  const double t = rho * std::sqrt(dof / (1.0 - rho * rho));
  const boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

PairedT paired_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "paired_t series lengths differ");
  const std::size_t n = a.size();
  if (n < 2) throw Error(ErrorCode::InsufficientSamples, "paired_t needs at least 2 pairs");

  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
  if (std::all_of(diff.begin(), diff.end(), [&](double d) { return d == diff.front(); })) {
    throw Error(ErrorCode::ZeroVariance, "all paired differences are equal");
  }
  const double m = mean(diff);
  const double sd = sample_sd(diff);
  return PairedT{m / (sd / std::sqrt(static_cast<double>(n))), n - 1};
}

}  // namespace stats
}  // namespace semprune
