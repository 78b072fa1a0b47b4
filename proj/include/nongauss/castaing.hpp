#pragma once

// Castaing log-normal variance mixture and lambda^2 estimators.
//
// Increments are modelled as zeta * exp(omega) with independent
// zeta ~ N(0, sigma0^2) and omega ~ N(0, lambda2), giving the density
//
//   P(x) = int N(x; 0, sigma0^2 e^{2 w}) N(w; 0, lambda2) dw
//
// evaluated by Gauss-Hermite quadrature in w. The moments follow in closed
// form: Var = sigma0^2 e^{2 lambda2} and Pearson kurtosis K = 3 e^{4 lambda2}.

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nongauss/detrend.hpp"
#include "nongauss/error.hpp"
#include "nongauss/moments.hpp"
#include "nongauss/quadrature.hpp"

namespace nongauss {

inline constexpr int kDefaultQuadOrder = 40;
inline constexpr int kMinQuadOrder = 8;
inline constexpr int kDefaultBins = 61;
inline constexpr std::size_t kMinPdfFitSamples = 500;
/// Histogram bins with fewer counts are left out of the PDF fit.
inline constexpr std::size_t kMinBinCount = 5;
/// Histogram half-width in sample standard deviations.
inline constexpr double kHistogramHalfWidth = 6.0;

struct CastaingParams {
  double lambda2 = 0.0;
  double sigma0 = 1.0;

  [[nodiscard]] double variance() const { return sigma0 * sigma0 * std::exp(2.0 * lambda2); }
  [[nodiscard]] double kurtosis() const { return 3.0 * std::exp(4.0 * lambda2); }
};

enum class FitMethod { pdf, kurtosis };

[[nodiscard]] inline std::string to_string(FitMethod m) {
  return m == FitMethod::pdf ? "pdf-fit" : "kurtosis-moment";
}

struct CastaingFit {
  CastaingParams params;
  FitMethod method = FitMethod::pdf;
  /// Count-weighted RMS log-density misfit; NaN for the moment estimator.
  double residual = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_samples = 0;
  int quad_order = kDefaultQuadOrder;
  /// Sample kurtosis <= 3: lambda2 is reported as 0 and flagged.
  bool sub_gaussian = false;
};

struct FitOptions {
  FitMethod method = FitMethod::pdf;
  int bins = kDefaultBins;
  int quad_order = kDefaultQuadOrder;
};

namespace detail {

inline void check_params(const CastaingParams& p, int quad_order) {
  if (quad_order < kMinQuadOrder) {
    throw InputError("quadrature order " + std::to_string(quad_order) + " is below the minimum " +
                     std::to_string(kMinQuadOrder));
  }
  if (!(p.lambda2 >= 0.0) || !std::isfinite(p.lambda2)) {
    throw InputError("lambda2 must be finite and nonnegative");
  }
  if (!(p.sigma0 > 0.0) || !std::isfinite(p.sigma0)) {
    throw InputError("sigma0 must be finite and positive");
  }
}

inline double normal_density(double x, double sigma) {
  const double z = x / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

// P(a < Z < b) for a standard normal Z, accurate in both tails.
inline double standard_normal_interval(double a, double b) {
  constexpr double r = std::numbers::sqrt2;
  if (a >= 0.0) return 0.5 * (std::erfc(a / r) - std::erfc(b / r));
  if (b <= 0.0) return 0.5 * (std::erfc(-b / r) - std::erfc(-a / r));
  return 1.0 - 0.5 * std::erfc(-a / r) - 0.5 * std::erfc(b / r);
}

// Calls f(sigma_i, weight_i) for the quadrature nodes of the mixture.
template <typename F>
void for_each_component(const CastaingParams& p, int quad_order, F&& f) {
  const auto rule = gauss_hermite(quad_order);
  const double spread = std::sqrt(2.0 * p.lambda2);
  const double norm = 1.0 / std::sqrt(std::numbers::pi);
  for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
    f(p.sigma0 * std::exp(spread * rule->nodes[i]), rule->weights[i] * norm);
  }
}

}  // namespace detail

/// Castaing mixture density at x. lambda2 == 0 gives exactly the Gaussian
/// density with standard deviation sigma0.
[[nodiscard]] inline double castaing_pdf(double x, const CastaingParams& p,
                                         int quad_order = kDefaultQuadOrder) {
  detail::check_params(p, quad_order);
  if (p.lambda2 == 0.0) return detail::normal_density(x, p.sigma0);
  const double ax = std::fabs(x);
  double sum = 0.0;
  detail::for_each_component(p, quad_order, [&](double sigma, double w) {
    sum += w * detail::normal_density(ax, sigma);
  });
  return sum;
}

/// Mixture probability of the interval (lo, hi).
[[nodiscard]] inline double castaing_probability(double lo, double hi, const CastaingParams& p,
                                                 int quad_order = kDefaultQuadOrder) {
  detail::check_params(p, quad_order);
  if (!(lo < hi)) return 0.0;
  if (p.lambda2 == 0.0) return detail::standard_normal_interval(lo / p.sigma0, hi / p.sigma0);
  double sum = 0.0;
  detail::for_each_component(p, quad_order, [&](double sigma, double w) {
    sum += w * detail::standard_normal_interval(lo / sigma, hi / sigma);
  });
  return sum;
}

/// lambda2 = ln(K / 3) / 4 from Pearson kurtosis K. Returns nullopt when
/// K <= 3 (sub-Gaussian sample; no nonnegative lambda2 matches).
[[nodiscard]] inline std::optional<double> lambda2_from_kurtosis(double kurtosis) {
  if (!std::isfinite(kurtosis) || kurtosis <= 0.0) {
    throw InputError("kurtosis must be finite and positive");
  }
  if (kurtosis <= 3.0) return std::nullopt;
  return std::log(kurtosis / 3.0) / 4.0;
}

namespace detail {

inline CentralMoments checked_moments(std::span<const double> samples, std::size_t min_n) {
  if (samples.size() < min_n) {
    throw InputError("lambda2 fit needs at least " + std::to_string(min_n) + " samples, got " +
                     std::to_string(samples.size()));
  }
  const auto m = central_moments(samples);
  if (!(m.m2 > 0.0)) throw InputError("samples have zero variance");
  return m;
}

}  // namespace detail

/// Moment estimator: lambda2 from the sample's Pearson kurtosis.
[[nodiscard]] inline CastaingFit fit_lambda2_kurtosis(std::span<const double> samples) {
  const auto m = detail::checked_moments(samples, 4);
  const auto lambda2 = lambda2_from_kurtosis(m.kurtosis());
  CastaingFit fit;
  fit.method = FitMethod::kurtosis;
  fit.n_samples = samples.size();
  fit.sub_gaussian = !lambda2.has_value();
  fit.params.lambda2 = lambda2.value_or(0.0);
  fit.params.sigma0 = m.stddev() * std::exp(-fit.params.lambda2);
  return fit;
}

/// Histogram fit of the standardized sample. With the model variance
/// pinned to 1 (sigma0 = e^{-lambda2}), lambda2 minimizes
///
///   sum_j c_j (ln rho_j - ln P_j)^2
///
/// over bins j with c_j >= 5 counts inside +-6 standard deviations, where
/// rho_j = c_j / (n h) is the empirical density and P_j the model's mean
/// density over the bin. sigma0 is reported in the sample's units.
[[nodiscard]] inline CastaingFit fit_lambda2_pdf(std::span<const double> samples,
                                                 int bins = kDefaultBins,
                                                 int quad_order = kDefaultQuadOrder) {
  if (bins < 3) throw InputError("PDF fit needs at least 3 bins");
  detail::check_params({}, quad_order);
  const auto m = detail::checked_moments(samples, kMinPdfFitSamples);
  const double sd = m.stddev();
  const double n = static_cast<double>(samples.size());

  const double width = 2.0 * kHistogramHalfWidth / bins;
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  for (double v : samples) {
    const double z = (v - m.mean) / sd;
    const double pos = (z + kHistogramHalfWidth) / width;
    if (pos >= 0.0 && pos < bins) ++counts[static_cast<std::size_t>(pos)];
  }
  struct Bin {
    double lo, hi, weight, log_density;
  };
  std::vector<Bin> used;
  double total_weight = 0.0;
  for (int j = 0; j < bins; ++j) {
    const auto c = counts[static_cast<std::size_t>(j)];
    if (c < kMinBinCount) continue;
    const double lo = -kHistogramHalfWidth + j * width;
    used.push_back({lo, lo + width, static_cast<double>(c),
                    std::log(static_cast<double>(c) / (n * width))});
    total_weight += static_cast<double>(c);
  }
  if (used.size() < 3) throw AnalysisError("fewer than 3 histogram bins have enough counts");

  auto objective = [&](double lambda2) {
    const CastaingParams p{lambda2, std::exp(-lambda2)};
    double sse = 0.0;
    for (const auto& b : used) {
      const double model = castaing_probability(b.lo, b.hi, p, quad_order) / width;
      const double diff = b.log_density - std::log(std::max(model, 1e-300));
      sse += b.weight * diff * diff;
    }
    return sse;
  };

  const auto moment_guess = lambda2_from_kurtosis(m.kurtosis()).value_or(0.0);
  const double upper = std::max(1.0, 2.0 * moment_guess + 0.5);
  const auto [best, best_sse] = boost::math::tools::brent_find_minima(objective, 0.0, upper, 26);
  if (best > upper * (1.0 - 1e-3)) {
    throw FitError("PDF fit did not bracket a minimum below lambda2 = " + std::to_string(upper),
                   moment_guess);
  }

  CastaingFit fit;
  fit.method = FitMethod::pdf;
  fit.n_samples = samples.size();
  fit.quad_order = quad_order;
  fit.params.lambda2 = best;
  fit.params.sigma0 = sd * std::exp(-best);
  fit.residual = std::sqrt(best_sse / total_weight);
  return fit;
}

[[nodiscard]] inline CastaingFit fit_lambda2_pdf(const IncrementSet& increments,
                                                 int bins = kDefaultBins,
                                                 int quad_order = kDefaultQuadOrder) {
  return fit_lambda2_pdf(std::span<const double>(increments.values), bins, quad_order);
}

[[nodiscard]] inline CastaingFit fit_lambda2(std::span<const double> samples,
                                             const FitOptions& opt) {
  return opt.method == FitMethod::pdf ? fit_lambda2_pdf(samples, opt.bins, opt.quad_order)
                                      : fit_lambda2_kurtosis(samples);
}

}  // namespace nongauss
