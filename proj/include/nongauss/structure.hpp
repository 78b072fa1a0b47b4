#pragma once

// Absolute-moment structure functions of detrended increments and their
// scaling exponents.
//
//   m(q, l) = mean over valid t of |D(t + l) - D(t)|^q,   m(q, l) ~ K_q l^{xi_q}
//
// A pair (t, t + l) is valid when both increments come from the same
// detrending window, so they share one local trend line and the line
// cancels exactly in the difference. Lags must therefore be below the
// detrending scale s.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nongauss/detrend.hpp"
#include "nongauss/error.hpp"

namespace nongauss {

inline constexpr double kMaxMomentOrder = 6.0;
inline constexpr double kDefaultFractalityThreshold = 0.1;

struct StructureFunctionScan {
  std::vector<double> q_values;
  std::vector<std::size_t> lags;
  std::vector<std::size_t> pair_counts;     ///< per lag
  std::vector<std::vector<double>> moments; ///< [q][lag]
  std::vector<std::vector<bool>> included;  ///< cell entered the xi fit
  std::vector<double> xi;
  std::vector<double> xi_stderr;
  double hurst_H = std::numeric_limits<double>::quiet_NaN();
  double nonlinearity = std::numeric_limits<double>::quiet_NaN();
};

struct StructureOptions {
  std::size_t min_fit_lag = 2;
  /// Largest lag entering the fit, as a fraction of the increment count.
  double max_fit_lag_fraction = 0.1;
};

/// Same-window differences D(t + l) - D(t).
[[nodiscard]] inline std::vector<double> lag_differences(const IncrementSet& incr,
                                                         std::size_t lag) {
  std::vector<double> out;
  const auto& v = incr.values;
  if (lag == 0 || lag >= v.size()) return out;
  out.reserve(v.size());
  for (std::size_t i = 0; i + lag < v.size(); ++i) {
    if (incr.windows[i] == incr.windows[i + lag]) out.push_back(v[i + lag] - v[i]);
  }
  return out;
}

/// Fills xi, xi_stderr, hurst_H and nonlinearity from the moment matrix,
/// using only cells marked included.
inline void fit_scaling(StructureFunctionScan& scan) {
  const std::size_t nq = scan.q_values.size(), nl = scan.lags.size();
  const auto& q_values = scan.q_values;
  const auto& lags = scan.lags;
  scan.xi.assign(nq, std::numeric_limits<double>::quiet_NaN());
  scan.xi_stderr.assign(nq, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < nq; ++i) {
    std::vector<double> u, y;
    for (std::size_t j = 0; j < nl; ++j) {
      if (!scan.included[i][j]) continue;
      u.push_back(std::log(static_cast<double>(lags[j])));
      y.push_back(std::log(scan.moments[i][j]));
    }
    if (u.size() < 2) continue;
    const auto k = static_cast<double>(u.size());
    double um = 0.0, ym = 0.0;
    for (std::size_t t = 0; t < u.size(); ++t) {
      um += u[t];
      ym += y[t];
    }
    um /= k;
    ym /= k;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t t = 0; t < u.size(); ++t) {
      sxx += (u[t] - um) * (u[t] - um);
      sxy += (u[t] - um) * (y[t] - ym);
    }
    const double slope = sxy / sxx;
    double ssr = 0.0;
    for (std::size_t t = 0; t < u.size(); ++t) {
      const double r = y[t] - ym - slope * (u[t] - um);
      ssr += r * r;
    }
    scan.xi[i] = slope;
    scan.xi_stderr[i] = u.size() > 2 ? std::sqrt(ssr / (k - 2.0) / sxx) : 0.0;
  }

  // xi_q = q H through the origin, inverse-variance weighted when every
  // standard error is positive.
  bool weighted = true;
  for (std::size_t i = 0; i < nq; ++i) {
    if (std::isfinite(scan.xi[i]) && !(scan.xi_stderr[i] > 0.0)) weighted = false;
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < nq; ++i) {
    if (!std::isfinite(scan.xi[i])) continue;
    const double w = weighted ? 1.0 / (scan.xi_stderr[i] * scan.xi_stderr[i]) : 1.0;
    num += w * q_values[i] * scan.xi[i];
    den += w * q_values[i] * q_values[i];
  }
  if (den == 0.0) throw AnalysisError("no moment order has enough lags in the fit range");
  scan.hurst_H = num / den;
  double worst = 0.0;
  for (std::size_t i = 0; i < nq; ++i) {
    if (std::isfinite(scan.xi[i])) {
      worst = std::max(worst, std::fabs(scan.xi[i] - q_values[i] * scan.hurst_H));
    }
  }
  scan.nonlinearity = worst;
}

[[nodiscard]] inline StructureFunctionScan structure_functions(const IncrementSet& incr,
                                                               std::span<const double> q_values,
                                                               std::span<const std::size_t> lags,
                                                               const StructureOptions& opt = {}) {
  const std::size_t n = incr.values.size();
  if (q_values.empty() || lags.empty()) throw InputError("q values and lags must be non-empty");
  for (double q : q_values) {
    if (!(q > 0.0 && q <= kMaxMomentOrder)) {
      throw InputError("moment order q = " + std::to_string(q) + " outside (0, 6]");
    }
  }
  for (std::size_t i = 0; i < lags.size(); ++i) {
    if (lags[i] == 0) throw InputError("lags must be positive");
    if (i > 0 && lags[i] <= lags[i - 1]) throw InputError("lags must be strictly increasing");
  }
  if (4 * lags.back() >= n) {
    throw InputError("largest lag " + std::to_string(lags.back()) +
                     " must be below a quarter of the increment count " + std::to_string(n));
  }
  bool any_nonzero = false;
  for (double v : incr.values) any_nonzero = any_nonzero || v != 0.0;
  if (!any_nonzero) throw InputError("increments are identically zero");

  StructureFunctionScan scan;
  scan.q_values.assign(q_values.begin(), q_values.end());
  scan.lags.assign(lags.begin(), lags.end());
  const std::size_t nq = q_values.size(), nl = lags.size();
  scan.moments.assign(nq, std::vector<double>(nl, 0.0));
  scan.included.assign(nq, std::vector<bool>(nl, false));
  scan.pair_counts.resize(nl);

  const double max_fit_lag = opt.max_fit_lag_fraction * static_cast<double>(n);
  bool any_positive = false;
  for (std::size_t j = 0; j < nl; ++j) {
    const auto diffs = lag_differences(incr, lags[j]);
    if (diffs.empty()) {
      throw InputError("lag " + std::to_string(lags[j]) +
                       " has no same-window pairs; lags must be below the detrending scale " +
                       std::to_string(incr.scale_s));
    }
    scan.pair_counts[j] = diffs.size();
    const bool in_range = lags[j] >= opt.min_fit_lag && static_cast<double>(lags[j]) <= max_fit_lag;
    for (std::size_t i = 0; i < nq; ++i) {
      double acc = 0.0;
      for (double d : diffs) acc += std::pow(std::fabs(d), q_values[i]);
      const double m = acc / static_cast<double>(diffs.size());
      scan.moments[i][j] = m;
      any_positive = any_positive || m > 0.0;
      scan.included[i][j] = in_range && m > 0.0 && std::isfinite(m);
    }
  }
  if (!any_positive) throw InputError("increment differences are identically zero");

  fit_scaling(scan);
  return scan;
}

enum class Fractality { monofractal, multifractal };

[[nodiscard]] inline std::string to_string(Fractality f) {
  return f == Fractality::monofractal ? "monofractal" : "multifractal";
}

/// Monofractal iff nonlinearity <= threshold (boundary counts as monofractal).
[[nodiscard]] inline Fractality classify_fractality(
    const StructureFunctionScan& scan, double threshold = kDefaultFractalityThreshold) {
  return scan.nonlinearity <= threshold ? Fractality::monofractal : Fractality::multifractal;
}

/// Geometric lag ladder 2, 3, 4, 6, 8, 12, 16, ... strictly below `limit`.
[[nodiscard]] inline std::vector<std::size_t> default_lags(std::size_t limit) {
  std::vector<std::size_t> lags;
  for (std::size_t base = 2; base < limit; base *= 2) {
    lags.push_back(base);
    const std::size_t mid = base + base / 2;
    if (mid < limit) lags.push_back(mid);
  }
  return lags;
}

}  // namespace nongauss
