#pragma once

// lambda^2 and sigma across scales, crossover detection, and lambda^2 in
// sliding time windows.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nongauss/castaing.hpp"
#include "nongauss/detrend.hpp"
#include "nongauss/error.hpp"
#include "nongauss/moments.hpp"
#include "nongauss/parallel.hpp"
#include "nongauss/series.hpp"

namespace nongauss {

enum class EstimateFlag { ok, sub_gaussian, failed };

[[nodiscard]] inline std::string to_string(EstimateFlag f) {
  switch (f) {
    case EstimateFlag::ok: return "ok";
    case EstimateFlag::sub_gaussian: return "sub_gaussian";
    case EstimateFlag::failed: return "failed";
  }
  return "unknown";
}

/// One detrend-and-fit result. lambda2 is 0 for sub-Gaussian samples and
/// NaN for failures; note carries the failure reason.
struct Lambda2Estimate {
  double lambda2 = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  EstimateFlag flag = EstimateFlag::failed;
  std::string note;
};

/// Detrends log prices at scale s and fits lambda2; errors become a
/// failed estimate instead of propagating.
[[nodiscard]] inline Lambda2Estimate estimate_lambda2(std::span<const double> log_price,
                                                      std::size_t s, const FitOptions& opt) {
  Lambda2Estimate est;
  try {
    const auto inc = detrended_increments(log_price, {s, true});
    const auto fit = fit_lambda2(inc.values, opt);
    est.lambda2 = fit.params.lambda2;
    est.residual = fit.residual;
    est.flag = fit.sub_gaussian ? EstimateFlag::sub_gaussian : EstimateFlag::ok;
  } catch (const FitError& e) {
    est.note = std::string(e.what()) + " (kurtosis fallback " +
               std::to_string(e.fallback_lambda2()) + ")";
  } catch (const std::exception& e) {
    est.note = e.what();
  }
  return est;
}

struct ScaleScan {
  std::vector<std::size_t> scales;
  std::vector<double> lambda2s;
  std::vector<double> sigmas;  ///< std of raw s-day log returns
  std::vector<double> fit_residuals;
  std::vector<EstimateFlag> flags;
  std::vector<std::string> notes;
};

inline const std::vector<std::size_t> kDefaultScanScales{1, 2, 3, 4, 6, 8, 10, 12, 16, 20};

/// For each scale: detrended-increment lambda2 and raw-return sigma(s).
/// Per-scale failures are flagged in place. threads > 1 evaluates scales
/// concurrently with identical results.
[[nodiscard]] inline ScaleScan scan_scales(const PriceSeries& p,
                                           std::span<const std::size_t> scales,
                                           const FitOptions& opt, unsigned threads = 1) {
  if (scales.empty()) throw InputError("scale list is empty");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] == 0) throw InputError("scales must be positive");
    if (i > 0 && scales[i] <= scales[i - 1]) throw InputError("scales must be strictly increasing");
  }
  if (scales.back() > p.size() / 4) {
    throw InputError("largest scale " + std::to_string(scales.back()) +
                     " exceeds a quarter of the series length (" + std::to_string(p.size()) + ")");
  }
  const auto x = log_prices(p);
  const std::size_t n = scales.size();
  ScaleScan scan;
  scan.scales.assign(scales.begin(), scales.end());
  scan.lambda2s.resize(n);
  scan.sigmas.resize(n);
  scan.fit_residuals.resize(n);
  scan.flags.resize(n);
  scan.notes.resize(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto est = estimate_lambda2(x, scales[i], opt);
    scan.lambda2s[i] = est.lambda2;
    scan.fit_residuals[i] = est.residual;
    scan.flags[i] = est.flag;
    scan.notes[i] = est.note;
    scan.sigmas[i] = central_moments(log_returns(p, scales[i]).values).stddev();
  });
  return scan;
}

struct CrossoverFit {
  double breakpoint_scale = 0.0;
  double left_slope = 0.0;   ///< d value / d ln s below the break
  double right_slope = 0.0;  ///< d value / d ln s above the break
  double sse = 0.0;
  double single_line_sse = 0.0;
  /// Two segments improve on one line by less than 5% of its SSE.
  bool weak = false;
};

namespace detail {

// Least squares for y ~ a + b u + c max(0, u - ub); returns SSE and (b, b + c).
struct HingeFit {
  double sse;
  double left, right;
};

inline HingeFit fit_hinge(std::span<const double> u, std::span<const double> y, double ub) {
  // Normal equations, 3x3, solved by Gaussian elimination with pivoting.
  double a[3][4] = {};
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double row[3] = {1.0, u[i], std::max(0.0, u[i] - ub)};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) a[r][c] += row[r] * row[c];
      a[r][3] += row[r] * y[i];
    }
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
    }
  }
  const double coef[3] = {a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]};
  double sse = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = y[i] - (coef[0] + coef[1] * u[i] + coef[2] * std::max(0.0, u[i] - ub));
    sse += r * r;
  }
  return {sse, coef[1], coef[1] + coef[2]};
}

inline double line_sse(std::span<const double> u, std::span<const double> y) {
  const auto n = static_cast<double>(u.size());
  double um = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    um += u[i];
    ym += y[i];
  }
  um /= n;
  ym /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    sxy += (u[i] - um) * (y[i] - ym);
    sxx += (u[i] - um) * (u[i] - um);
  }
  const double b = sxy / sxx;
  double sse = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = y[i] - ym - b * (u[i] - um);
    sse += r * r;
  }
  return sse;
}

}  // namespace detail

/// Continuous two-segment least squares of values against ln(scale). The
/// breakpoint is searched over interior scales. Non-finite values are
/// skipped.
[[nodiscard]] inline CrossoverFit fit_crossover(std::span<const std::size_t> scales,
                                                std::span<const double> values) {
  if (scales.size() != values.size()) throw InputError("scales and values differ in length");
  std::vector<double> u, y;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (std::isfinite(values[i])) {
      u.push_back(std::log(static_cast<double>(scales[i])));
      y.push_back(values[i]);
    }
  }
  if (u.size() < 5) {
    throw InputError("crossover fit needs at least 5 valid points, got " +
                     std::to_string(u.size()));
  }
  CrossoverFit best;
  best.sse = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    const auto h = detail::fit_hinge(u, y, u[i]);
    if (h.sse < best.sse) {
      best.sse = h.sse;
      best.breakpoint_scale = std::exp(u[i]);
      best.left_slope = h.left;
      best.right_slope = h.right;
    }
  }
  best.breakpoint_scale = std::round(best.breakpoint_scale);
  best.single_line_sse = detail::line_sse(u, y);
  best.sse = std::min(best.sse, best.single_line_sse);
  best.weak = !(best.single_line_sse - best.sse >= 0.05 * best.single_line_sse) ||
              best.single_line_sse == 0.0;
  return best;
}

enum class CrossoverTarget { lambda2, sigma };

[[nodiscard]] inline CrossoverFit fit_crossover(const ScaleScan& scan,
                                                CrossoverTarget target = CrossoverTarget::lambda2) {
  if (target == CrossoverTarget::sigma) return fit_crossover(scan.scales, scan.sigmas);
  std::vector<double> values(scan.lambda2s);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (scan.flags[i] == EstimateFlag::failed) values[i] = std::numeric_limits<double>::quiet_NaN();
  }
  return fit_crossover(scan.scales, values);
}

struct WindowedLambda {
  std::vector<std::size_t> centers;     ///< 0-based center rows
  std::vector<std::size_t> first_rows;  ///< first row of each window
  std::vector<std::size_t> window_points;
  std::vector<double> lambda2s;
  std::vector<EstimateFlag> flags;
  std::vector<std::string> notes;
  std::size_t window_len = 150;
  std::size_t scale_s = 4;
};

/// lambda2 in sliding windows of window_len rows. The window for center c
/// is rows [c - window_len/2, c - window_len/2 + window_len); centers run
/// from window_len/2 in steps of `step`, and windows that would leave the
/// series are omitted.
[[nodiscard]] inline WindowedLambda sliding_lambda2(const PriceSeries& p, std::size_t scale_s,
                                                    std::size_t window_len, std::size_t step,
                                                    const FitOptions& opt, unsigned threads = 1) {
  if (scale_s == 0 || step == 0) throw InputError("scale and step must be positive");
  if (window_len < 4 * scale_s) {
    throw InputError("window of " + std::to_string(window_len) +
                     " rows is too short for detrending at scale " + std::to_string(scale_s) +
                     " (need >= 4s)");
  }
  if (window_len > p.size()) {
    throw InputError("window of " + std::to_string(window_len) + " rows exceeds series length " +
                     std::to_string(p.size()));
  }
  const auto x = log_prices(p);
  const std::size_t half = window_len / 2;
  WindowedLambda out;
  out.window_len = window_len;
  out.scale_s = scale_s;
  for (std::size_t c = half; c - half + window_len <= p.size(); c += step) {
    out.centers.push_back(c);
    out.first_rows.push_back(c - half);
    out.window_points.push_back(window_len);
  }
  const std::size_t n = out.centers.size();
  out.lambda2s.resize(n);
  out.flags.resize(n);
  out.notes.resize(n);
  const std::span<const double> xs(x);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto est = estimate_lambda2(xs.subspan(out.first_rows[i], window_len), scale_s, opt);
    out.lambda2s[i] = est.lambda2;
    out.flags[i] = est.flag;
    out.notes[i] = est.note;
  });
  return out;
}

/// Autocovariance <(r(t+tau) - rbar)(r(t) - rbar)> for tau = 0..max_tau.
[[nodiscard]] inline std::vector<double> lag_covariance(const ReturnsSeries& r,
                                                        std::size_t max_tau) {
  if (max_tau >= r.values.size()) throw InputError("lag exceeds returns length");
  const double mean = central_moments(r.values).mean;
  std::vector<double> out(max_tau + 1);
  for (std::size_t tau = 0; tau <= max_tau; ++tau) {
    double acc = 0.0;
    const std::size_t count = r.values.size() - tau;
    for (std::size_t t = 0; t < count; ++t) {
      acc += (r.values[t + tau] - mean) * (r.values[t] - mean);
    }
    out[tau] = acc / static_cast<double>(count);
  }
  return out;
}

}  // namespace nongauss
