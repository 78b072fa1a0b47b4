#pragma once

// Local-trend removal on log prices.
//
// Window layout (1-based t, scale s): window k = 1, 2, ... spans
// [1 + s(k-1), s(k+1)], i.e. 2s points advancing by stride s, so
// neighbouring windows share s points. A straight line a_k + b_k t is
// least-squares fit in each window and x*(t) = x(t) - (a_k + b_k t).
// Window k emits the s increments x*(t+s) - x*(t) for t in
// [1 + s(k-1), sk], both endpoints taken from window k's own residuals.
// Consecutive windows therefore tile the time axis without overlap in t.
//
// In code, rows are 0-based: window k (0-based) starts at row k*s.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nongauss/error.hpp"

namespace nongauss {

struct DetrendConfig {
  std::size_t scale_s = 4;
  /// Drop the trailing segment shorter than 2s. When false, a shorter
  /// final window (s < length < 2s) is fit and flagged as partial.
  bool drop_partial_tail = true;
};

struct WindowFit {
  std::size_t first_row = 0;  ///< 0-based row of the window's first point
  double intercept = 0.0;     ///< a_k, against 1-based t
  double slope = 0.0;         ///< b_k, per trading day
  std::vector<double> residuals;
  bool partial = false;
};

/// Detrended increments with their window provenance.
struct IncrementSet {
  std::vector<double> values;
  std::size_t scale_s = 1;
  std::size_t window_count = 0;
  std::vector<std::size_t> rows;     ///< 0-based row of each increment's start
  std::vector<std::size_t> windows;  ///< 0-based window of each increment
  bool has_partial_window = false;

  /// Wraps raw samples (e.g. surrogate draws) as a single-window set.
  [[nodiscard]] static IncrementSet from_samples(std::vector<double> samples) {
    IncrementSet set;
    set.rows.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) set.rows[i] = i;
    set.windows.assign(samples.size(), 0);
    set.scale_s = samples.size();
    set.window_count = 1;
    set.values = std::move(samples);
    return set;
  }
};

namespace detail {

inline WindowFit fit_window(std::span<const double> x, std::size_t first_row, bool partial) {
  const auto n = static_cast<double>(x.size());
  // 1-based t of the first point is first_row + 1.
  const double t0 = static_cast<double>(first_row) + 1.0;
  const double t_mean = t0 + (n - 1.0) / 2.0;
  double x_mean = 0.0;
  for (double v : x) x_mean += v;
  x_mean /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dt = t0 + static_cast<double>(i) - t_mean;
    sxy += dt * (x[i] - x_mean);
    sxx += dt * dt;
  }
  WindowFit fit;
  fit.first_row = first_row;
  fit.partial = partial;
  fit.slope = sxy / sxx;
  fit.intercept = x_mean - fit.slope * t_mean;
  fit.residuals.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dt = t0 + static_cast<double>(i) - t_mean;
    fit.residuals[i] = (x[i] - x_mean) - fit.slope * dt;
  }
  return fit;
}

inline void check_detrend_input(std::size_t length, const DetrendConfig& cfg) {
  if (cfg.scale_s < 1) throw InputError("detrending scale must be >= 1");
  if (length < 2 * cfg.scale_s) {
    throw InputError("series of length " + std::to_string(length) +
                     " is shorter than one detrending window (2s = " +
                     std::to_string(2 * cfg.scale_s) + ")");
  }
}

}  // namespace detail

[[nodiscard]] inline std::size_t full_window_count(std::size_t length, std::size_t s) {
  return length < 2 * s ? 0 : length / s - 1;
}

[[nodiscard]] inline std::vector<WindowFit> piecewise_linear_residuals(std::span<const double> x,
                                                                       const DetrendConfig& cfg) {
  detail::check_detrend_input(x.size(), cfg);
  const std::size_t s = cfg.scale_s;
  const std::size_t windows = full_window_count(x.size(), s);
  std::vector<WindowFit> fits;
  fits.reserve(windows + 1);
  for (std::size_t k = 0; k < windows; ++k) {
    fits.push_back(detail::fit_window(x.subspan(k * s, 2 * s), k * s, false));
  }
  const std::size_t tail_start = windows * s;
  const std::size_t tail_len = x.size() - tail_start;
  if (!cfg.drop_partial_tail && tail_len > s) {
    fits.push_back(detail::fit_window(x.subspan(tail_start), tail_start, true));
  }
  return fits;
}

[[nodiscard]] inline IncrementSet detrended_increments(std::span<const double> x,
                                                       const DetrendConfig& cfg) {
  const auto fits = piecewise_linear_residuals(x, cfg);
  const std::size_t s = cfg.scale_s;
  IncrementSet out;
  out.scale_s = s;
  out.window_count = fits.size();
  out.values.reserve(fits.size() * s);
  for (std::size_t k = 0; k < fits.size(); ++k) {
    const auto& fit = fits[k];
    const std::size_t count = fit.residuals.size() - s;  // s for full windows
    for (std::size_t i = 0; i < count; ++i) {
      out.values.push_back(fit.residuals[i + s] - fit.residuals[i]);
      out.rows.push_back(fit.first_row + i);
      out.windows.push_back(k);
    }
    out.has_partial_window = out.has_partial_window || fit.partial;
  }
  return out;
}

}  // namespace nongauss
