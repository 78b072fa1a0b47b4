#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace nongauss {

/// Population (1/n) central moments, two-pass.
struct CentralMoments {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;

  [[nodiscard]] double stddev() const { return std::sqrt(m2); }
  [[nodiscard]] double skewness() const { return m3 / std::pow(m2, 1.5); }
  /// Pearson (non-excess) kurtosis; 3 for a Gaussian.
  [[nodiscard]] double kurtosis() const { return m4 / (m2 * m2); }
};

[[nodiscard]] inline CentralMoments central_moments(std::span<const double> x) {
  CentralMoments m;
  m.n = x.size();
  if (x.empty()) return m;
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(x.size());
  for (double v : x) {
    const double d = v - m.mean;
    const double d2 = d * d;
    m.m2 += d2;
    m.m3 += d2 * d;
    m.m4 += d2 * d2;
  }
  const auto n = static_cast<double>(x.size());
  m.m2 /= n;
  m.m3 /= n;
  m.m4 /= n;
  return m;
}

}  // namespace nongauss
