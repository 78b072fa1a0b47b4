#include <gtest/gtest.h>

#include <cmath>

#include "nongauss/detrend.hpp"
#include "nongauss/random.hpp"

using namespace nongauss;

namespace {

std::vector<double> gaussian_path(std::uint64_t seed, std::size_t n) {
  const rng::NormalStream z(seed, 0);
  std::vector<double> x(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) x[i] = (acc += z(i));
  return x;
}

// Least squares through the 2x2 normal equations in raw (uncentered) form,
// as an independent check on the library's centered fit.
std::pair<double, double> normal_equations_fit(const std::vector<double>& t,
                                               const std::vector<double>& y) {
  double s1 = 0, st = 0, stt = 0, sy = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    s1 += 1;
    st += t[i];
    stt += t[i] * t[i];
    sy += y[i];
    sty += t[i] * y[i];
  }
  const double det = s1 * stt - st * st;
  return {(stt * sy - st * sty) / det, (s1 * sty - st * sy) / det};
}

}  // namespace

TEST(Detrend, QuadraticHandExample) {
  const std::vector<double> x{1, 4, 9, 16};
  const auto fits = piecewise_linear_residuals(x, {2, true});
  ASSERT_EQ(fits.size(), 1u);
  const auto [a, b] = normal_equations_fit({1, 2, 3, 4}, x);
  EXPECT_NEAR(a, -5.0, 1e-12);
  EXPECT_NEAR(b, 5.0, 1e-12);
  EXPECT_NEAR(fits[0].intercept, -5.0, 1e-12);
  EXPECT_NEAR(fits[0].slope, 5.0, 1e-12);
  const double expected[] = {1, -1, -1, 1};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(fits[0].residuals[i], expected[i], 1e-10);

  const auto inc = detrended_increments(x, {2, true});
  ASSERT_EQ(inc.values.size(), 2u);
  EXPECT_NEAR(inc.values[0], -2.0, 1e-10);
  EXPECT_NEAR(inc.values[1], 2.0, 1e-10);
  EXPECT_EQ(inc.rows[0], 0u);
  EXPECT_EQ(inc.rows[1], 1u);
}

TEST(Detrend, WindowLayout) {
  const std::vector<double> x{0.3, 1.2, -0.4, 2.2, 0.9, 1.7, 3.3};
  const auto fits = piecewise_linear_residuals(x, {2, true});
  ASSERT_EQ(fits.size(), 2u);
  EXPECT_EQ(fits[0].first_row, 0u);
  EXPECT_EQ(fits[1].first_row, 2u);
  EXPECT_EQ(fits[0].residuals.size(), 4u);
  EXPECT_EQ(full_window_count(7, 2), 2u);

  const auto kept = piecewise_linear_residuals(x, {2, false});
  ASSERT_EQ(kept.size(), 3u);
  EXPECT_TRUE(kept[2].partial);
  EXPECT_EQ(kept[2].residuals.size(), 3u);
  const auto inc = detrended_increments(x, {2, false});
  EXPECT_TRUE(inc.has_partial_window);
  EXPECT_EQ(inc.values.size(), 5u);

  EXPECT_THROW(piecewise_linear_residuals(x, {4, true}), InputError);
  EXPECT_THROW(piecewise_linear_residuals(x, {0, true}), InputError);
}

TEST(Detrend, MatchesNormalEquationsPerWindow) {
  const auto x = gaussian_path(3, 200);
  const std::size_t s = 7;
  const auto fits = piecewise_linear_residuals(x, {s, true});
  for (const auto& fit : fits) {
    std::vector<double> t, y;
    for (std::size_t i = 0; i < 2 * s; ++i) {
      t.push_back(static_cast<double>(fit.first_row + i + 1));
      y.push_back(x[fit.first_row + i]);
    }
    const auto [a, b] = normal_equations_fit(t, y);
    EXPECT_NEAR(fit.intercept, a, 1e-8 * std::max(1.0, std::fabs(a)));
    EXPECT_NEAR(fit.slope, b, 1e-9);
    double sum = 0.0, tsum = 0.0;
    for (std::size_t i = 0; i < 2 * s; ++i) {
      sum += fit.residuals[i];
      tsum += t[i] * fit.residuals[i];
    }
    EXPECT_LE(std::fabs(sum), 1e-9);
    EXPECT_LE(std::fabs(tsum), 1e-9);
  }
}

TEST(Detrend, LinearAndExponentialTrendsVanish) {
  for (std::size_t s : {1u, 2u, 3u, 4u, 10u}) {
    std::vector<double> lin, expo;
    for (int t = 1; t <= 503; ++t) {
      lin.push_back(3.0 + 0.5 * t);
      expo.push_back(std::log(250.0 * std::exp(0.0007 * t)));
    }
    for (const auto* x : {&lin, &expo}) {
      const auto inc = detrended_increments(*x, {s, true});
      EXPECT_EQ(inc.values.size(), inc.window_count * s);
      for (double v : inc.values) EXPECT_LE(std::fabs(v), 1e-10);
    }
    for (const auto& fit : piecewise_linear_residuals(lin, {s, true})) {
      for (double r : fit.residuals) EXPECT_LE(std::fabs(r), 1e-12 * 300);
    }
  }
}

TEST(Detrend, AffineInvariance) {
  const auto x = gaussian_path(11, 1000);
  for (std::size_t s : {2u, 4u, 10u}) {
    auto y = x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += -4.2 + 0.013 * static_cast<double>(i);
    const auto a = detrended_increments(x, {s, true});
    const auto b = detrended_increments(y, {s, true});
    ASSERT_EQ(a.values.size(), b.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-10);
  }
}

TEST(Detrend, IidInputHasZeroMeanIncrements) {
  const rng::NormalStream z(2024, 0);
  std::vector<double> x(10000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = z(i);
  const auto inc = detrended_increments(x, {4, true});
  double mean = 0.0;
  for (double v : inc.values) mean += v;
  mean /= static_cast<double>(inc.values.size());
  EXPECT_LE(std::fabs(mean), 0.02);
  EXPECT_EQ(inc.window_count, 10000u / 4 - 1);
  EXPECT_EQ(inc.values.size(), inc.window_count * 4);
}

TEST(Detrend, FromSamples) {
  const auto set = IncrementSet::from_samples({1.0, 2.0, 3.0});
  EXPECT_EQ(set.window_count, 1u);
  EXPECT_EQ(set.values.size(), 3u);
}
