#include <gtest/gtest.h>

#include <cmath>

#include "nongauss/multiscale.hpp"
#include "nongauss/random.hpp"
#include "nongauss/surrogates.hpp"
#include "test_util.hpp"

using namespace nongauss;

namespace {

PriceSeries walk(std::size_t n, std::uint64_t seed, double sigma0 = 0.01) {
  SurrogateSpec s;
  s.kind = SurrogateKind::gaussian_walk;
  s.n = n;
  s.seed = seed;
  s.sigma0 = sigma0;
  return gen_gaussian_walk(s);
}

PriceSeries castaing_walk(std::size_t n, std::uint64_t seed, double lambda2, std::size_t hold = 1) {
  SurrogateSpec s;
  s.n = n;
  s.seed = seed;
  s.lambda2 = lambda2;
  s.vol_hold = hold;
  return surrogate_prices(s);
}

// Window lambda2 by a separate route: raw normal-equation line fits, then
// ln(K / 3) / 4 from the pooled increments (0 when K <= 3).
double oracle_window_lambda2(const std::vector<double>& x, std::size_t s) {
  std::vector<double> inc;
  for (std::size_t k = 0; (k + 2) * s <= x.size(); ++k) {
    double s1 = 0, st = 0, stt = 0, sy = 0, sty = 0;
    for (std::size_t i = 0; i < 2 * s; ++i) {
      const double t = static_cast<double>(k * s + i + 1), y = x[k * s + i];
      s1 += 1;
      st += t;
      stt += t * t;
      sy += y;
      sty += t * y;
    }
    const double det = s1 * stt - st * st;
    const double a = (stt * sy - st * sty) / det, b = (s1 * sty - st * sy) / det;
    auto res = [&](std::size_t i) { return x[k * s + i] - (a + b * static_cast<double>(k * s + i + 1)); };
    for (std::size_t i = 0; i < s; ++i) inc.push_back(res(i + s) - res(i));
  }
  const double k = testutil::moments(inc).kurt;
  return k > 3.0 ? std::log(k / 3.0) / 4.0 : 0.0;
}

std::vector<double> hinge(const std::vector<std::size_t>& scales, double ub, double left, double right) {
  std::vector<double> y;
  for (auto s : scales) {
    const double u = std::log(static_cast<double>(s));
    y.push_back(0.2 + left * u + (right - left) * std::max(0.0, u - ub));
  }
  return y;
}

}  // namespace

TEST(ScanScales, GaussianWalkHasSmallLambda2) {
  const auto p = walk(20000, 4);
  const std::vector<std::size_t> scales{2, 4, 8};
  const auto scan = scan_scales(p, scales, {});
  for (std::size_t i = 0; i < scales.size(); ++i) {
    EXPECT_NE(scan.flags[i], EstimateFlag::failed) << scan.notes[i];
    EXPECT_LE(scan.lambda2s[i], 0.03) << scales[i];
  }
}

TEST(ScanScales, ScaleIndependentLambda2IsRecovered) {
  // omega held over blocks of 512 days: at every s << 512 the detrended
  // increments are Castaing distributed with lambda2 = 0.3.
  const auto p = castaing_walk(512 * 2000, 1, 0.3, 512);
  const std::vector<std::size_t> scales{2, 4, 8, 16};
  const auto scan = scan_scales(p, scales, {});
  for (std::size_t i = 0; i < scales.size(); ++i) {
    EXPECT_GE(scan.lambda2s[i], 0.25) << scales[i];
    EXPECT_LE(scan.lambda2s[i], 0.35) << scales[i];
  }
}

TEST(ScanScales, SigmaScalesDiffusively) {
  const auto p = walk(100000, 8);
  const std::vector<std::size_t> scales{1, 2, 4, 8, 16};
  const auto scan = scan_scales(p, scales, {});
  EXPECT_EQ(scan.flags[0], EstimateFlag::failed);  // s = 1 windows are exact lines
  EXPECT_NEAR(scan.sigmas[2] / scan.sigmas[0], 2.0, 0.2);
  EXPECT_NEAR(scan.sigmas[4] / scan.sigmas[0], 4.0, 0.4);
}

TEST(ScanScales, PriceRescalingInvariance) {
  const auto p = castaing_walk(20000, 6, 0.3);
  std::vector<double> scaled(p.values().begin(), p.values().end());
  for (auto& v : scaled) v *= 1234.5;
  const std::vector<std::size_t> scales{2, 4, 8};
  const auto a = scan_scales(p, scales, {});
  const auto b = scan_scales(PriceSeries(scaled), scales, {});
  for (std::size_t i = 0; i < scales.size(); ++i) {
    EXPECT_NEAR(a.lambda2s[i], b.lambda2s[i], 1e-10);
    EXPECT_NEAR(a.sigmas[i], b.sigmas[i], 1e-12);
  }
}

TEST(ScanScales, ThreadsDoNotChangeResults) {
  const auto p = castaing_walk(20000, 6, 0.3);
  const auto a = scan_scales(p, kDefaultScanScales, {}, 1);
  const auto b = scan_scales(p, kDefaultScanScales, {}, 4);
  for (std::size_t i = 0; i < a.scales.size(); ++i) {
    EXPECT_EQ(std::isnan(a.lambda2s[i]), std::isnan(b.lambda2s[i]));
    if (!std::isnan(a.lambda2s[i])) {
      EXPECT_EQ(a.lambda2s[i], b.lambda2s[i]);
    }
    EXPECT_EQ(a.sigmas[i], b.sigmas[i]);
  }
}

TEST(ScanScales, Preconditions) {
  const auto p = walk(100, 1);
  const std::vector<std::size_t> too_big{2, 26};
  EXPECT_THROW((void)scan_scales(p, too_big, {}), InputError);
  const std::vector<std::size_t> unordered{4, 2};
  EXPECT_THROW((void)scan_scales(p, unordered, {}), InputError);
}

TEST(Crossover, NoiselessHingeIsExact) {
  const auto& scales = kDefaultScanScales;
  const auto y = hinge(scales, std::log(4.0), 0.15, -0.05);
  const auto fit = fit_crossover(scales, y);
  EXPECT_EQ(fit.breakpoint_scale, 4.0);
  EXPECT_LE(fit.sse, 1e-10);
  EXPECT_NEAR(fit.left_slope, 0.15, 1e-9);
  EXPECT_NEAR(fit.right_slope, -0.05, 1e-9);
  EXPECT_FALSE(fit.weak);
  EXPECT_LE(fit.sse, fit.single_line_sse);
}

TEST(Crossover, NoisyHingeWithinOneStep) {
  const auto& scales = kDefaultScanScales;
  const auto clean = hinge(scales, std::log(4.0), 0.15, -0.05);
  const rng::NormalStream noise(314, 0);
  auto y = clean;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += 0.01 * noise(i);
  const auto fit = fit_crossover(scales, y);
  EXPECT_GE(fit.breakpoint_scale, 3.0);
  EXPECT_LE(fit.breakpoint_scale, 6.0);
  EXPECT_LE(fit.sse, fit.single_line_sse);
}

TEST(Crossover, SingleSlopeIsWeak) {
  const auto& scales = kDefaultScanScales;
  std::vector<double> y;
  for (auto s : scales) y.push_back(0.4 - 0.1 * std::log(static_cast<double>(s)));
  const auto fit = fit_crossover(scales, y);
  EXPECT_TRUE(fit.weak);
  EXPECT_GT(fit.breakpoint_scale, 1.0);
  EXPECT_LT(fit.breakpoint_scale, 20.0);
}

TEST(Crossover, NeedsFiveValidPoints) {
  const std::vector<std::size_t> scales{1, 2, 4, 8, 16};
  std::vector<double> y{0.1, 0.2, NAN, 0.3, 0.2};
  EXPECT_THROW((void)fit_crossover(scales, y), InputError);
  y[2] = 0.25;
  EXPECT_NO_THROW((void)fit_crossover(scales, y));
}

TEST(Sliding, Preconditions) {
  const auto p = walk(100, 1);
  EXPECT_THROW((void)sliding_lambda2(p, 4, 150, 5, {FitMethod::kurtosis}), InputError);
  EXPECT_THROW((void)sliding_lambda2(p, 4, 15, 5, {FitMethod::kurtosis}), InputError);
}

TEST(Sliding, WindowLayout) {
  const auto p = castaing_walk(1000, 2, 0.3);
  const auto w = sliding_lambda2(p, 4, 150, 5, {FitMethod::kurtosis});
  ASSERT_FALSE(w.centers.empty());
  EXPECT_EQ(w.centers.front(), 75u);
  for (std::size_t i = 0; i < w.centers.size(); ++i) {
    EXPECT_EQ(w.window_points[i], 150u);
    EXPECT_EQ(w.first_rows[i] + 75, w.centers[i]);
    EXPECT_LE(w.first_rows[i] + 150, p.size());
    if (i) {
      EXPECT_GT(w.centers[i], w.centers[i - 1]);
    }
  }
  EXPECT_GT(w.first_rows.back() + 150 + 5, p.size());
}

TEST(Sliding, SingleWindowEqualsWholeFit) {
  const auto p = castaing_walk(600, 3, 0.3);
  const auto w = sliding_lambda2(p, 4, 600, p.size(), {FitMethod::kurtosis});
  ASSERT_EQ(w.centers.size(), 1u);
  const auto x = log_prices(p);
  const auto whole = fit_lambda2_kurtosis(detrended_increments(x, {4, true}).values);
  EXPECT_EQ(w.lambda2s[0], whole.params.lambda2);
}

TEST(Sliding, StationarySurrogateEnvelope) {
  const auto p = castaing_walk(3000, 1, 0.3);
  const auto w = sliding_lambda2(p, 4, 150, 5, {FitMethod::kurtosis});
  const auto x = log_prices(p);
  for (std::size_t i = 0; i < w.centers.size(); ++i) {
    const std::vector<double> slice(x.begin() + static_cast<std::ptrdiff_t>(w.first_rows[i]),
                                    x.begin() + static_cast<std::ptrdiff_t>(w.first_rows[i] + 150));
    EXPECT_NEAR(w.lambda2s[i], oracle_window_lambda2(slice, 4), 1e-9) << w.centers[i];
  }
  // Envelope from 100 pilot series of an independent generator: per-series
  // median in [0.0308, 0.0842]; window maxima below 0.456 (99.5%).
  const double med = testutil::median(w.lambda2s);
  EXPECT_GE(med, 0.0308);
  EXPECT_LE(med, 0.0842);
  for (double v : w.lambda2s) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 0.456);
  }
}

TEST(Sliding, RegimeStepSeenAroundJunction) {
  SurrogateSpec s;
  s.kind = SurrogateKind::two_regime;
  s.n = 3000;
  s.lambda2 = 0.05;
  s.lambda2_b = 0.6;
  s.seed = 1;
  const auto two = gen_two_regime(s);
  const auto w = sliding_lambda2(two.prices, 4, 150, 5, {FitMethod::kurtosis});
  auto at = [&](std::size_t center) -> double {
    for (std::size_t i = 0; i < w.centers.size(); ++i) {
      if (w.centers[i] == center) return w.lambda2s[i];
    }
    ADD_FAILURE() << "no window centered at " << center;
    return std::numeric_limits<double>::quiet_NaN();
  };
  const double before = at(two.split_index - 75), after = at(two.split_index + 75);
  EXPECT_GE(after - before, 0.3) << before << " -> " << after;
}

TEST(LagCovariance, ZeroLagIsVariance) {
  const auto r = log_returns(walk(5000, 3), 1);
  const auto cov = lag_covariance(r, 10);
  ASSERT_EQ(cov.size(), 11u);
  EXPECT_NEAR(cov[0], testutil::moments(r.values).var, 1e-15);
  for (std::size_t t = 1; t <= 10; ++t) EXPECT_LT(std::fabs(cov[t]), 0.1 * cov[0]);
  EXPECT_THROW((void)lag_covariance(r, r.values.size()), InputError);
}
