#include <gtest/gtest.h>

#include <cmath>

#include "nongauss/castaing.hpp"
#include "nongauss/random.hpp"
#include "nongauss/stats.hpp"
#include "nongauss/surrogates.hpp"
#include "test_util.hpp"

using namespace nongauss;

TEST(Rng, MatchesReferenceImplementation) {
  // Values from an independent arbitrary-precision implementation of the
  // documented generator.
  struct Case {
    std::uint64_t seed, stream, index, bits;
    double u, z;
  };
  const Case cases[] = {
      {1, 0, 0, 0x85c61a300ec70fa1ULL, 0.5225540511444502, 0.05656477169139127},
      {1, 0, 1, 0x4952c2a6e1ef0b78ULL, 0.28641907285958385, -0.563876556574403},
      {42, 1, 7, 0x277c6ecc740d815dULL, 0.154242443957676, -1.0184063453840726},
      {123456789, 2, 1000, 0xe48aacdffc00fde6ULL, 0.8927410170399561, 1.2412376613327334},
  };
  for (const auto& c : cases) {
    const rng::NormalStream s(c.seed, c.stream);
    EXPECT_EQ(s.bits(c.index), c.bits);
    EXPECT_EQ(s.uniform(c.index), c.u);
    EXPECT_NEAR(s(c.index), c.z, 1e-15);
  }
}

TEST(Rng, InverseNormalCdf) {
  // scipy.stats.norm.ppf
  const std::pair<double, double> ref[] = {
      {1e-10, -6.361340902404056},      {0.02, -2.053748910631823},
      {0.3, -0.5244005127080409},       {0.5, 0.0},
      {0.7, 0.5244005127080407},        {0.975, 1.959963984540054},
      {1 - 1e-12, 7.0344869100478356},  {1e-300, -37.0470962993612},
  };
  for (auto [p, z] : ref) EXPECT_NEAR(rng::inverse_normal_cdf(p), z, 1e-14 * std::max(1.0, std::fabs(z))) << p;
}

TEST(Rng, StreamsAreIndependentAndStandard) {
  const rng::NormalStream a(5, 0), b(5, 1);
  std::vector<double> x(200000), y(200000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = a(i);
    y[i] = b(i);
  }
  const auto m = testutil::moments(x);
  EXPECT_NEAR(m.mean, 0.0, 0.01);
  EXPECT_NEAR(m.var, 1.0, 0.01);
  EXPECT_NEAR(m.kurt, 3.0, 0.05);
  double cov = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) cov += x[i] * y[i];
  EXPECT_NEAR(cov / static_cast<double>(x.size()), 0.0, 0.01);
}

namespace {

SurrogateSpec castaing_spec(double lambda2, std::size_t n, std::uint64_t seed, double sigma0 = 1.0) {
  SurrogateSpec s;
  s.kind = SurrogateKind::castaing_increments;
  s.lambda2 = lambda2;
  s.n = n;
  s.seed = seed;
  s.sigma0 = sigma0;
  return s;
}

}  // namespace

TEST(CastaingIncrements, GaussianLimitKurtosis) {
  const auto m = testutil::moments(gen_castaing_increments(castaing_spec(0.0, 100000, 1)));
  EXPECT_GE(m.kurt, 2.9);
  EXPECT_LE(m.kurt, 3.1);
}

TEST(CastaingIncrements, MomentIdentities) {
  const auto m = testutil::moments(gen_castaing_increments(castaing_spec(0.3, 100000, 1)));
  EXPECT_GE(m.var, 1.75);
  EXPECT_LE(m.var, 1.90);
  EXPECT_GE(m.kurt, 8.5);
  EXPECT_LE(m.kurt, 11.5);
}

TEST(CastaingIncrements, Deterministic) {
  const auto a = gen_castaing_increments(castaing_spec(0.3, 5000, 77));
  const auto b = gen_castaing_increments(castaing_spec(0.3, 5000, 77));
  const auto c = gen_castaing_increments(castaing_spec(0.3, 5000, 78));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  // A longer request extends the same sequence.
  const auto longer = gen_castaing_increments(castaing_spec(0.3, 6000, 77));
  EXPECT_TRUE(std::equal(a.begin(), a.end(), longer.begin()));
}

TEST(CastaingIncrements, DensityMatchesModel) {
  const double l2 = 0.3;
  const auto x = gen_castaing_increments(castaing_spec(l2, 100000, 3));
  const auto pdf = empirical_pdf(x, 61, true);
  const CastaingParams unit{l2, std::exp(-l2)};
  std::size_t checked = 0;
  for (std::size_t j = 0; j < pdf.counts.size(); ++j) {
    const double c = static_cast<double>(pdf.counts[j]);
    if (c < 100) continue;
    const double lo = pdf.bin_centers[j] - pdf.bin_width / 2;
    const double model = castaing_probability(lo, lo + pdf.bin_width, unit) / pdf.bin_width;
    const double gap = std::fabs(std::log(pdf.densities[j]) - std::log(model));
    // A bin of c counts carries log-density noise of about 1 / sqrt(c).
    EXPECT_LE(gap, 4.0 / std::sqrt(c)) << pdf.bin_centers[j];
    if (c >= 1000) {
      EXPECT_LE(gap, 0.15) << pdf.bin_centers[j];
    }
    ++checked;
  }
  EXPECT_GT(checked, 20u);
}

TEST(CastaingIncrements, ZeroLambdaMatchesGaussianWalkSteps) {
  const auto a = gen_castaing_increments(castaing_spec(0.0, 20000, 4, 0.01));
  SurrogateSpec w;
  w.kind = SurrogateKind::gaussian_walk;
  w.n = 20001;
  w.seed = 9;
  w.sigma0 = 0.01;
  const auto walk = gen_gaussian_walk(w);
  const auto r = log_returns(walk, 1).values;
  const double d = testutil::ks_statistic(a, r);
  EXPECT_GT(testutil::ks_pvalue(d, a.size(), r.size()), 0.01) << d;
}

TEST(GaussianWalk, Properties) {
  SurrogateSpec w;
  w.kind = SurrogateKind::gaussian_walk;
  w.n = 500;
  w.sigma0 = 0.0;
  const auto flat = gen_gaussian_walk(w);
  for (double v : flat.values()) EXPECT_EQ(v, 100.0);

  w.sigma0 = 0.01;
  w.seed = 21;
  const auto steps = gaussian_walk_steps(w);
  const auto r = log_returns(gen_gaussian_walk(w), 1).values;
  ASSERT_EQ(r.size(), steps.size());
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(r[i], steps[i], 1e-12);

  w.n = 100000;
  const auto r4 = log_returns(gen_gaussian_walk(w), 4).values;
  const double sd = std::sqrt(testutil::moments(r4).var);
  EXPECT_GE(sd, 0.019);
  EXPECT_LE(sd, 0.021);
}

TEST(TwoRegime, SplitMetadataAndErrors) {
  SurrogateSpec s;
  s.kind = SurrogateKind::two_regime;
  s.n = 100;
  s.split_fraction = 0.5;
  const auto two = gen_two_regime(s);
  EXPECT_EQ(two.split_index, 50u);
  EXPECT_EQ(two.prices.size(), 100u);
  for (double bad : {0.0, 1.0, -0.2, 1.5}) {
    s.split_fraction = bad;
    EXPECT_THROW((void)gen_two_regime(s), InputError);
  }
}

TEST(TwoRegime, EqualRegimesAreIndistinguishable) {
  SurrogateSpec s;
  s.kind = SurrogateKind::two_regime;
  s.n = 20000;
  s.lambda2 = s.lambda2_b = 0.3;
  s.seed = 12;
  const auto two = gen_two_regime(s);
  const auto r = log_returns(two.prices, 1).values;
  const std::vector<double> a(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(two.split_index));
  const std::vector<double> b(r.begin() + static_cast<std::ptrdiff_t>(two.split_index), r.end());
  const double d = testutil::ks_statistic(a, b);
  EXPECT_GT(testutil::ks_pvalue(d, a.size(), b.size()), 0.01) << d;
}

TEST(TwoRegime, RegimesCarryTheirKurtosis) {
  SurrogateSpec s;
  s.kind = SurrogateKind::two_regime;
  s.n = 200001;
  s.lambda2 = 0.05;
  s.lambda2_b = 0.3;
  s.seed = 2;
  const auto two = gen_two_regime(s);
  const auto r = log_returns(two.prices, 1).values;
  const std::vector<double> a(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(two.split_index));
  const std::vector<double> b(r.begin() + static_cast<std::ptrdiff_t>(two.split_index), r.end());
  EXPECT_NEAR(testutil::moments(a).kurt, 3.0 * std::exp(0.2), 0.2);
  EXPECT_NEAR(testutil::moments(b).kurt, 3.0 * std::exp(1.2), 1.5);
}

TEST(Cascade, LogScaleVarianceAddsPerOctave) {
  SurrogateSpec s;
  s.kind = SurrogateKind::cascade;
  s.n = 1 << 18;
  s.lambda2 = 0.05;
  s.octaves = 4;
  s.sigma0 = 1.0;
  const auto x = cascade_increments(s);
  // Total log-scale variance octaves * lambda2 gives kurtosis 3 e^{4 * 0.2}.
  EXPECT_NEAR(testutil::moments(x).kurt, 3.0 * std::exp(0.8), 0.6);
  s.octaves = 0;
  EXPECT_THROW((void)cascade_increments(s), InputError);
}

TEST(Surrogates, KindMismatchAndPriceForm) {
  auto s = castaing_spec(0.2, 1000, 1);
  s.kind = SurrogateKind::gaussian_walk;
  EXPECT_THROW((void)gen_castaing_increments(s), InputError);
  s.kind = SurrogateKind::castaing_increments;
  const auto p = surrogate_prices(s);
  EXPECT_EQ(p.size(), 1000u);
  const auto inc = gen_castaing_increments(castaing_spec(0.2, 999, 1));
  const auto r = log_returns(p, 1).values;
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(r[i], inc[i], 1e-11);
}
