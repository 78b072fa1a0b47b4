#pragma once

// Synthetic series with known ground truth.
//
// Stream assignment (see random.hpp for the variate algorithm):
//   stream 0      Gaussian factor zeta of Castaing increments
//   stream 1      log-scale factor omega of Castaing increments
//   stream 2      steps of the Gaussian walk
//   stream 16+j   octave-j log-scale factor of the cascade walk

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nongauss/error.hpp"
#include "nongauss/random.hpp"
#include "nongauss/series.hpp"

namespace nongauss {

enum class SurrogateKind { castaing_increments, gaussian_walk, two_regime, cascade };

struct SurrogateSpec {
  SurrogateKind kind = SurrogateKind::castaing_increments;
  std::size_t n = 10000;  ///< samples, or prices for price-valued kinds
  double lambda2 = 0.3;   ///< first-regime value for two_regime; per octave for cascade
  double lambda2_b = 0.6;
  double split_fraction = 0.5;
  double sigma0 = 0.01;
  std::uint64_t seed = 1;
  /// omega is redrawn every vol_hold samples; 1 gives independent draws.
  std::size_t vol_hold = 1;
  std::size_t octaves = 6;
  double start_price = 100.0;
};

namespace detail {

inline void check_spec(const SurrogateSpec& spec, SurrogateKind expected) {
  if (spec.kind != expected) throw InputError("surrogate kind does not match generator");
  if (spec.n < 2) throw InputError("surrogate length must be >= 2");
  if (!(spec.sigma0 >= 0.0) || !std::isfinite(spec.sigma0)) {
    throw InputError("sigma0 must be finite and nonnegative");
  }
  if (!(spec.lambda2 >= 0.0) || !(spec.lambda2_b >= 0.0)) {
    throw InputError("lambda2 must be nonnegative");
  }
  if (spec.vol_hold == 0) throw InputError("vol_hold must be >= 1");
}

inline std::vector<double> castaing_samples(std::uint64_t seed, std::size_t count,
                                            double sigma0, std::size_t hold,
                                            auto&& lambda2_at) {
  const rng::NormalStream zeta(seed, 0);
  const rng::NormalStream omega(seed, 1);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double lambda = std::sqrt(lambda2_at(i));
    out[i] = sigma0 * zeta(i) * std::exp(lambda * omega(i / hold));
  }
  return out;
}

}  // namespace detail

/// Builds prices p(i) = start * exp(increments[0] + ... + increments[i-1]).
[[nodiscard]] inline PriceSeries prices_from_increments(std::span<const double> increments,
                                                        double start_price,
                                                        std::string label = {}) {
  std::vector<double> prices(increments.size() + 1);
  double x = 0.0;
  prices[0] = start_price;
  for (std::size_t i = 0; i < increments.size(); ++i) {
    x += increments[i];
    prices[i + 1] = start_price * std::exp(x);
  }
  return PriceSeries(std::move(prices), {}, std::move(label));
}

/// n samples zeta * exp(omega), zeta ~ N(0, sigma0^2), omega ~ N(0, lambda2).
[[nodiscard]] inline std::vector<double> gen_castaing_increments(const SurrogateSpec& spec) {
  detail::check_spec(spec, SurrogateKind::castaing_increments);
  return detail::castaing_samples(spec.seed, spec.n, spec.sigma0, spec.vol_hold,
                                  [&](std::size_t) { return spec.lambda2; });
}

/// The n - 1 i.i.d. N(0, sigma0^2) log-price steps of gen_gaussian_walk.
[[nodiscard]] inline std::vector<double> gaussian_walk_steps(const SurrogateSpec& spec) {
  detail::check_spec(spec, SurrogateKind::gaussian_walk);
  const rng::NormalStream steps(spec.seed, 2);
  std::vector<double> out(spec.n - 1);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = spec.sigma0 * steps(i);
  return out;
}

/// n prices whose log is a Gaussian random walk.
[[nodiscard]] inline PriceSeries gen_gaussian_walk(const SurrogateSpec& spec) {
  return prices_from_increments(gaussian_walk_steps(spec), spec.start_price, "gaussian-walk");
}

struct TwoRegimeSeries {
  PriceSeries prices;
  std::size_t split_index;  ///< first increment drawn with lambda2_b
};

/// n prices whose increments are Castaing draws with lambda2 before
/// split_index = floor(split_fraction * n) and lambda2_b from there on.
[[nodiscard]] inline TwoRegimeSeries gen_two_regime(const SurrogateSpec& spec) {
  detail::check_spec(spec, SurrogateKind::two_regime);
  if (!(spec.split_fraction > 0.0 && spec.split_fraction < 1.0)) {
    throw InputError("split fraction must lie in (0, 1)");
  }
  const auto split =
      static_cast<std::size_t>(std::floor(spec.split_fraction * static_cast<double>(spec.n)));
  const auto inc = detail::castaing_samples(
      spec.seed, spec.n - 1, spec.sigma0, spec.vol_hold,
      [&](std::size_t i) { return i < split ? spec.lambda2 : spec.lambda2_b; });
  return {prices_from_increments(inc, spec.start_price, "two-regime"), split};
}

/// Log-price increments zeta_i * exp(sum_j omega_j(i >> j)), j = 1..octaves:
/// Castaing increments whose log-scale is refreshed independently in every
/// dyadic octave, each octave contributing variance lambda2. This is the
/// per-sample form of a log-normal cascade; it does not enforce infinite
/// divisibility across arbitrary scale ratios.
[[nodiscard]] inline std::vector<double> cascade_increments(const SurrogateSpec& spec) {
  detail::check_spec(spec, SurrogateKind::cascade);
  if (spec.octaves == 0 || spec.octaves > 40) throw InputError("octaves must lie in [1, 40]");
  const rng::NormalStream zeta(spec.seed, 0);
  std::vector<rng::NormalStream> octave;
  for (std::size_t j = 1; j <= spec.octaves; ++j) octave.emplace_back(spec.seed, 16 + j);
  const double lambda = std::sqrt(spec.lambda2);
  std::vector<double> out(spec.n - 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double omega = 0.0;
    for (std::size_t j = 1; j <= spec.octaves; ++j) omega += octave[j - 1](i >> j);
    out[i] = spec.sigma0 * zeta(i) * std::exp(lambda * omega);
  }
  return out;
}

[[nodiscard]] inline PriceSeries gen_cascade_walk(const SurrogateSpec& spec) {
  return prices_from_increments(cascade_increments(spec), spec.start_price, "cascade");
}

/// Price-valued surrogate of any kind; castaing_increments are cumulated
/// into a log-price walk of n prices.
[[nodiscard]] inline PriceSeries surrogate_prices(const SurrogateSpec& spec) {
  switch (spec.kind) {
    case SurrogateKind::castaing_increments: {
      auto s = spec;
      s.n = spec.n - 1;
      if (s.n < 2) throw InputError("surrogate length must be >= 3 for a price walk");
      return prices_from_increments(gen_castaing_increments(s), spec.start_price,
                                    "castaing-increments");
    }
    case SurrogateKind::gaussian_walk:
      return gen_gaussian_walk(spec);
    case SurrogateKind::two_regime:
      return gen_two_regime(spec).prices;
    case SurrogateKind::cascade:
      return gen_cascade_walk(spec);
  }
  throw InputError("unknown surrogate kind");
}

}  // namespace nongauss
