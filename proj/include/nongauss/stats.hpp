#pragma once

// Descriptive statistics, empirical densities, and before/after split
// comparison of return series.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nongauss/error.hpp"
#include "nongauss/moments.hpp"
#include "nongauss/series.hpp"

namespace nongauss {

/// Population-normalized (1/n) moments; kurtosis is Pearson (Gaussian = 3).
/// skewness and kurtosis are NaN (undefined) for zero-variance samples.
struct SummaryStats {
  double mean = 0.0;
  double std = 0.0;
  double skewness = std::numeric_limits<double>::quiet_NaN();
  double kurtosis = std::numeric_limits<double>::quiet_NaN();
  std::size_t n = 0;

  [[nodiscard]] bool shape_defined() const { return std::isfinite(kurtosis); }
};

[[nodiscard]] inline SummaryStats summary_stats(std::span<const double> r) {
  if (r.size() < 2) throw InputError("summary statistics need at least 2 values");
  const auto m = central_moments(r);
  SummaryStats s;
  s.n = m.n;
  s.mean = m.mean;
  s.std = m.stddev();
  if (m.m2 > 0.0) {
    s.skewness = m.skewness();
    s.kurtosis = m.kurtosis();
  }
  return s;
}

[[nodiscard]] inline SummaryStats summary_stats(const ReturnsSeries& r) {
  return summary_stats(std::span<const double>(r.values));
}

struct EmpiricalPdf {
  std::vector<double> bin_centers;
  std::vector<double> densities;
  std::vector<std::size_t> counts;
  double bin_width = 0.0;
  bool standardized = false;
  std::size_t n_total = 0;
  std::size_t n_outside = 0;  ///< standardized samples beyond +-6
};

inline constexpr std::size_t kMinPdfSamples = 100;

/// (v - mean) / std with population std; throws for zero variance.
[[nodiscard]] inline std::vector<double> standardized(std::span<const double> samples) {
  const auto m = central_moments(samples);
  if (!(m.m2 > 0.0)) throw InputError("cannot standardize a zero-variance sample");
  const double sd = m.stddev();
  std::vector<double> z(samples.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = (samples[i] - m.mean) / sd;
  return z;
}

/// Equal-width histogram density. Standardized: samples are centered and
/// scaled to unit (population) variance and binned over [-6, 6]; samples
/// outside are counted in n_outside. Raw: bins span the data range.
/// Densities are count / (n_binned * width), so they integrate to 1.
[[nodiscard]] inline EmpiricalPdf empirical_pdf(std::span<const double> samples, int bins,
                                                bool standardize) {
  if (samples.size() < kMinPdfSamples) {
    throw InputError("empirical PDF needs at least " + std::to_string(kMinPdfSamples) +
                     " samples, got " + std::to_string(samples.size()));
  }
  if (bins < 1) throw InputError("bin count must be positive");
  const auto m = central_moments(samples);
  double lo = 0.0, hi = 0.0;
  if (standardize) {
    if (!(m.m2 > 0.0)) throw InputError("cannot standardize a zero-variance sample");
    lo = -6.0;
    hi = 6.0;
  } else {
    const auto [mn, mx] = std::ranges::minmax(samples);
    lo = mn;
    hi = mx;
    if (!(hi > lo)) throw InputError("raw samples have zero range");
  }
  EmpiricalPdf pdf;
  pdf.standardized = standardize;
  pdf.n_total = samples.size();
  pdf.bin_width = (hi - lo) / bins;
  pdf.counts.assign(static_cast<std::size_t>(bins), 0);
  const auto values =
      standardize ? standardized(samples) : std::vector<double>(samples.begin(), samples.end());
  for (double z : values) {
    if (z < lo || z > hi) {
      ++pdf.n_outside;
      continue;
    }
    auto j = static_cast<std::size_t>((z - lo) / pdf.bin_width);
    j = std::min(j, pdf.counts.size() - 1);  // z == hi
    ++pdf.counts[j];
  }
  const auto binned = static_cast<double>(pdf.n_total - pdf.n_outside);
  pdf.bin_centers.resize(pdf.counts.size());
  pdf.densities.resize(pdf.counts.size());
  for (std::size_t j = 0; j < pdf.counts.size(); ++j) {
    pdf.bin_centers[j] = lo + (static_cast<double>(j) + 0.5) * pdf.bin_width;
    pdf.densities[j] = static_cast<double>(pdf.counts[j]) / (binned * pdf.bin_width);
  }
  return pdf;
}

struct SplitReport {
  std::size_t split_row = 0;
  SummaryStats before;
  SummaryStats after;
  EmpiricalPdf before_pdf;
  EmpiricalPdf after_pdf;
  std::size_t excluded = 0;  ///< returns whose horizon straddles the split
};

inline constexpr std::size_t kMinSplitSide = 30;

/// Return t covers price rows [t, t + s]. It counts as before the split row
/// when t + s <= split_row, after when t >= split_row, and is excluded
/// otherwise. The PDFs are standardized and only built for sides with
/// enough samples.
[[nodiscard]] inline SplitReport split_compare(const ReturnsSeries& r, std::size_t split_row,
                                               int bins = 61) {
  const std::size_t s = r.scale_s;
  const std::size_t price_rows = r.values.size() + s;
  if (split_row == 0 || split_row >= price_rows - 1) {
    throw InputError("split row " + std::to_string(split_row) +
                     " is not strictly inside the series");
  }
  std::vector<double> before, after;
  SplitReport rep;
  rep.split_row = split_row;
  for (std::size_t t = 0; t < r.values.size(); ++t) {
    if (t + s <= split_row) {
      before.push_back(r.values[t]);
    } else if (t >= split_row) {
      after.push_back(r.values[t]);
    } else {
      ++rep.excluded;
    }
  }
  if (before.size() < kMinSplitSide || after.size() < kMinSplitSide) {
    throw InputError("split leaves " + std::to_string(before.size()) + " / " +
                     std::to_string(after.size()) + " returns; need >= " +
                     std::to_string(kMinSplitSide) + " on each side");
  }
  rep.before = summary_stats(before);
  rep.after = summary_stats(after);
  auto pdf_or_empty = [&](const std::vector<double>& v) {
    if (v.size() < kMinPdfSamples) return EmpiricalPdf{};
    return empirical_pdf(v, bins, true);
  };
  rep.before_pdf = pdf_or_empty(before);
  rep.after_pdf = pdf_or_empty(after);
  return rep;
}

}  // namespace nongauss
