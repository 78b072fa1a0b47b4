#pragma once

// Daily price series ingestion: validated price containers, log prices,
// horizon-s log returns, and the delimiter-separated text format.
//
// Time is the row index ("trading-day clock"). Calendar dates, when
// present, are carried for labelling only and never enter arithmetic.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nongauss/error.hpp"
#include "nongauss/format.hpp"

namespace nongauss {

using Date = std::chrono::year_month_day;

/// Parses a strict ISO-8601 calendar date `YYYY-MM-DD`.
[[nodiscard]] inline std::optional<Date> parse_iso_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto digits = [&](std::size_t pos, std::size_t len, int& out) {
    auto first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, out);
    return ec == std::errc{} && ptr == first + len;
  };
  int y = 0, m = 0, d = 0;
  if (!digits(0, 4, y) || !digits(5, 2, m) || !digits(8, 2, d)) return std::nullopt;
  Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
            std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

[[nodiscard]] inline std::string format_iso_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

/// Ordered daily closing prices. Invariants are enforced on construction:
/// at least two prices, all finite and strictly positive, and dates (if
/// any) strictly increasing and aligned with the prices.
class PriceSeries {
 public:
  explicit PriceSeries(std::vector<double> values, std::vector<Date> dates = {},
                       std::string label = {})
      : values_(std::move(values)), dates_(std::move(dates)), label_(std::move(label)) {
    if (values_.size() < 2) {
      throw InputError("price series needs at least 2 rows, got " +
                       std::to_string(values_.size()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]) || values_[i] <= 0.0) {
        throw InputError("price at row " + std::to_string(i + 1) +
                         " is not a finite positive number");
      }
    }
    if (!dates_.empty()) {
      if (dates_.size() != values_.size()) {
        throw InputError("dates and prices differ in length");
      }
      for (std::size_t i = 1; i < dates_.size(); ++i) {
        if (!(dates_[i - 1] < dates_[i])) {
          throw InputError("dates are not strictly increasing at row " + std::to_string(i + 1));
        }
      }
    }
  }

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] const std::vector<Date>& dates() const noexcept { return dates_; }
  [[nodiscard]] bool has_dates() const noexcept { return !dates_.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] const std::string& label() const noexcept { return label_; }

  /// Contiguous sub-series [begin, begin + count).
  [[nodiscard]] PriceSeries slice(std::size_t begin, std::size_t count) const {
    if (begin + count > values_.size()) throw InputError("slice exceeds series bounds");
    std::vector<double> v(values_.begin() + static_cast<std::ptrdiff_t>(begin),
                          values_.begin() + static_cast<std::ptrdiff_t>(begin + count));
    std::vector<Date> d;
    if (has_dates()) {
      d.assign(dates_.begin() + static_cast<std::ptrdiff_t>(begin),
               dates_.begin() + static_cast<std::ptrdiff_t>(begin + count));
    }
    return PriceSeries(std::move(v), std::move(d), label_);
  }

  /// Index of the first row dated on or after `date`; size() if none.
  [[nodiscard]] std::size_t index_of_date(const Date& date) const {
    if (!has_dates()) throw InputError("series carries no dates");
    return static_cast<std::size_t>(std::lower_bound(dates_.begin(), dates_.end(), date) -
                                    dates_.begin());
  }

 private:
  std::vector<double> values_;
  std::vector<Date> dates_;
  std::string label_;
};

/// Horizon-s log returns r_s(t) = ln p(t+s) - ln p(t); entry t is anchored
/// at price row t.
struct ReturnsSeries {
  std::vector<double> values;
  std::size_t scale_s = 1;
  std::string source_label;
};

[[nodiscard]] inline std::vector<double> log_prices(const PriceSeries& p) {
  std::vector<double> out(p.size());
  std::ranges::transform(p.values(), out.begin(), [](double v) { return std::log(v); });
  return out;
}

[[nodiscard]] inline ReturnsSeries log_returns(const PriceSeries& p, std::size_t s) {
  if (s == 0) throw InputError("return horizon must be positive");
  if (s >= p.size()) {
    throw InputError("return horizon " + std::to_string(s) + " must be below series length " +
                     std::to_string(p.size()));
  }
  const auto x = log_prices(p);
  ReturnsSeries r{std::vector<double>(p.size() - s), s, p.label()};
  for (std::size_t t = 0; t + s < x.size(); ++t) r.values[t] = x[t + s] - x[t];
  return r;
}

struct PriceTableOptions {
  /// Empty means the file has no date column.
  std::string date_column = "date";
  std::string price_column = "price";
  std::string label;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '"')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '"')) {
    s.remove_suffix(1);
  }
  return s;
}

inline char detect_delimiter(std::string_view header) {
  const char candidates[] = {',', ';', '\t'};
  char best = ',';
  std::ptrdiff_t best_count = 0;
  for (char c : candidates) {
    const auto n = std::ranges::count(header, c);
    if (n > best_count) {
      best = c;
      best_count = n;
    }
  }
  return best;
}

inline std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    fields.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

}  // namespace detail

/// Reads a header-plus-rows table with comma, semicolon or tab delimiters
/// (auto-detected from the header). Rows are trading days in file order;
/// row numbers in error messages count data rows from 1.
[[nodiscard]] inline PriceSeries read_prices(std::istream& in, const PriceTableOptions& opt) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("price table is empty");
  const char delim = detail::detect_delimiter(line);
  std::vector<std::string> header;
  for (auto f : detail::split(line, delim)) header.emplace_back(f);

  auto column = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw InputError("column '" + name + "' not found in header");
  };
  const std::size_t price_col = column(opt.price_column);
  const std::optional<std::size_t> date_col =
      opt.date_column.empty() ? std::nullopt : std::optional{column(opt.date_column)};

  std::vector<double> prices;
  std::vector<Date> dates;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++row;
    const auto fields = detail::split(line, delim);
    const auto where = "row " + std::to_string(row);
    if (fields.size() != header.size()) {
      throw InputError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    const auto price = parse_double(fields[price_col]);
    if (!price || !std::isfinite(*price) || *price <= 0.0) {
      throw InputError(where + ": price '" + std::string(fields[price_col]) +
                       "' is not a finite positive number");
    }
    if (date_col) {
      const auto date = parse_iso_date(fields[*date_col]);
      if (!date) {
        throw InputError(where + ": date '" + std::string(fields[*date_col]) +
                         "' is not YYYY-MM-DD");
      }
      if (!dates.empty() && !(dates.back() < *date)) {
        throw InputError(where + ": date " + format_iso_date(*date) +
                         " is not after the previous row (dates must strictly increase)");
      }
      dates.push_back(*date);
    }
    prices.push_back(*price);
  }
  if (prices.size() < 2) {
    throw InputError("price table has " + std::to_string(prices.size()) +
                     " data rows, need at least 2");
  }
  return PriceSeries(std::move(prices), std::move(dates), opt.label);
}

[[nodiscard]] inline PriceSeries load_prices(const std::string& path,
                                             const PriceTableOptions& opt = {}) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open price file '" + path + "'");
  auto o = opt;
  if (o.label.empty()) o.label = path;
  return read_prices(in, o);
}

/// Writes the table read by read_prices; values round-trip exactly.
inline void write_prices(std::ostream& out, const PriceSeries& p) {
  out << (p.has_dates() ? "date,price\n" : "price\n");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.has_dates()) out << format_iso_date(p.dates()[i]) << ',';
    out << format_double(p.values()[i]) << '\n';
  }
}

}  // namespace nongauss
