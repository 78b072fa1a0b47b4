#pragma once

// Batch orchestration: runs the selected analyses on one price series,
// writes plot-ready CSV/JSON into a run directory, and finishes with a
// manifest listing every file with its SHA-256.
//
// Outputs are byte-deterministic for a fixed configuration: numbers use
// shortest round-trip formatting, rows are emitted in index order, and
// wall-clock timings are only recorded on request.

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "nongauss/castaing.hpp"
#include "nongauss/detrend.hpp"
#include "nongauss/error.hpp"
#include "nongauss/format.hpp"
#include "nongauss/multiscale.hpp"
#include "nongauss/series.hpp"
#include "nongauss/stats.hpp"
#include "nongauss/structure.hpp"
#include "nongauss/surrogates.hpp"

namespace nongauss {

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Tables

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

enum class OutputFormat { csv, json };

namespace detail {

inline std::string csv_field(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
      }
      return q + '"';
    }
  };
  return std::visit(Visitor{}, c);
}

inline nlohmann::json json_cell(const Cell& c) {
  struct Visitor {
    nlohmann::json operator()(std::monostate) const { return nullptr; }
    nlohmann::json operator()(double v) const { return v; }
    nlohmann::json operator()(std::int64_t v) const { return v; }
    nlohmann::json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

}  // namespace detail

[[nodiscard]] inline std::string render_table(const Table& t, OutputFormat format) {
  if (format == OutputFormat::json) {
    auto rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
      nlohmann::json obj = nlohmann::json::object();
      for (std::size_t c = 0; c < t.columns.size(); ++c) obj[t.columns[c]] = detail::json_cell(row[c]);
      rows.push_back(std::move(obj));
    }
    return rows.dump(1) + "\n";
  }
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "," : "") + t.columns[c];
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += detail::csv_field(row[c]);
    }
    out += '\n';
  }
  return out;
}

[[nodiscard]] inline std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

/// Writes via a temporary file and rename, so readers never observe a
/// partially written file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw InputError("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Configuration

enum class Analysis { ingest, returns, detrend, fit, scan, slide, mfa, stats, surrogate };

[[nodiscard]] inline std::string to_string(Analysis a) {
  switch (a) {
    case Analysis::ingest: return "ingest";
    case Analysis::returns: return "returns";
    case Analysis::detrend: return "detrend";
    case Analysis::fit: return "fit";
    case Analysis::scan: return "scan";
    case Analysis::slide: return "slide";
    case Analysis::mfa: return "mfa";
    case Analysis::stats: return "stats";
    case Analysis::surrogate: return "surrogate";
  }
  return "unknown";
}

[[nodiscard]] inline std::optional<Analysis> parse_analysis(std::string_view s) {
  for (auto a : {Analysis::ingest, Analysis::returns, Analysis::detrend, Analysis::fit,
                 Analysis::scan, Analysis::slide, Analysis::mfa, Analysis::stats,
                 Analysis::surrogate}) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

[[nodiscard]] inline std::string to_string(SurrogateKind k) {
  switch (k) {
    case SurrogateKind::castaing_increments: return "castaing";
    case SurrogateKind::gaussian_walk: return "gaussian-walk";
    case SurrogateKind::two_regime: return "two-regime";
    case SurrogateKind::cascade: return "cascade";
  }
  return "unknown";
}

[[nodiscard]] inline std::optional<SurrogateKind> parse_surrogate_kind(std::string_view s) {
  for (auto k : {SurrogateKind::castaing_increments, SurrogateKind::gaussian_walk,
                 SurrogateKind::two_regime, SurrogateKind::cascade}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

struct PipelineConfig {
  std::string input;  ///< price file; empty when a surrogate is the source
  PriceTableOptions table;
  std::optional<SurrogateSpec> surrogate;
  std::string output_dir = "run";
  std::vector<Analysis> analyses;

  std::size_t scale = 4;          ///< detrending scale for detrend/fit/slide/mfa
  std::size_t returns_scale = 1;  ///< horizon for returns/stats
  std::vector<std::size_t> scales = kDefaultScanScales;
  std::size_t window = 150;
  std::size_t step = 5;
  int quad_order = kDefaultQuadOrder;
  int bins = kDefaultBins;
  /// Unset: pdf-fit everywhere except sliding windows (kurtosis).
  std::optional<FitMethod> fit_method;
  std::optional<Date> split_date;
  std::optional<std::size_t> split_row;
  std::string events_path;
  std::size_t max_lag = 0;  ///< lag-covariance diagnostic in scan; 0 disables
  std::vector<double> q_values{0.5, 1.0, 1.5, 2.0, 3.0};
  std::vector<std::size_t> lags;  ///< empty: default_lags(scale)
  double fractality_threshold = kDefaultFractalityThreshold;
  OutputFormat format = OutputFormat::csv;
  unsigned threads = 1;
  bool record_timings = false;
};

struct AnalysisOutcome {
  Analysis analysis;
  bool ok = false;
  std::string error;
  std::vector<std::string> files;
  double millis = 0.0;
};

struct PipelineResult {
  std::vector<AnalysisOutcome> outcomes;
  std::filesystem::path run_dir;
  /// 0 when every requested analysis succeeded, 1 otherwise.
  int exit_code = 0;
};

/// Throws InputError for configuration problems that no analysis can run under.
inline void validate(const PipelineConfig& cfg) {
  if (cfg.analyses.empty()) throw InputError("no analyses requested");
  const bool only_surrogate =
      cfg.analyses.size() == 1 && cfg.analyses.front() == Analysis::surrogate;
  if (!only_surrogate && cfg.input.empty() && !cfg.surrogate) {
    throw InputError("either an input file or a surrogate specification is required");
  }
  if (only_surrogate && !cfg.surrogate) throw InputError("surrogate analysis needs a specification");
  if (cfg.scale == 0 || cfg.returns_scale == 0) throw InputError("scales must be positive");
  if (cfg.window == 0 || cfg.step == 0) throw InputError("window and step must be positive");
  if (cfg.quad_order < kMinQuadOrder) throw InputError("quadrature order must be >= 8");
  if (cfg.bins < 3) throw InputError("bin count must be >= 3");
  if (cfg.output_dir.empty()) throw InputError("output directory is required");
  if (cfg.split_date && cfg.split_row) throw InputError("give a split date or a split row, not both");
}

[[nodiscard]] inline nlohmann::json config_json(const PipelineConfig& cfg) {
  nlohmann::json j;
  j["input"] = cfg.input;
  j["date_column"] = cfg.table.date_column;
  j["price_column"] = cfg.table.price_column;
  if (cfg.surrogate) {
    const auto& s = *cfg.surrogate;
    j["surrogate"] = {{"kind", to_string(s.kind)},      {"n", s.n},
                      {"lambda2", s.lambda2},           {"lambda2_b", s.lambda2_b},
                      {"split_fraction", s.split_fraction}, {"sigma0", s.sigma0},
                      {"seed", s.seed},                 {"vol_hold", s.vol_hold},
                      {"octaves", s.octaves},           {"start_price", s.start_price}};
  }
  auto names = nlohmann::json::array();
  for (auto a : cfg.analyses) names.push_back(to_string(a));
  j["analyses"] = names;
  j["scale"] = cfg.scale;
  j["returns_scale"] = cfg.returns_scale;
  j["scales"] = cfg.scales;
  j["window"] = cfg.window;
  j["step"] = cfg.step;
  j["quad_order"] = cfg.quad_order;
  j["bins"] = cfg.bins;
  j["fit_method"] = cfg.fit_method ? to_string(*cfg.fit_method) : "default";
  j["split_date"] = cfg.split_date ? format_iso_date(*cfg.split_date) : "";
  j["split_row"] = cfg.split_row ? nlohmann::json(*cfg.split_row) : nlohmann::json(nullptr);
  j["events"] = cfg.events_path;
  j["max_lag"] = cfg.max_lag;
  j["q_values"] = cfg.q_values;
  j["lags"] = cfg.lags;
  j["fractality_threshold"] = cfg.fractality_threshold;
  j["format"] = cfg.format == OutputFormat::csv ? "csv" : "json";
  return j;
}

// ---------------------------------------------------------------------------
// Events

struct Event {
  std::optional<Date> date;
  std::optional<std::size_t> row;
  std::string label;
};

/// Reads a `date,label` (or `index,label`) table of annotations.
[[nodiscard]] inline std::vector<Event> load_events(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open events file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw InputError("events file is empty");
  const char delim = detail::detect_delimiter(line);
  std::vector<std::string> header;
  for (auto f : detail::split(line, delim)) header.emplace_back(f);
  auto find = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto label_col = find("label");
  const auto date_col = find("date");
  const auto index_col = find("index");
  if (!label_col || (!date_col && !index_col)) {
    throw InputError("events file needs a 'label' column and a 'date' or 'index' column");
  }
  std::vector<Event> events;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++row;
    const auto fields = detail::split(line, delim);
    if (fields.size() != header.size()) {
      throw InputError("events row " + std::to_string(row) + " has the wrong field count");
    }
    Event e;
    e.label = std::string(fields[*label_col]);
    if (date_col) {
      e.date = parse_iso_date(fields[*date_col]);
      if (!e.date) throw InputError("events row " + std::to_string(row) + ": bad date");
    } else {
      const auto v = parse_double(fields[*index_col]);
      if (!v || *v < 0) throw InputError("events row " + std::to_string(row) + ": bad index");
      e.row = static_cast<std::size_t>(*v);
    }
    events.push_back(std::move(e));
  }
  return events;
}

/// Label per window center: each event is attached to the first center at
/// or after it; several labels on one center are joined with '|'.
[[nodiscard]] inline std::vector<std::string> event_labels(const std::vector<Event>& events,
                                                           const PriceSeries& p,
                                                           std::span<const std::size_t> centers) {
  std::vector<std::string> labels(centers.size());
  for (const auto& e : events) {
    std::size_t row = 0;
    if (e.date) {
      if (!p.has_dates()) throw InputError("dated events need a dated price series");
      row = p.index_of_date(*e.date);
    } else {
      row = *e.row;
    }
    const auto it = std::lower_bound(centers.begin(), centers.end(), row);
    if (it == centers.end()) continue;
    auto& slot = labels[static_cast<std::size_t>(it - centers.begin())];
    slot += (slot.empty() ? "" : "|") + e.label;
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Serializers

namespace detail {

inline Cell date_cell(const PriceSeries& p, std::size_t row) {
  if (!p.has_dates() || row >= p.size()) return std::string{};
  return format_iso_date(p.dates()[row]);
}

inline std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

inline nlohmann::json stats_json(const SummaryStats& s) {
  return {{"n", s.n},
          {"mean", s.mean},
          {"std", s.std},
          {"skewness", s.skewness},
          {"kurtosis", s.kurtosis},
          {"shape_defined", s.shape_defined()}};
}

inline nlohmann::json crossover_json(const CrossoverFit& c) {
  return {{"breakpoint_scale", c.breakpoint_scale}, {"left_slope", c.left_slope},
          {"right_slope", c.right_slope},           {"sse", c.sse},
          {"single_line_sse", c.single_line_sse},   {"weak", c.weak}};
}

inline Table pdf_table(const EmpiricalPdf& pdf) {
  Table t{{"bin_center", "density", "count"}, {}};
  for (std::size_t j = 0; j < pdf.bin_centers.size(); ++j) {
    t.rows.push_back({pdf.bin_centers[j], pdf.densities[j], as_int(pdf.counts[j])});
  }
  return t;
}

}  // namespace detail

[[nodiscard]] inline Table prices_table(const PriceSeries& p) {
  Table t{{"index", "date", "price", "log_price"}, {}};
  for (std::size_t i = 0; i < p.size(); ++i) {
    t.rows.push_back({detail::as_int(i), detail::date_cell(p, i), p.values()[i],
                      std::log(p.values()[i])});
  }
  return t;
}

[[nodiscard]] inline Table returns_table(const ReturnsSeries& r, const PriceSeries& p) {
  Table t{{"t", "date", "return"}, {}};
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    t.rows.push_back({detail::as_int(i), detail::date_cell(p, i), r.values[i]});
  }
  return t;
}

/// k is the 1-based window number; t the 0-based row where the increment starts.
[[nodiscard]] inline Table increments_table(const IncrementSet& inc) {
  Table t{{"k", "t", "increment"}, {}};
  for (std::size_t i = 0; i < inc.values.size(); ++i) {
    t.rows.push_back({detail::as_int(inc.windows[i] + 1), detail::as_int(inc.rows[i]),
                      inc.values[i]});
  }
  return t;
}

[[nodiscard]] inline Table scan_table(const ScaleScan& scan) {
  Table t{{"s", "lambda2", "sigma", "residual", "flag"}, {}};
  for (std::size_t i = 0; i < scan.scales.size(); ++i) {
    t.rows.push_back({detail::as_int(scan.scales[i]), scan.lambda2s[i], scan.sigmas[i],
                      scan.fit_residuals[i], to_string(scan.flags[i])});
  }
  return t;
}

[[nodiscard]] inline Table sliding_table(const WindowedLambda& w, const PriceSeries& p,
                                         const std::vector<std::string>& labels) {
  Table t{{"center_index", "center_date", "lambda2", "flag", "event"}, {}};
  for (std::size_t i = 0; i < w.centers.size(); ++i) {
    t.rows.push_back({detail::as_int(w.centers[i]), detail::date_cell(p, w.centers[i]),
                      w.lambda2s[i], to_string(w.flags[i]),
                      labels.empty() ? std::string{} : labels[i]});
  }
  return t;
}

[[nodiscard]] inline Table structure_table(const StructureFunctionScan& s) {
  Table t{{"q", "l", "m", "included"}, {}};
  for (std::size_t i = 0; i < s.q_values.size(); ++i) {
    for (std::size_t j = 0; j < s.lags.size(); ++j) {
      t.rows.push_back({s.q_values[i], detail::as_int(s.lags[j]), s.moments[i][j],
                        std::int64_t{s.included[i][j] ? 1 : 0}});
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Runner

class RunDirectory {
 public:
  RunDirectory(std::filesystem::path dir, OutputFormat format)
      : dir_(std::move(dir)), format_(format) {
    std::filesystem::create_directories(dir_);
  }

  std::string table(const std::string& stem, const Table& t) {
    return write(stem + (format_ == OutputFormat::csv ? ".csv" : ".json"), render_table(t, format_));
  }

  std::string json(const std::string& stem, const nlohmann::json& j) {
    return write(stem + ".json", j.dump(2) + "\n");
  }

  std::string write(const std::string& name, const std::string& content) {
    write_file_atomic(dir_ / name, content);
    checksums_[name] = {sha256_hex(content), content.size()};
    return name;
  }

  [[nodiscard]] const std::filesystem::path& path() const { return dir_; }

  [[nodiscard]] nlohmann::json file_list() const {
    auto files = nlohmann::json::array();
    for (const auto& [name, sum] : checksums_) {
      files.push_back({{"path", name}, {"sha256", sum.first}, {"bytes", sum.second}});
    }
    return files;
  }

 private:
  std::filesystem::path dir_;
  OutputFormat format_;
  std::map<std::string, std::pair<std::string, std::size_t>> checksums_;
};

namespace detail {

struct RunContext {
  const PipelineConfig& cfg;
  RunDirectory& dir;
  std::optional<PriceSeries> prices;
  std::optional<std::size_t> surrogate_split;
};

inline FitOptions fit_options(const PipelineConfig& cfg, FitMethod fallback) {
  return {cfg.fit_method.value_or(fallback), cfg.bins, cfg.quad_order};
}

inline std::vector<std::string> run_one(Analysis a, RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  auto& dir = ctx.dir;
  if (a == Analysis::surrogate) {
    if (!cfg.surrogate) throw InputError("surrogate analysis needs a specification");
    const auto& spec = *cfg.surrogate;
    nlohmann::json meta = config_json(cfg)["surrogate"];
    PriceSeries p = [&] {
      if (spec.kind == SurrogateKind::two_regime) {
        auto two = gen_two_regime(spec);
        meta["split_index"] = two.split_index;
        return std::move(two.prices);
      }
      return surrogate_prices(spec);
    }();
    std::ostringstream csv;
    write_prices(csv, p);
    return {dir.write("surrogate.csv", csv.str()), dir.json("surrogate", meta)};
  }

  const PriceSeries& p = *ctx.prices;
  switch (a) {
    case Analysis::ingest:
      return {dir.table("prices", prices_table(p))};
    case Analysis::returns:
      return {dir.table("returns", returns_table(log_returns(p, cfg.returns_scale), p))};
    case Analysis::detrend: {
      const auto x = log_prices(p);
      return {dir.table("increments", increments_table(detrended_increments(x, {cfg.scale, true})))};
    }
    case Analysis::fit: {
      const auto x = log_prices(p);
      const auto inc = detrended_increments(x, {cfg.scale, true});
      const auto opt = fit_options(cfg, FitMethod::pdf);
      nlohmann::json j;
      j["scale"] = cfg.scale;
      j["n_samples"] = inc.values.size();
      CastaingFit fit;
      try {
        fit = fit_lambda2(inc.values, opt);
      } catch (const FitError& e) {
        j["error"] = e.what();
        j["kurtosis_fallback_lambda2"] = e.fallback_lambda2();
        dir.json("fit", j);
        throw;
      }
      j["method"] = to_string(fit.method);
      j["lambda2"] = fit.params.lambda2;
      j["sigma0"] = fit.params.sigma0;
      j["residual"] = fit.residual;
      j["quad_order"] = fit.quad_order;
      j["bins"] = cfg.bins;
      j["sub_gaussian"] = fit.sub_gaussian;
      // Standardized empirical density next to the fitted and Gaussian models.
      const auto pdf = empirical_pdf(inc.values, cfg.bins, true);
      const CastaingParams unit{fit.params.lambda2, std::exp(-fit.params.lambda2)};
      Table t{{"bin_center", "empirical_density", "castaing_density", "gaussian_density", "count"},
              {}};
      for (std::size_t k = 0; k < pdf.bin_centers.size(); ++k) {
        const double lo = pdf.bin_centers[k] - pdf.bin_width / 2;
        const double hi = pdf.bin_centers[k] + pdf.bin_width / 2;
        t.rows.push_back({pdf.bin_centers[k], pdf.densities[k],
                          castaing_probability(lo, hi, unit, cfg.quad_order) / pdf.bin_width,
                          castaing_probability(lo, hi, {0.0, 1.0}, cfg.quad_order) / pdf.bin_width,
                          as_int(pdf.counts[k])});
      }
      return {dir.json("fit", j), dir.table("fit_pdf", t)};
    }
    case Analysis::scan: {
      const auto scan = scan_scales(p, cfg.scales, fit_options(cfg, FitMethod::pdf), cfg.threads);
      std::vector<std::string> files{dir.table("scan", scan_table(scan))};
      nlohmann::json cross;
      for (auto [name, target] : {std::pair{"lambda2", CrossoverTarget::lambda2},
                                  std::pair{"sigma", CrossoverTarget::sigma}}) {
        try {
          cross[name] = crossover_json(fit_crossover(scan, target));
        } catch (const std::exception& e) {
          cross[name] = {{"error", e.what()}};
        }
      }
      files.push_back(dir.json("crossover", cross));
      if (cfg.max_lag > 0) {
        const auto cov = lag_covariance(log_returns(p, cfg.returns_scale), cfg.max_lag);
        Table t{{"tau", "covariance"}, {}};
        for (std::size_t tau = 0; tau < cov.size(); ++tau) t.rows.push_back({as_int(tau), cov[tau]});
        files.push_back(dir.table("lag_covariance", t));
      }
      bool all_failed = true;
      for (auto f : scan.flags) all_failed = all_failed && f == EstimateFlag::failed;
      if (all_failed) throw AnalysisError("lambda2 fit failed at every scale");
      return files;
    }
    case Analysis::slide: {
      const auto w = sliding_lambda2(p, cfg.scale, cfg.window, cfg.step,
                                     fit_options(cfg, FitMethod::kurtosis), cfg.threads);
      std::vector<std::string> labels;
      if (!cfg.events_path.empty()) labels = event_labels(load_events(cfg.events_path), p, w.centers);
      return {dir.table("sliding", sliding_table(w, p, labels))};
    }
    case Analysis::mfa: {
      const auto x = log_prices(p);
      const auto inc = detrended_increments(x, {cfg.scale, true});
      const auto lags = cfg.lags.empty() ? default_lags(cfg.scale) : cfg.lags;
      if (lags.empty()) throw InputError("no lags below the detrending scale; raise --scale");
      const auto sf = structure_functions(inc, cfg.q_values, lags);
      nlohmann::json j{{"scale", cfg.scale},
                       {"q_values", sf.q_values},
                       {"lags", sf.lags},
                       {"pair_counts", sf.pair_counts},
                       {"xi", sf.xi},
                       {"xi_stderr", sf.xi_stderr},
                       {"hurst_H", sf.hurst_H},
                       {"nonlinearity", sf.nonlinearity},
                       {"threshold", cfg.fractality_threshold},
                       {"label", to_string(classify_fractality(sf, cfg.fractality_threshold))}};
      return {dir.table("structure", structure_table(sf)), dir.json("scaling", j)};
    }
    case Analysis::stats: {
      const auto r = log_returns(p, cfg.returns_scale);
      nlohmann::json j;
      j["returns_scale"] = cfg.returns_scale;
      j["all"] = stats_json(summary_stats(r));
      std::vector<std::string> files;
      std::optional<std::size_t> split = cfg.split_row;
      if (cfg.split_date) split = p.index_of_date(*cfg.split_date);
      if (split) {
        const auto rep = split_compare(r, *split, cfg.bins);
        j["split"] = {{"row", rep.split_row},
                      {"date", p.has_dates() && rep.split_row < p.size()
                                   ? format_iso_date(p.dates()[rep.split_row])
                                   : std::string{}},
                      {"excluded", rep.excluded},
                      {"before", stats_json(rep.before)},
                      {"after", stats_json(rep.after)}};
        if (!rep.before_pdf.counts.empty()) {
          files.push_back(dir.table("pdf_before", pdf_table(rep.before_pdf)));
        }
        if (!rep.after_pdf.counts.empty()) {
          files.push_back(dir.table("pdf_after", pdf_table(rep.after_pdf)));
        }
      }
      files.insert(files.begin(), dir.json("stats", j));
      return files;
    }
    case Analysis::surrogate:
      break;
  }
  throw InputError("unhandled analysis");
}

}  // namespace detail

/// Runs every requested analysis; a failing analysis is recorded in the
/// manifest and does not stop the others. Throws InputError only when the
/// configuration or the input series itself is unusable.
[[nodiscard]] inline PipelineResult run_pipeline(const PipelineConfig& cfg) {
  validate(cfg);
  RunDirectory dir(cfg.output_dir, cfg.format);
  detail::RunContext ctx{cfg, dir, std::nullopt, std::nullopt};

  const bool needs_prices = std::ranges::any_of(
      cfg.analyses, [](Analysis a) { return a != Analysis::surrogate; });
  if (needs_prices) {
    if (!cfg.input.empty()) {
      ctx.prices = load_prices(cfg.input, cfg.table);
    } else if (cfg.surrogate->kind == SurrogateKind::two_regime) {
      auto two = gen_two_regime(*cfg.surrogate);
      ctx.surrogate_split = two.split_index;
      ctx.prices = std::move(two.prices);
    } else {
      ctx.prices = surrogate_prices(*cfg.surrogate);
    }
  }

  PipelineResult result;
  result.run_dir = dir.path();
  nlohmann::json timings = nlohmann::json::object();
  for (auto a : cfg.analyses) {
    AnalysisOutcome outcome;
    outcome.analysis = a;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      outcome.files = detail::run_one(a, ctx);
      outcome.ok = true;
    } catch (const std::exception& e) {
      outcome.error = e.what();
      result.exit_code = 1;
    }
    outcome.millis =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    timings[to_string(a)] = outcome.millis;
    result.outcomes.push_back(std::move(outcome));
  }

  nlohmann::json manifest;
  manifest["tool"] = "nongauss";
  manifest["version"] = kVersion;
  manifest["config"] = config_json(cfg);
  manifest["seeds"] = cfg.surrogate ? nlohmann::json::array({cfg.surrogate->seed})
                                    : nlohmann::json::array();
  if (ctx.prices) {
    manifest["series"] = {{"label", ctx.prices->label()},
                          {"rows", ctx.prices->size()},
                          {"dated", ctx.prices->has_dates()}};
  }
  if (ctx.surrogate_split) manifest["series"]["split_index"] = *ctx.surrogate_split;
  auto analyses = nlohmann::json::array();
  for (const auto& o : result.outcomes) {
    nlohmann::json entry{{"name", to_string(o.analysis)},
                         {"status", o.ok ? "ok" : "failed"},
                         {"files", o.files}};
    if (!o.ok) entry["error"] = o.error;
    analyses.push_back(std::move(entry));
  }
  manifest["analyses"] = analyses;
  manifest["files"] = dir.file_list();
  if (cfg.record_timings) manifest["timings_ms"] = timings;
  write_file_atomic(dir.path() / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

}  // namespace nongauss
