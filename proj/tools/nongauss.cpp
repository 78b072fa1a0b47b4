// nongauss: command-line front end for the analysis pipeline.
//
//   nongauss fit --input prices.csv --scale 4 --output-dir out
//   nongauss pipeline --input prices.csv --split-date 2005-02-13 --events events.csv
//   nongauss surrogate --kind two-regime --n 3000 --seed 7 --output-dir sur
//
// Exit codes: 0 success, 1 an analysis failed, 2 bad input or configuration.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nongauss/pipeline.hpp"

namespace {

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = nongauss::parse_double(nongauss::detail::trim(item));
    if (!v) throw nongauss::InputError(std::string("bad value '") + item + "' in " + what);
    if constexpr (std::is_integral_v<T>) {
      if (*v < 1 || *v != std::floor(*v)) {
        throw nongauss::InputError(std::string(what) + " must be positive integers");
      }
    }
    out.push_back(static_cast<T>(*v));
  }
  if (out.empty()) throw nongauss::InputError(std::string(what) + " list is empty");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-Gaussian scaling analysis of price series"};
  app.require_subcommand(1);

  struct Flags {
    std::string input, output_dir = "run", scales, split_date, events, format = "csv";
    std::string fit_method, date_column = "date", price_column = "price", lags, q_values;
    std::string kind = "castaing";
    std::uint64_t seed = 1;
    std::size_t scale = 4, returns_scale = 1, window = 150, step = 5, max_lag = 0;
    std::size_t n = 10000, hold = 1, octaves = 6;
    std::optional<std::size_t> split_row;
    int quad_order = nongauss::kDefaultQuadOrder, bins = nongauss::kDefaultBins;
    unsigned threads = 1;
    bool no_dates = false, timings = false;
    double lambda2 = 0.3, lambda2_b = 0.6, split = 0.5, sigma0 = 0.01, threshold = 0.1;
  } f;

  app.fallthrough();
  app.add_option("--input", f.input, "Price CSV (header row; ',', ';' or tab separated)");
  app.add_option("--output-dir", f.output_dir, "Run directory")->capture_default_str();
  app.add_option("--seed", f.seed, "Surrogate seed")->capture_default_str();
  app.add_option("--scale", f.scale, "Detrending scale s")->capture_default_str();
  app.add_option("--returns-scale", f.returns_scale, "Return horizon for returns/stats")
      ->capture_default_str();
  app.add_option("--scales", f.scales, "Comma-separated scales for scan");
  app.add_option("--window", f.window, "Sliding window length")->capture_default_str();
  app.add_option("--step", f.step, "Sliding window step")->capture_default_str();
  app.add_option("--quad-order", f.quad_order, "Gauss-Hermite order")->capture_default_str();
  app.add_option("--bins", f.bins, "Histogram bins")->capture_default_str();
  app.add_option("--fit-method", f.fit_method, "lambda2 estimator")
      ->check(CLI::IsMember({"pdf", "kurtosis"}));
  app.add_option("--split-date", f.split_date, "Split date YYYY-MM-DD for stats");
  app.add_option("--split-row", f.split_row, "Split price row for undated series");
  app.add_option("--events", f.events, "Event annotations CSV (date|index,label)");
  app.add_option("--format", f.format, "Table format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_flag("--no-dates", f.no_dates, "Input has no date column");
  app.add_option("--date-column", f.date_column)->capture_default_str();
  app.add_option("--price-column", f.price_column)->capture_default_str();
  app.add_option("--threads", f.threads, "Worker threads")->capture_default_str();
  app.add_option("--lags", f.lags, "Comma-separated structure-function lags");
  app.add_option("--q-values", f.q_values, "Comma-separated moment orders");
  app.add_option("--threshold", f.threshold, "Monofractal nonlinearity threshold")
      ->capture_default_str();
  app.add_option("--max-lag", f.max_lag, "Return lag-covariance up to this lag (scan)");
  app.add_flag("--timings", f.timings, "Record wall-clock timings in the manifest");
  app.add_option("--kind", f.kind, "Surrogate kind")
      ->check(CLI::IsMember({"castaing", "gaussian-walk", "two-regime", "cascade"}))
      ->capture_default_str();
  app.add_option("--n", f.n, "Surrogate length")->capture_default_str();
  app.add_option("--lambda2", f.lambda2, "Surrogate lambda2 (first regime)")->capture_default_str();
  app.add_option("--lambda2-b", f.lambda2_b, "Second-regime lambda2")->capture_default_str();
  app.add_option("--split", f.split, "Two-regime split fraction")->capture_default_str();
  app.add_option("--sigma0", f.sigma0, "Surrogate sigma0")->capture_default_str();
  app.add_option("--hold", f.hold, "Redraw omega every HOLD samples")->capture_default_str();
  app.add_option("--octaves", f.octaves, "Cascade octaves")->capture_default_str();

  std::vector<std::string> analyses;
  std::vector<CLI::App*> subs;
  for (const char* name : {"ingest", "returns", "detrend", "fit", "scan", "slide", "mfa", "stats",
                           "surrogate"}) {
    subs.push_back(app.add_subcommand(name, std::string("Run the ") + name + " analysis"));
  }
  auto* pipeline = app.add_subcommand("pipeline", "Run several analyses into one run directory");
  pipeline->add_option("--analyses", analyses, "Analyses to run (default: all but surrogate)")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    nongauss::PipelineConfig cfg;
    cfg.input = f.input;
    cfg.table.date_column = f.no_dates ? "" : f.date_column;
    cfg.table.price_column = f.price_column;
    cfg.output_dir = f.output_dir;
    cfg.scale = f.scale;
    cfg.returns_scale = f.returns_scale;
    if (!f.scales.empty()) cfg.scales = parse_list<std::size_t>(f.scales, "--scales");
    cfg.window = f.window;
    cfg.step = f.step;
    cfg.quad_order = f.quad_order;
    cfg.bins = f.bins;
    if (!f.fit_method.empty()) {
      cfg.fit_method = f.fit_method == "pdf" ? nongauss::FitMethod::pdf : nongauss::FitMethod::kurtosis;
    }
    if (!f.split_date.empty()) {
      cfg.split_date = nongauss::parse_iso_date(f.split_date);
      if (!cfg.split_date) throw nongauss::InputError("--split-date must be YYYY-MM-DD");
    }
    cfg.split_row = f.split_row;
    cfg.events_path = f.events;
    cfg.max_lag = f.max_lag;
    if (!f.q_values.empty()) cfg.q_values = parse_list<double>(f.q_values, "--q-values");
    if (!f.lags.empty()) cfg.lags = parse_list<std::size_t>(f.lags, "--lags");
    cfg.fractality_threshold = f.threshold;
    cfg.format = f.format == "json" ? nongauss::OutputFormat::json : nongauss::OutputFormat::csv;
    cfg.threads = f.threads;
    cfg.record_timings = f.timings;

    const bool wants_surrogate = f.input.empty() || app.got_subcommand("surrogate");
    if (wants_surrogate) {
      nongauss::SurrogateSpec spec;
      spec.kind = *nongauss::parse_surrogate_kind(f.kind);
      spec.n = f.n;
      spec.lambda2 = f.lambda2;
      spec.lambda2_b = f.lambda2_b;
      spec.split_fraction = f.split;
      spec.sigma0 = f.sigma0;
      spec.seed = f.seed;
      spec.vol_hold = f.hold;
      spec.octaves = f.octaves;
      cfg.surrogate = spec;
    }

    if (pipeline->parsed()) {
      if (analyses.empty()) {
        for (const char* name : {"ingest", "returns", "detrend", "fit", "scan", "slide", "mfa", "stats"}) {
          analyses.emplace_back(name);
        }
      }
      for (const auto& name : analyses) {
        const auto a = nongauss::parse_analysis(name);
        if (!a) throw nongauss::InputError("unknown analysis '" + name + "'");
        cfg.analyses.push_back(*a);
      }
    } else {
      for (auto* sub : subs) {
        if (sub->parsed()) cfg.analyses.push_back(*nongauss::parse_analysis(sub->get_name()));
      }
    }

    const auto result = nongauss::run_pipeline(cfg);
    for (const auto& o : result.outcomes) {
      if (o.ok) {
        std::cout << nongauss::to_string(o.analysis) << ": ok";
        for (const auto& file : o.files) std::cout << ' ' << file;
        std::cout << '\n';
      } else {
        std::cerr << nongauss::to_string(o.analysis) << ": failed: " << o.error << '\n';
      }
    }
    std::cout << "manifest: " << (result.run_dir / "manifest.json").string() << '\n';
    return result.exit_code;
  } catch (const nongauss::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
