#include <array>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcthresh/errors.hpp"
#include "rcthresh/estimator.hpp"
#include "rcthresh/montecarlo.hpp"

namespace {

using rcthresh::DistKind;
using rcthresh::DistributionSpec;
using rcthresh::McConfig;
using rcthresh::Method;

std::string fmt(double v) {
  std::array<char, 40> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("RCTHRESH_SEED")) {
    std::uint64_t v = 0;
    const std::string_view text(env);
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec == std::errc{} && res.ptr == text.data() + text.size()) return v;
  }
  return 0;
}

int usage_error(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 1;
}

std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(',', start);
    const std::string item =
        text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    if (item.empty()) throw rcthresh::domain_error("empty entry in N list");
    int v = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc{} || res.ptr != item.data() + item.size() || v < 2) {
      throw rcthresh::domain_error("bad N value '" + item + "' (need integers >= 2)");
    }
    values.push_back(v);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

std::pair<double, double> parse_quantile_range(const std::string& text) {
  const std::size_t pos = text.find(':');
  if (pos == std::string::npos) {
    throw rcthresh::domain_error("quantile range must look like LO:HI");
  }
  const auto parse = [](const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
      throw rcthresh::domain_error("bad probability '" + s + "'");
    }
    return v;
  };
  return {parse(text.substr(0, pos)), parse(text.substr(pos + 1))};
}

struct SimulateOptions {
  std::string dist;
  double k_db = 0.0;
  bool has_k_db = false;
  std::string n_list;
  int grid = 50;
  std::string quantile_range = "0.01:0.99";
  std::string method = "oracle";
  std::uint64_t trials = 100000;
  std::uint64_t seed = default_seed();
  std::string out;
};

struct EstimateOptions {
  int n = 0;
  int n_low = 0;
  double mean_field = 0.0;
  double k_db = 0.0;
  bool has_k_db = false;
  std::string table;
  bool json = false;
};

struct MaxfieldOptions {
  int n = 0;
  double x = 0.0;
  bool has_x = false;
  double prob = 0.0;
  bool has_prob = false;
};

struct ExclusionOptions {
  int n = 0;
  double threshold = 0.0;
  std::string dist = "rayleigh";
  double k_db = 0.0;
  bool has_k_db = false;
};

struct PlotdataOptions {
  int figure = 0;
  std::string out;
  double k_db = 0.0;
  bool has_k_db = false;
  std::string n_list = "5,10,20,50,100,200";
  int grid = 50;
  std::string method = "oracle";
  std::uint64_t trials = 100000;
  std::uint64_t seed = default_seed();
  int points = 0;
  double x_max = 3.0;
};

DistributionSpec spec_from_flags(const std::string& dist, bool has_k_db, double k_db,
                                 bool& usage_failed) {
  usage_failed = false;
  if (dist == "rayleigh") {
    if (has_k_db) {
      usage_failed = true;
      return {};
    }
    return rcthresh::unit_mean_rayleigh();
  }
  if (!has_k_db) {
    usage_failed = true;
    return {};
  }
  return rcthresh::unit_mean_rice(k_db);
}

void write_file(const std::filesystem::path& path, const std::string& payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw rcthresh::io_error("cannot open '" + path.string() + "' for writing");
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw rcthresh::io_error("write failed for '" + path.string() + "'");
}

int run_simulate(const SimulateOptions& opt) {
  bool bad_flags = false;
  const DistributionSpec spec = spec_from_flags(opt.dist, opt.has_k_db, opt.k_db, bad_flags);
  if (bad_flags) {
    return usage_error(opt.dist == "rayleigh"
                           ? "--k-db is only meaningful with --dist rice"
                           : "--dist rice requires an explicit --k-db");
  }
  McConfig config;
  config.spec = spec;
  config.n_values = parse_n_list(opt.n_list);
  config.grid_points = opt.grid;
  std::tie(config.quantile_lo, config.quantile_hi) = parse_quantile_range(opt.quantile_range);
  config.trials = opt.trials;
  config.seed = opt.seed;
  const Method method = opt.method == "mc" ? Method::MonteCarlo : Method::Oracle;
  const rcthresh::CorrectionTable table = rcthresh::build_correction_table(config, method);
  rcthresh::save_table(table, opt.out);
  std::cout << "wrote " << table.rows.size() << " rows to " << opt.out << "\n";
  return 0;
}

int run_estimate(const EstimateOptions& opt) {
  rcthresh::MeasurementRecord record;
  record.n = opt.n;
  record.n_low = opt.n_low;
  record.mean_field = opt.mean_field;
  if (opt.has_k_db) record.k_db = opt.k_db;

  rcthresh::CorrectionTable table;
  const rcthresh::CorrectionTable* table_ptr = nullptr;
  if (!opt.table.empty()) {
    table = rcthresh::load_table(opt.table);
    table_ptr = &table;
  }
  const rcthresh::ThresholdEstimate est = rcthresh::estimate_threshold(record, table_ptr);

  if (opt.json) {
    nlohmann::ordered_json j;
    j["record"]["n"] = record.n;
    j["record"]["n_low"] = record.n_low;
    j["record"]["mean_field"] = record.mean_field;
    if (record.k_db.has_value()) {
      j["record"]["k_db"] = *record.k_db;
    } else {
      j["record"]["k_db"] = nullptr;
    }
    j["estimate"]["e_est_norm"] = est.e_est_norm;
    j["estimate"]["e_factor"] = est.e_factor;
    j["estimate"]["e_thr_norm"] = est.e_thr_norm;
    j["estimate"]["e_thr_abs"] = est.e_thr_abs;
    j["estimate"]["rel_std"] = est.rel_std;
    j["estimate"]["clamped"] = est.clamped;
    j["estimate"]["notes"] = est.notes;
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  std::cout << "biased estimate (normalized): " << fmt(est.e_est_norm) << "\n";
  std::cout << "correction factor: " << fmt(est.e_factor) << "\n";
  std::cout << "unbiased threshold (normalized): " << fmt(est.e_thr_norm) << "\n";
  std::cout << "unbiased threshold: " << fmt(est.e_thr_abs) << " V/m\n";
  std::cout << "relative standard deviation: " << fmt(est.rel_std)
            << " (" << fmt(est.rel_std * 100.0) << "%)\n";
  if (!est.notes.empty()) std::cout << "note: " << est.notes << "\n";
  return 0;
}

int run_maxfield(const MaxfieldOptions& opt) {
  if (opt.has_x) {
    std::cout << "max-field cdf: " << fmt(rcthresh::max_field_cdf(opt.n, opt.x)) << "\n";
  } else if (opt.has_prob) {
    std::cout << "max-field quantile (normalized): "
              << fmt(rcthresh::max_field_quantile(opt.n, opt.prob)) << "\n";
  } else {
    std::cout << "expected max field (normalized): "
              << fmt(rcthresh::expected_max_field(opt.n)) << "\n";
  }
  return 0;
}

int run_exclusion(const ExclusionOptions& opt) {
  bool bad_flags = false;
  const DistributionSpec spec = spec_from_flags(opt.dist, opt.has_k_db, opt.k_db, bad_flags);
  if (bad_flags) {
    return usage_error(opt.dist == "rayleigh"
                           ? "--k-db is only meaningful with --dist rice"
                           : "--dist rice requires an explicit --k-db");
  }
  const auto [below, above] = rcthresh::exclusion_probabilities(opt.n, opt.threshold, spec);
  std::cout << "p_all_below: " << fmt(below) << "\n";
  std::cout << "p_all_above: " << fmt(above) << "\n";
  return 0;
}

int run_plotdata(const PlotdataOptions& opt) {
  const bool needs_rice = opt.figure == 4 || opt.figure == 5;
  const bool forbids_rice = opt.figure == 1 || opt.figure == 3;
  if (needs_rice && !opt.has_k_db) {
    return usage_error("figure " + std::to_string(opt.figure) + " requires --k-db");
  }
  if (forbids_rice && opt.has_k_db) {
    return usage_error("figure " + std::to_string(opt.figure) + " is Rayleigh-only; drop --k-db");
  }
  const DistributionSpec spec =
      opt.has_k_db ? rcthresh::unit_mean_rice(opt.k_db) : rcthresh::unit_mean_rayleigh();

  std::string payload = "# rcthresh-plot figure=" + std::to_string(opt.figure) + "\n";

  if (opt.figure == 1 || opt.figure == 4) {
    const int points = opt.points > 0 ? opt.points : 301;
    payload += "x,pdf,cdf\n";
    for (int i = 0; i < points; ++i) {
      const double x = opt.x_max * i / (points - 1);
      payload += fmt(x) + ',' + fmt(rcthresh::pdf(spec, x)) + ',' +
                 fmt(rcthresh::cdf(spec, x)) + '\n';
    }
  } else if (opt.figure == 3 || opt.figure == 5) {
    McConfig config;
    config.spec = spec;
    config.n_values = parse_n_list(opt.n_list);
    config.grid_points = opt.grid;
    config.trials = opt.trials;
    config.seed = opt.seed;
    const Method method = opt.method == "mc" ? Method::MonteCarlo : Method::Oracle;
    const rcthresh::CorrectionTable table = rcthresh::build_correction_table(config, method);
    payload += "n,e_est_mean,corr_factor,rel_std\n";
    for (const auto& row : table.rows) {
      payload += std::to_string(row.n) + ',' + fmt(row.e_est_mean) + ',' +
                 fmt(row.corr_factor) + ',' + fmt(row.rel_std) + '\n';
    }
  } else if (opt.figure == 6) {
    const int points = opt.points > 0 ? opt.points : 121;
    payload += "n,e_thr,p_all_below,p_all_above\n";
    for (const int n : parse_n_list(opt.n_list)) {
      for (int i = 0; i < points; ++i) {
        const double e_thr = opt.x_max * i / (points - 1);
        const auto [below, above] = rcthresh::exclusion_probabilities(n, e_thr, spec);
        payload += std::to_string(n) + ',' + fmt(e_thr) + ',' + fmt(below) + ',' +
                   fmt(above) + '\n';
      }
    }
  } else {
    return usage_error("unknown figure " + std::to_string(opt.figure) +
                       " (supported: 1, 3, 4, 5, 6)");
  }

  write_file(opt.out, payload);
  std::cout << "wrote figure " << opt.figure << " data to " << opt.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Susceptibility-threshold estimation from pass/fail counts in a reverberation chamber"};
  app.require_subcommand(1);

  SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Build a bias-correction / uncertainty table and write it as CSV");
  simulate->add_option("--dist", sim.dist, "Field distribution: rayleigh or rice")
      ->required()
      ->check(CLI::IsMember({"rayleigh", "rice"}));
  auto* sim_kdb = simulate->add_option("--k-db", sim.k_db, "Rice K-factor in dB");
  simulate->add_option("--n", sim.n_list, "Comma-separated list of sample counts N")->required();
  simulate->add_option("--grid", sim.grid, "Number of threshold grid points (default 50)");
  simulate->add_option("--quantile-range", sim.quantile_range,
                       "Threshold grid quantile range LO:HI (default 0.01:0.99)");
  simulate->add_option("--method", sim.method, "mc or oracle (default oracle)")
      ->check(CLI::IsMember({"mc", "oracle"}));
  simulate->add_option("--trials", sim.trials, "Monte-Carlo trials per grid point (default 100000)");
  simulate->add_option("--seed", sim.seed, "Base RNG seed (default $RCTHRESH_SEED or 0)");
  simulate->add_option("--out", sim.out, "Output CSV path")->required();

  EstimateOptions est;
  CLI::App* estimate = app.add_subcommand(
      "estimate", "Estimate the unbiased threshold field from counted pass results");
  estimate->add_option("--n", est.n, "Number of independent stirrer positions")->required();
  estimate->add_option("--n-low", est.n_low, "Number of pass results (samples below threshold)")
      ->required();
  estimate->add_option("--mean-field", est.mean_field, "Calibrated mean field in V/m")->required();
  auto* est_kdb = estimate->add_option("--k-db", est.k_db, "Rice K-factor in dB (absent: Rayleigh)");
  estimate->add_option("--table", est.table, "Correction table CSV (absent: exact on-demand computation)");
  estimate->add_flag("--json", est.json, "Emit JSON instead of text");

  MaxfieldOptions maxf;
  CLI::App* maxfield = app.add_subcommand(
      "maxfield", "Extreme-value utilities for the maximum of N Rayleigh samples");
  maxfield->add_option("--n", maxf.n, "Number of independent samples")->required();
  auto* maxf_x = maxfield->add_option("--x", maxf.x, "Evaluate the max-field CDF at x");
  auto* maxf_p = maxfield->add_option("--prob", maxf.prob, "Invert the max-field CDF at probability p");
  maxf_x->excludes(maxf_p);
  maxf_p->excludes(maxf_x);

  ExclusionOptions exc;
  CLI::App* exclusion = app.add_subcommand(
      "exclusion", "Probability that all N samples fall below / above a threshold");
  exclusion->add_option("--n", exc.n, "Number of independent samples")->required();
  exclusion->add_option("--threshold", exc.threshold, "Normalized threshold field")->required();
  exclusion->add_option("--dist", exc.dist, "rayleigh (default) or rice")
      ->check(CLI::IsMember({"rayleigh", "rice"}));
  auto* exc_kdb = exclusion->add_option("--k-db", exc.k_db, "Rice K-factor in dB");

  PlotdataOptions plot;
  CLI::App* plotdata = app.add_subcommand(
      "plotdata", "Emit CSV curve data (distribution curves, correction sweeps, exclusion curves)");
  plotdata->add_option("--figure", plot.figure, "Curve family: 1, 3, 4, 5 or 6")->required();
  plotdata->add_option("--out", plot.out, "Output CSV path")->required();
  auto* plot_kdb = plotdata->add_option("--k-db", plot.k_db, "Rice K-factor in dB (figures 4-6)");
  plotdata->add_option("--n", plot.n_list, "Comma-separated N list (figures 3, 5, 6)");
  plotdata->add_option("--grid", plot.grid, "Grid points for correction sweeps (default 50)");
  plotdata->add_option("--method", plot.method, "mc or oracle (figures 3, 5; default oracle)")
      ->check(CLI::IsMember({"mc", "oracle"}));
  plotdata->add_option("--trials", plot.trials, "Monte-Carlo trials (with --method mc)");
  plotdata->add_option("--seed", plot.seed, "Base RNG seed");
  plotdata->add_option("--points", plot.points, "Points per curve (figures 1, 4, 6)");
  plotdata->add_option("--x-max", plot.x_max, "Upper end of the x grid (default 3)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  sim.has_k_db = sim_kdb->count() > 0;
  est.has_k_db = est_kdb->count() > 0;
  maxf.has_x = maxf_x->count() > 0;
  maxf.has_prob = maxf_p->count() > 0;
  exc.has_k_db = exc_kdb->count() > 0;
  plot.has_k_db = plot_kdb->count() > 0;

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (estimate->parsed()) return run_estimate(est);
    if (maxfield->parsed()) return run_maxfield(maxf);
    if (exclusion->parsed()) return run_exclusion(exc);
    if (plotdata->parsed()) return run_plotdata(plot);
  } catch (const rcthresh::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const rcthresh::corrupt_table_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const rcthresh::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
