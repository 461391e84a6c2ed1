#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include "rcthresh/correction.hpp"
#include "rcthresh/montecarlo.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path work_dir() {
  const auto dir = fs::temp_directory_path() / "rcthresh_cli_tests";
  fs::create_directories(dir);
  return dir;
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out = work_dir() / ("stdout." + std::to_string(counter));
  const fs::path err = work_dir() / ("stderr." + std::to_string(counter));
  ++counter;
  const std::string cmd = std::string(RCTHRESH_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out);
  result.err = slurp(err);
  return result;
}

double value_after(const std::string& text, const std::string& label) {
  const auto pos = text.find(label);
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + label.size()));
}

}  // namespace

TEST_CASE("estimate: worked 9-of-10 record at 50 V/m") {
  const CliResult r = run_cli("estimate --n 10 --n-low 9 --mean-field 50");
  CHECK(r.exit_code == 0);
  const double e_thr_abs = value_after(r.out, "unbiased threshold: ");
  CHECK(std::abs(e_thr_abs - 120.0) <= 0.05 * 120.0);
  const double rel = value_after(r.out, "relative standard deviation: ");
  CHECK(std::abs(rel - 0.035) <= 0.005);
  CHECK(r.out.find("clamped") != std::string::npos);
}

TEST_CASE("estimate: JSON schema round-trips") {
  const CliResult r = run_cli("estimate --n 10 --n-low 9 --mean-field 50 --json");
  CHECK(r.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j.at("record").at("n") == 10);
  CHECK(j.at("record").at("n_low") == 9);
  CHECK(j.at("record").at("mean_field") == 50.0);
  CHECK(j.at("record").at("k_db").is_null());
  const auto& est = j.at("estimate");
  for (const char* key :
       {"e_est_norm", "e_factor", "e_thr_norm", "e_thr_abs", "rel_std", "clamped", "notes"}) {
    CHECK(est.contains(key));
  }
  CHECK(est.size() == 7);
  CHECK(std::abs(est.at("e_thr_abs").get<double>() - 121.98213808889318) < 1e-9);
  CHECK(est.at("clamped").get<bool>());

  // Round trip through the schema: re-serialize and re-parse.
  const auto again = nlohmann::json::parse(j.dump());
  CHECK(again == j);
}

TEST_CASE("estimate: all-pass and all-fail exit with advice on stderr") {
  const CliResult all_pass = run_cli("estimate --n 10 --n-low 10 --mean-field 50");
  CHECK(all_pass.exit_code == 2);
  CHECK(all_pass.err.find("raise the input power or increase N") != std::string::npos);

  const CliResult all_fail = run_cli("estimate --n 10 --n-low 0 --mean-field 50");
  CHECK(all_fail.exit_code == 2);
  CHECK(all_fail.err.find("lower the input power or increase N") != std::string::npos);
}

TEST_CASE("estimate: --table is honored and bad paths are I/O errors") {
  const fs::path table_path = work_dir() / "table10.csv";
  const CliResult sim = run_cli("simulate --dist rayleigh --n 10 --method oracle --out " +
                                table_path.string());
  CHECK(sim.exit_code == 0);

  const CliResult est = run_cli("estimate --n 10 --n-low 9 --mean-field 50 --table " +
                                table_path.string());
  CHECK(est.exit_code == 0);
  CHECK(std::abs(value_after(est.out, "unbiased threshold: ") - 121.98213808889318) < 1e-6);

  const CliResult missing = run_cli("estimate --n 10 --n-low 9 --mean-field 50 --table " +
                                    (work_dir() / "nope.csv").string());
  CHECK(missing.exit_code == 3);

  const fs::path garbage = work_dir() / "garbage.csv";
  std::ofstream(garbage) << "not a table\n";
  const CliResult corrupt = run_cli("estimate --n 10 --n-low 9 --mean-field 50 --table " +
                                    garbage.string());
  CHECK(corrupt.exit_code == 3);
}

TEST_CASE("simulate: deterministic bytes and loadable output") {
  const fs::path a = work_dir() / "det_a.csv";
  const fs::path b = work_dir() / "det_b.csv";
  const std::string flags =
      "simulate --dist rayleigh --n 5,10 --grid 6 --method mc --trials 2000 --seed 99 --out ";
  CHECK(run_cli(flags + a.string()).exit_code == 0);
  CHECK(run_cli(flags + b.string()).exit_code == 0);
  const std::string text_a = slurp(a);
  CHECK(text_a == slurp(b));
  CHECK_FALSE(text_a.empty());

  const rcthresh::CorrectionTable table = rcthresh::load_table(a);
  CHECK(table.rows.size() == 12);
  CHECK(table.meta.method == rcthresh::Method::MonteCarlo);
  CHECK(table.meta.seed == 99);

  const fs::path ranged = work_dir() / "ranged.csv";
  CHECK(run_cli("simulate --dist rayleigh --n 5 --grid 5 --quantile-range 0.05:0.95 --out " +
                ranged.string()).exit_code == 0);
  const rcthresh::CorrectionTable rt = rcthresh::load_table(ranged);
  CHECK(rt.meta.quantile_lo == 0.05);
  CHECK(rt.meta.quantile_hi == 0.95);
  CHECK(rt.rows.front().p_level == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(rt.rows.back().p_level == doctest::Approx(0.95).epsilon(1e-12));
}

TEST_CASE("simulate: usage errors exit 1") {
  CHECK(run_cli("simulate --dist rice --n 10 --out /tmp/x.csv").exit_code == 1);
  CHECK(run_cli("simulate --dist rayleigh --k-db 3 --n 10 --out /tmp/x.csv").exit_code == 1);
  CHECK(run_cli("simulate --dist rayleigh --n 10").exit_code == 1);       // missing --out
  CHECK(run_cli("simulate --dist gauss --n 10 --out /tmp/x.csv").exit_code == 1);
  CHECK(run_cli("estimate --n 10 --n-low 9 --mean-field 50 --bogus").exit_code == 1);
  CHECK(run_cli("").exit_code == 1);  // a subcommand is required
}

TEST_CASE("simulate: RCTHRESH_SEED provides the default seed") {
  const fs::path a = work_dir() / "env_a.csv";
  const fs::path b = work_dir() / "env_b.csv";
  setenv("RCTHRESH_SEED", "1234", 1);
  CHECK(run_cli("simulate --dist rayleigh --n 5 --grid 4 --method mc --trials 1000 --out " +
                a.string()).exit_code == 0);
  // Explicit --seed wins over the environment.
  CHECK(run_cli("simulate --dist rayleigh --n 5 --grid 4 --method mc --trials 1000 --seed 1234 --out " +
                b.string()).exit_code == 0);
  unsetenv("RCTHRESH_SEED");
  CHECK(slurp(a) == slurp(b));
  CHECK(rcthresh::load_table(a).meta.seed == 1234);
}

TEST_CASE("maxfield: all three query modes") {
  const CliResult exp = run_cli("maxfield --n 10");
  CHECK(exp.exit_code == 0);
  CHECK(std::abs(value_after(exp.out, "expected max field (normalized): ") - 1.9313607563303493) < 1e-12);

  const CliResult cdf = run_cli("maxfield --n 10 --x 2.0");
  CHECK(cdf.exit_code == 0);
  CHECK(std::abs(value_after(cdf.out, "max-field cdf: ") - 0.64290749761752887) < 1e-12);

  const CliResult q = run_cli("maxfield --n 10 --prob 0.95");
  CHECK(q.exit_code == 0);
  CHECK(std::abs(value_after(q.out, "max-field quantile (normalized): ") - 2.591674454659143) < 1e-12);

  CHECK(run_cli("maxfield --n 10 --x 2.0 --prob 0.95").exit_code == 1);
  CHECK(run_cli("maxfield --n 0").exit_code == 2);
}

TEST_CASE("exclusion: closed-form probabilities") {
  const CliResult r = run_cli("exclusion --n 10 --threshold 2.4 --dist rayleigh");
  CHECK(r.exit_code == 0);
  CHECK(std::abs(value_after(r.out, "p_all_below: ") - 0.89667692939696595) < 1e-12);
  CHECK(value_after(r.out, "p_all_above: ") < 1e-19);

  CHECK(run_cli("exclusion --n 10 --threshold 2.4 --dist rice").exit_code == 1);
  CHECK(run_cli("exclusion --n 10 --threshold 2.4 --dist rice --k-db 3").exit_code == 0);
}

TEST_CASE("plotdata: distribution curves (figures 1 and 4)") {
  const fs::path f1 = work_dir() / "fig1.csv";
  const CliResult r1 = run_cli("plotdata --figure 1 --out " + f1.string());
  CHECK(r1.exit_code == 0);
  const std::string text = slurp(f1);
  CHECK(text.rfind("# rcthresh-plot figure=1\nx,pdf,cdf\n", 0) == 0);

  const fs::path f4 = work_dir() / "fig4.csv";
  CHECK(run_cli("plotdata --figure 4 --k-db 3 --out " + f4.string()).exit_code == 0);
  CHECK(slurp(f4).rfind("# rcthresh-plot figure=4\nx,pdf,cdf\n", 0) == 0);
  CHECK(run_cli("plotdata --figure 4 --out " + f4.string()).exit_code == 1);  // needs --k-db
}

TEST_CASE("plotdata: correction sweeps (figures 3 and 5)") {
  const fs::path f3 = work_dir() / "fig3.csv";
  const CliResult r3 = run_cli("plotdata --figure 3 --n 5,10 --grid 6 --out " + f3.string());
  CHECK(r3.exit_code == 0);
  const std::string text = slurp(f3);
  CHECK(text.rfind("# rcthresh-plot figure=3\nn,e_est_mean,corr_factor,rel_std\n", 0) == 0);

  const fs::path f5 = work_dir() / "fig5.csv";
  CHECK(run_cli("plotdata --figure 5 --k-db 3 --n 5,10 --grid 6 --out " + f5.string()).exit_code == 0);
  CHECK(slurp(f5).rfind("# rcthresh-plot figure=5\n", 0) == 0);

  // Monte-Carlo fidelity variant: same layout, seeded noise around the oracle.
  const fs::path f3mc = work_dir() / "fig3mc.csv";
  const fs::path f3or = work_dir() / "fig3or.csv";
  CHECK(run_cli("plotdata --figure 3 --n 5 --grid 4 --method mc --trials 1000 --seed 5 --out " +
                f3mc.string()).exit_code == 0);
  CHECK(run_cli("plotdata --figure 3 --n 5 --grid 4 --out " + f3or.string()).exit_code == 0);
  const std::string text_mc = slurp(f3mc);
  CHECK(text_mc.rfind("# rcthresh-plot figure=3\nn,e_est_mean,corr_factor,rel_std\n", 0) == 0);
  CHECK(text_mc != slurp(f3or));
}

TEST_CASE("plotdata: exclusion curves match the closed forms exactly (figure 6)") {
  const fs::path f6 = work_dir() / "fig6.csv";
  const CliResult r = run_cli("plotdata --figure 6 --n 5,10 --points 31 --out " + f6.string());
  CHECK(r.exit_code == 0);
  std::istringstream lines(slurp(f6));
  std::string line;
  std::getline(lines, line);
  CHECK(line == "# rcthresh-plot figure=6");
  std::getline(lines, line);
  CHECK(line == "n,e_thr,p_all_below,p_all_above");
  int rows = 0;
  const auto spec = rcthresh::unit_mean_rayleigh();
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string n_s, e_s, b_s, a_s;
    std::getline(fields, n_s, ',');
    std::getline(fields, e_s, ',');
    std::getline(fields, b_s, ',');
    std::getline(fields, a_s, ',');
    const auto [below, above] =
        rcthresh::exclusion_probabilities(std::stoi(n_s), std::stod(e_s), spec);
    CHECK(std::stod(b_s) == below);
    CHECK(std::stod(a_s) == above);
    ++rows;
  }
  CHECK(rows == 62);

  CHECK(run_cli("plotdata --figure 2 --out /tmp/fig2.csv").exit_code == 1);
}
