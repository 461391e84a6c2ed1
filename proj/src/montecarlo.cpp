#include "rcthresh/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rcthresh/errors.hpp"

namespace rcthresh {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream context for correction-table sweeps; public simulate_point calls
// inherit whatever context the caller chose.
constexpr std::uint32_t kTableContext = 0x7463;  // "tc"

std::vector<double> quantile_ladder(const DistributionSpec& spec, int n) {
  // q[k] = quantile(k/n) for k = 1..n-1; q[0] unused.
  std::vector<double> q(static_cast<std::size_t>(n));
  for (int k = 1; k < n; ++k) {
    q[static_cast<std::size_t>(k)] = quantile(spec, static_cast<double>(k) / n);
  }
  return q;
}

PointStats simulate_point_impl(int n, double e_thr, std::uint64_t trials,
                               const RngStream& stream, double p,
                               std::span<const double> ladder) {
  // Under inverse-transform sampling x < e_thr iff u < cdf(e_thr), so each
  // trial counts uniforms directly. The comparison is done on the integer
  // lattice: u = ((r>>11)+1) * 2^-53 < p iff (r>>11)+1 < ceil(p * 2^53).
  const auto cut = static_cast<std::uint64_t>(std::ceil(std::ldexp(p, 53)));

  std::uint64_t admissible = 0, below = 0, above = 0;
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    RandomSequence seq(stream.with_trial(t));
    int count = 0;
    for (int i = 0; i < n; ++i) {
      count += static_cast<int>(((seq.next_u64() >> 11) + 1) < cut);
    }
    if (count == 0) {
      ++above;
    } else if (count == n) {
      ++below;
    } else {
      const double v = ladder[static_cast<std::size_t>(count)];
      sum += v;
      sum_sq += v * v;
      ++admissible;
    }
  }
  if (admissible == 0) {
    throw all_excluded_error("simulate_point: every trial had all samples on one side of the threshold (n=" +
                             std::to_string(n) + ", e_thr=" + std::to_string(e_thr) + ")");
  }

  PointStats stats;
  stats.n = n;
  stats.e_thr = e_thr;
  stats.p_level = p;
  stats.e_est_mean = sum / static_cast<double>(admissible);
  const double var = sum_sq / static_cast<double>(admissible) - stats.e_est_mean * stats.e_est_mean;
  stats.e_est_std = var > 0 ? std::sqrt(var) : 0.0;
  stats.rel_std = stats.e_est_std / stats.e_est_mean;
  stats.p_all_below = static_cast<double>(below) / static_cast<double>(trials);
  stats.p_all_above = static_cast<double>(above) / static_cast<double>(trials);
  stats.admissible_fraction = static_cast<double>(admissible) / static_cast<double>(trials);
  stats.method = Method::MonteCarlo;
  stats.trials_used = trials;
  return stats;
}

PointStats oracle_point_impl(int n, double e_thr, double p,
                             std::span<const double> ladder) {
  PointStats stats;
  stats.n = n;
  stats.e_thr = e_thr;
  stats.p_level = p;
  stats.p_all_below = std::pow(p, n);
  stats.p_all_above = std::pow(1.0 - p, n);
  stats.method = Method::Oracle;
  stats.trials_used = 0;

  if (p <= 0.0 || p >= 1.0) {
    throw all_excluded_error("oracle_point: no admissible outcome has nonzero probability (n=" +
                             std::to_string(n) + ", e_thr=" + std::to_string(e_thr) + ")");
  }

  // Binomial weights in log space, normalized over the admissible range.
  const double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  std::vector<double> lw(static_cast<std::size_t>(n));
  double lw_max = -std::numeric_limits<double>::infinity();
  for (int k = 1; k < n; ++k) {
    const double l = log_n_fact - std::lgamma(static_cast<double>(k) + 1.0) -
                     std::lgamma(static_cast<double>(n - k) + 1.0) + k * lp + (n - k) * lq;
    lw[static_cast<std::size_t>(k)] = l;
    lw_max = std::max(lw_max, l);
  }
  double weight_sum = 0.0;
  double mean_acc = 0.0;
  for (int k = 1; k < n; ++k) {
    const double w = std::exp(lw[static_cast<std::size_t>(k)] - lw_max);
    weight_sum += w;
    mean_acc += w * ladder[static_cast<std::size_t>(k)];
  }
  stats.e_est_mean = mean_acc / weight_sum;
  double var_acc = 0.0;
  for (int k = 1; k < n; ++k) {
    const double w = std::exp(lw[static_cast<std::size_t>(k)] - lw_max);
    const double d = ladder[static_cast<std::size_t>(k)] - stats.e_est_mean;
    var_acc += w * d * d;
  }
  const double var = var_acc / weight_sum;
  stats.e_est_std = var > 0 ? std::sqrt(var) : 0.0;
  stats.rel_std = stats.e_est_std / stats.e_est_mean;
  const double adm = 1.0 - stats.p_all_below - stats.p_all_above;
  stats.admissible_fraction = adm > 0 ? adm : 0.0;
  return stats;
}

void validate_config(const McConfig& config) {
  if (config.trials < 1000) throw domain_error("McConfig: trials must be >= 1000");
  if (config.n_values.empty()) throw domain_error("McConfig: n_values must not be empty");
  for (std::size_t i = 0; i < config.n_values.size(); ++i) {
    if (config.n_values[i] < 2) throw domain_error("McConfig: every N must be >= 2");
    if (i > 0 && config.n_values[i] <= config.n_values[i - 1]) {
      throw domain_error("McConfig: n_values must be strictly increasing");
    }
  }
  if (!(config.quantile_lo > 0.0) || !(config.quantile_lo < config.quantile_hi) ||
      !(config.quantile_hi < 1.0)) {
    throw domain_error("McConfig: need 0 < quantile_lo < quantile_hi < 1");
  }
  if (config.grid_points < 2) throw domain_error("McConfig: grid_points must be >= 2");
}

}  // namespace

PointStats simulate_point(int n, double e_thr, const DistributionSpec& spec,
                          std::uint64_t trials, const RngStream& stream) {
  if (n < 2) throw domain_error("simulate_point: n must be >= 2");
  if (!(e_thr > 0)) throw domain_error("simulate_point: e_thr must be > 0");
  if (trials < 1000) throw domain_error("simulate_point: trials must be >= 1000");
  const auto ladder = quantile_ladder(spec, n);
  return simulate_point_impl(n, e_thr, trials, stream, cdf(spec, e_thr), ladder);
}

PointStats oracle_point(int n, double e_thr, const DistributionSpec& spec) {
  if (n < 2) {
    throw degenerate_sample_error("oracle_point: n must be >= 2 (no admissible outcome exists otherwise)");
  }
  if (!(e_thr > 0)) throw domain_error("oracle_point: e_thr must be > 0");
  const auto ladder = quantile_ladder(spec, n);
  return oracle_point_impl(n, e_thr, cdf(spec, e_thr), ladder);
}

std::pair<double, double> exclusion_probabilities(int n, double e_thr,
                                                  const DistributionSpec& spec) {
  if (n < 1) throw domain_error("exclusion_probabilities: n must be >= 1");
  if (!(e_thr >= 0)) throw domain_error("exclusion_probabilities: e_thr must be >= 0");
  const double f = cdf(spec, e_thr);
  return {std::pow(f, n), std::pow(1.0 - f, n)};
}

CorrectionTable build_correction_table(const McConfig& config, Method method) {
  validate_config(config);

  CorrectionTable table;
  table.meta.kind = config.spec.kind;
  table.meta.k_db = config.spec.k_db;
  table.meta.method = method;
  table.meta.trials = config.trials;
  table.meta.seed = config.seed;
  table.meta.quantile_lo = config.quantile_lo;
  table.meta.quantile_hi = config.quantile_hi;
  table.meta.grid_points = config.grid_points;
  table.meta.format_version = 1;
  table.rows.reserve(config.n_values.size() * static_cast<std::size_t>(config.grid_points));

  const int g = config.grid_points;
  for (std::size_t ni = 0; ni < config.n_values.size(); ++ni) {
    const int n = config.n_values[ni];
    const auto ladder = quantile_ladder(config.spec, n);
    for (int gi = 0; gi < g; ++gi) {
      const double p_grid = config.quantile_lo +
          (config.quantile_hi - config.quantile_lo) * gi / (g - 1);
      const double e_thr = quantile(config.spec, p_grid);
      const double p = cdf(config.spec, e_thr);

      CorrectionRow row;
      row.n = n;
      row.e_thr = e_thr;
      row.p_level = p;
      try {
        const RngStream stream{config.seed,
                               {kTableContext, static_cast<std::uint32_t>(ni),
                                static_cast<std::uint32_t>(gi), 0}};
        const PointStats stats = method == Method::Oracle
            ? oracle_point_impl(n, e_thr, p, ladder)
            : simulate_point_impl(n, e_thr, config.trials, stream, p, ladder);
        row.e_est_mean = stats.e_est_mean;
        row.corr_factor = e_thr / stats.e_est_mean;
        row.rel_std = stats.rel_std;
        row.p_all_below = stats.p_all_below;
        row.p_all_above = stats.p_all_above;
      } catch (const all_excluded_error&) {
        row.e_est_mean = kNaN;
        row.corr_factor = kNaN;
        row.rel_std = kNaN;
        const auto [below, above] = exclusion_probabilities(n, e_thr, config.spec);
        row.p_all_below = below;
        row.p_all_above = above;
        row.all_excluded = true;
      }
      table.rows.push_back(row);
    }
  }
  return table;
}

}  // namespace rcthresh
