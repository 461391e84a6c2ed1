#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rcthresh/correction.hpp"
#include "rcthresh/distribution.hpp"
#include "rcthresh/rng.hpp"

namespace rcthresh {

struct McConfig {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  std::vector<int> n_values = {5, 10, 20, 50, 100, 200};
  int grid_points = 50;
  double quantile_lo = 0.01;
  double quantile_hi = 0.99;
  DistributionSpec spec = unit_mean_rayleigh();
};

/// Statistics of the counting estimator at one (n, e_thr) point.
/// For Method::MonteCarlo the exclusion probabilities are observed
/// fractions; for Method::Oracle they are the exact closed forms.
struct PointStats {
  int n = 0;
  double e_thr = 0.0;
  double p_level = 0.0;
  double e_est_mean = 0.0;
  double e_est_std = 0.0;
  double rel_std = 0.0;
  double p_all_below = 0.0;
  double p_all_above = 0.0;
  double admissible_fraction = 0.0;
  Method method = Method::Oracle;
  std::uint64_t trials_used = 0;
};

/// Monte-Carlo estimate of the point statistics: per trial, draw n field
/// samples, count those below e_thr, and map the count through the inverse
/// CDF; trials where all samples fall on one side are excluded. Trials draw
/// from streams derived per trial index, so results do not depend on
/// execution order. Throws all_excluded_error if no trial is admissible.
PointStats simulate_point(int n, double e_thr, const DistributionSpec& spec,
                          std::uint64_t trials, const RngStream& stream);

/// Exact evaluation of the same statistics: the below-threshold count is
/// Binomial(n, cdf(e_thr)), so the conditional mean and variance of
/// quantile(k/n) are finite sums over k = 1..n-1. Weights are accumulated
/// in log space.
PointStats oracle_point(int n, double e_thr, const DistributionSpec& spec);

/// (cdf(e_thr)^n, (1 - cdf(e_thr))^n): the probabilities that all n samples
/// fall below, resp. above, the threshold.
std::pair<double, double> exclusion_probabilities(int n, double e_thr,
                                                  const DistributionSpec& spec);

/// Sweep every n in config.n_values over a grid of thresholds placed at
/// uniformly spaced quantiles in [quantile_lo, quantile_hi]. Points where
/// every Monte-Carlo trial is excluded become flagged rows rather than
/// aborting the sweep.
CorrectionTable build_correction_table(const McConfig& config, Method method);

}  // namespace rcthresh
