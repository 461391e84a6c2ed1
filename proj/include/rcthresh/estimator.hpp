#pragma once

#include <optional>
#include <string>

#include "rcthresh/correction.hpp"

namespace rcthresh {

/// A real test outcome: n independent stirrer positions, n_low passes,
/// the calibrated mean rectangular field in V/m, and the K-factor when the
/// chamber has an unstirred component (absent means Rayleigh).
struct MeasurementRecord {
  int n = 0;
  int n_low = 0;
  double mean_field = 0.0;
  std::optional<double> k_db;
};

struct ThresholdEstimate {
  double e_est_norm = 0.0;  // biased inverse-CDF estimate, normalized
  double e_factor = 1.0;    // multiplicative bias correction
  double e_thr_norm = 0.0;  // unbiased threshold, normalized
  double e_thr_abs = 0.0;   // unbiased threshold, V/m
  double rel_std = 0.0;     // relative standard deviation of the estimate
  bool clamped = false;
  std::string notes;
};

/// Turn a measurement record into an unbiased threshold estimate. The
/// correction is taken from the supplied table when it covers the record's
/// n; otherwise (or when no table is given) it is computed on demand with
/// the exact binomial evaluation over the default 1%-99% grid.
/// n_low = n raises all_pass_error, n_low = 0 raises all_fail_error: in
/// both cases the threshold is outside the resolvable range and the input
/// power has to be retuned (or N increased).
ThresholdEstimate estimate_threshold(const MeasurementRecord& record,
                                     const CorrectionTable* table = nullptr);

/// Expected maximum of n independent unit-mean Rayleigh samples
/// (extreme-value approximation).
double expected_max_field(int n);

/// CDF of the maximum of n unit-mean Rayleigh samples.
double max_field_cdf(int n, double x);

/// Inverse of max_field_cdf in closed form.
double max_field_quantile(int n, double p);

}  // namespace rcthresh
