#include "rcthresh/estimator.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "rcthresh/errors.hpp"
#include "rcthresh/montecarlo.hpp"

namespace rcthresh {

namespace {

bool spec_matches_record(const TableMeta& meta, const MeasurementRecord& record) {
  const bool record_rayleigh = !record.k_db.has_value() ||
                               *record.k_db == -std::numeric_limits<double>::infinity();
  if (meta.kind == DistKind::Rayleigh) return record_rayleigh;
  return !record_rayleigh && *record.k_db == meta.k_db;
}

}  // namespace

ThresholdEstimate estimate_threshold(const MeasurementRecord& record,
                                     const CorrectionTable* table) {
  if (record.n < 2) throw domain_error("estimate_threshold: need at least 2 stirrer positions");
  if (record.n_low < 0 || record.n_low > record.n) {
    throw domain_error("estimate_threshold: n_low must be in [0, n]");
  }
  if (!(record.mean_field > 0) || !std::isfinite(record.mean_field)) {
    throw domain_error("estimate_threshold: mean_field must be positive and finite");
  }
  if (record.n_low == record.n) {
    throw all_pass_error(
        "all " + std::to_string(record.n) +
        " stirrer positions passed: the threshold is above the resolvable range; "
        "raise the input power or increase N");
  }
  if (record.n_low == 0) {
    throw all_fail_error(
        "all " + std::to_string(record.n) +
        " stirrer positions failed: the threshold is below the resolvable range; "
        "lower the input power or increase N");
  }

  const DistributionSpec spec = unit_mean_spec(
      record.k_db.has_value() ? DistKind::Rice : DistKind::Rayleigh, record.k_db);

  ThresholdEstimate estimate;
  estimate.e_est_norm = quantile(spec, static_cast<double>(record.n_low) / record.n);

  CorrectionLookup lookup;
  bool from_table = false;
  if (table != nullptr) {
    if (!spec_matches_record(table->meta, record)) {
      throw domain_error("estimate_threshold: table distribution does not match the record");
    }
    lookup = lookup_correction(*table, record.n, estimate.e_est_norm);
    from_table = lookup.n_matched;
  }
  if (!from_table) {
    McConfig config;
    config.trials = 1000;  // unused by the oracle
    config.n_values = {record.n};
    config.spec = spec;
    const CorrectionTable on_demand = build_correction_table(config, Method::Oracle);
    lookup = lookup_correction(on_demand, record.n, estimate.e_est_norm);
    estimate.notes = "correction computed on demand (exact binomial evaluation)";
  }

  estimate.e_factor = lookup.e_factor;
  estimate.rel_std = lookup.rel_std;
  estimate.clamped = lookup.clamped;
  estimate.e_thr_norm = estimate.e_est_norm * estimate.e_factor;
  estimate.e_thr_abs = record.mean_field * estimate.e_thr_norm;
  if (lookup.clamped) {
    if (!estimate.notes.empty()) estimate.notes += "; ";
    estimate.notes +=
        "estimate beyond the table ceiling: correction clamped at the last grid row, "
        "treat the unbiased value as a lower-bound estimate";
  }
  return estimate;
}

double expected_max_field(int n) {
  if (n < 1) throw domain_error("expected_max_field: n must be >= 1");
  const double bracket = std::numbers::egamma + std::log(static_cast<double>(n) + 1.0) -
                         1.0 / (2.0 * (static_cast<double>(n) + 1.0));
  return std::sqrt(4.0 / std::numbers::pi * bracket);
}

double max_field_cdf(int n, double x) {
  if (n < 1) throw domain_error("max_field_cdf: n must be >= 1");
  if (!(x >= 0)) throw domain_error("max_field_cdf: x must be >= 0");
  const double sigma_sq = 2.0 / std::numbers::pi;
  const double single = -std::expm1(-x * x / (2.0 * sigma_sq));
  return std::pow(single, n);
}

double max_field_quantile(int n, double p) {
  if (n < 1) throw domain_error("max_field_quantile: n must be >= 1");
  if (!(p >= 0) || p >= 1) throw domain_error("max_field_quantile: p must be in [0, 1)");
  if (p == 0) return 0.0;
  const double sigma = std::sqrt(2.0 / std::numbers::pi);
  // 1 - p^(1/n) computed as -expm1(log(p)/n) to stay accurate for large n.
  const double tail = -std::expm1(std::log(p) / n);
  return sigma * std::sqrt(-2.0 * std::log(tail));
}

}  // namespace rcthresh
