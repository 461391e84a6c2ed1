#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rcthresh/distribution.hpp"

namespace rcthresh {

enum class Method { MonteCarlo, Oracle };

struct TableMeta {
  DistKind kind = DistKind::Rayleigh;
  double k_db = 0.0;  // -infinity for Rayleigh
  Method method = Method::Oracle;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double quantile_lo = 0.0;
  double quantile_hi = 0.0;
  int grid_points = 0;
  int format_version = 1;
};

/// One grid point of the bias/uncertainty sweep. On flagged rows
/// (all_excluded) the estimator statistics are NaN.
struct CorrectionRow {
  int n = 0;
  double e_thr = 0.0;
  double p_level = 0.0;
  double e_est_mean = 0.0;
  double corr_factor = 0.0;
  double rel_std = 0.0;
  double p_all_below = 0.0;
  double p_all_above = 0.0;
  bool all_excluded = false;
};

/// Rows sorted by (n, e_thr); within each n the unflagged e_est_mean column
/// is strictly increasing, which makes the lookup's inverse interpolation
/// well-posed.
struct CorrectionTable {
  TableMeta meta;
  std::vector<CorrectionRow> rows;
};

struct CorrectionLookup {
  double e_factor = 1.0;
  double rel_std = 0.0;
  bool clamped = false;
  bool n_matched = false;
};

/// Reconstruct the unit-mean spec a table was built for.
DistributionSpec table_spec(const TableMeta& meta);

/// Interpolate the correction factor and relative uncertainty against the
/// e_est_mean column for the given n. Estimates beyond the last row clamp
/// to it (clamped = true); estimates below the first row raise
/// lookup_range_error; an n that is not tabulated returns
/// n_matched = false so the caller can fall back to direct computation.
CorrectionLookup lookup_correction(const CorrectionTable& table, int n, double e_est);

/// Structural validation; throws corrupt_table_error naming the offending
/// row on failure.
void validate_table(const CorrectionTable& table);

/// CSV text of the table (format v1), round-trip decimal values.
std::string serialize_table(const CorrectionTable& table);

/// Inverse of serialize_table; validates before returning.
CorrectionTable parse_table(std::string_view text);

/// Whole-file atomic write (temp file + rename).
void save_table(const CorrectionTable& table, const std::filesystem::path& path);

CorrectionTable load_table(const std::filesystem::path& path);

}  // namespace rcthresh
