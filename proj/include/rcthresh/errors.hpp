#pragma once

#include <stdexcept>

namespace rcthresh {

/// Base class for all library failures.
class error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid argument or out-of-domain request.
class domain_error : public error {
  using error::error;
};

/// Every stirrer position passed: the threshold sits above the resolvable
/// range for this N. Raise the input power or increase N.
class all_pass_error : public domain_error {
  using domain_error::domain_error;
};

/// Every stirrer position failed: lower the input power or increase N.
class all_fail_error : public domain_error {
  using domain_error::domain_error;
};

/// Every Monte-Carlo trial fell outside the admissible range (all samples
/// below or all above the threshold).
class all_excluded_error : public domain_error {
  using domain_error::domain_error;
};

/// N too small for the counting estimator: no admissible outcome exists.
class degenerate_sample_error : public domain_error {
  using domain_error::domain_error;
};

/// Requested estimate lies below the tabulated range.
class lookup_range_error : public domain_error {
  using domain_error::domain_error;
};

/// A table file failed structural validation.
class corrupt_table_error : public error {
  using error::error;
};

/// Filesystem-level failure.
class io_error : public error {
  using error::error;
};

}  // namespace rcthresh
