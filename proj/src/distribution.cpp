#include "rcthresh/distribution.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "rcthresh/errors.hpp"
#include "rcthresh/special_functions.hpp"

namespace rcthresh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double rayleigh_sigma() { return std::sqrt(2.0 / std::numbers::pi); }

// Mean of a Rice(nu = sigma sqrt(2K), sigma = 1) magnitude, as a function of
// the linear K-factor. Scaled Bessel terms keep it finite for any K.
double rice_mean_sigma1(double k_lin) {
  const double h = 0.5 * k_lin;
  return std::sqrt(std::numbers::pi / 2.0) *
         ((1.0 + k_lin) * bessel_i0_scaled(h) + k_lin * bessel_i1_scaled(h));
}

}  // namespace

DistributionSpec unit_mean_rayleigh() {
  DistributionSpec spec;
  spec.kind = DistKind::Rayleigh;
  spec.sigma = rayleigh_sigma();
  spec.nu = 0.0;
  spec.k_db = -kInf;
  return spec;
}

DistributionSpec unit_mean_rice(double k_db) {
  if (std::isnan(k_db) || k_db == kInf) {
    throw domain_error("unit_mean_rice: k_db must be finite (or -inf for the Rayleigh limit)");
  }
  if (k_db == -kInf) return unit_mean_rayleigh();
  const double k_lin = std::pow(10.0, k_db / 10.0);
  DistributionSpec spec;
  spec.kind = DistKind::Rice;
  spec.sigma = 1.0 / rice_mean_sigma1(k_lin);  // mean is linear in sigma at fixed K
  spec.nu = spec.sigma * std::sqrt(2.0 * k_lin);
  spec.k_db = k_db;
  return spec;
}

DistributionSpec unit_mean_spec(DistKind kind, std::optional<double> k_db) {
  if (kind == DistKind::Rayleigh) {
    if (k_db.has_value()) {
      throw domain_error("unit_mean_spec: k_db is meaningless for Rayleigh");
    }
    return unit_mean_rayleigh();
  }
  if (!k_db.has_value()) {
    throw domain_error("unit_mean_spec: Rice requires a K-factor");
  }
  return unit_mean_rice(*k_db);
}

double pdf(const DistributionSpec& spec, double x) {
  if (!(x >= 0)) throw domain_error("pdf: x must be >= 0");
  if (x == 0) return 0.0;
  const double s2 = spec.sigma * spec.sigma;
  if (spec.kind == DistKind::Rayleigh) {
    return (x / s2) * std::exp(-x * x / (2.0 * s2));
  }
  // (x/s^2) exp(-(x^2+nu^2)/(2 s^2)) I0(x nu / s^2), with the exponential
  // folded into the scaled Bessel to avoid overflow at large arguments.
  const double d = x - spec.nu;
  return (x / s2) * std::exp(-d * d / (2.0 * s2)) * bessel_i0_scaled(x * spec.nu / s2);
}

double cdf(const DistributionSpec& spec, double x) {
  if (!(x >= 0)) throw domain_error("cdf: x must be >= 0");
  if (x == 0) return 0.0;
  if (spec.kind == DistKind::Rayleigh) {
    return -std::expm1(-x * x / (2.0 * spec.sigma * spec.sigma));
  }
  const double q = marcum_q1(spec.nu / spec.sigma, x / spec.sigma);
  const double f = 1.0 - q;
  return f < 0.0 ? 0.0 : (f > 1.0 ? 1.0 : f);
}

double quantile(const DistributionSpec& spec, double p) {
  if (!(p >= 0) || p >= 1) throw domain_error("quantile: p must be in [0, 1)");
  if (p == 0) return 0.0;
  if (spec.kind == DistKind::Rayleigh) {
    return spec.sigma * std::sqrt(-2.0 * std::log1p(-p));
  }
  double lo = 0.0;
  double hi = spec.nu + spec.sigma * (std::sqrt(-2.0 * std::log1p(-p)) + 10.0);
  double mid = 0.5 * hi;
  for (int i = 0; i < 200; ++i) {
    mid = 0.5 * (lo + hi);
    const double f = cdf(spec, mid) - p;
    if (std::abs(f) <= 1e-9 || mid == lo || mid == hi) break;
    (f < 0 ? lo : hi) = mid;
  }
  return mid;
}

std::vector<double> sample_batch(const DistributionSpec& spec, std::size_t n,
                                 const RngStream& stream) {
  if (n == 0) throw domain_error("sample_batch: n must be >= 1");
  std::vector<double> out(n);
  RandomSequence seq(stream);
  if (spec.kind == DistKind::Rayleigh) {
    for (double& x : out) {
      x = spec.sigma * std::sqrt(-2.0 * std::log(seq.next_unit()));
    }
  } else {
    for (double& x : out) {
      const double a = spec.nu + spec.sigma * seq.next_normal();
      const double b = spec.sigma * seq.next_normal();
      x = std::sqrt(a * a + b * b);
    }
  }
  return out;
}

}  // namespace rcthresh
