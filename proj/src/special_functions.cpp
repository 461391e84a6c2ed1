#include "rcthresh/special_functions.hpp"

#include <cmath>
#include <numbers>

#include "rcthresh/errors.hpp"

namespace rcthresh {

namespace {

constexpr double kSeriesCutoff = 15.0;

// Power series sum_k (x^2/4)^k / (k!)^2, converges fast for x <= 15.
double i0_series(double x) {
  const double t = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= t / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// (x/2) * sum_k (x^2/4)^k / (k! (k+1)!)
double i1_series(double x) {
  const double t = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= t / (static_cast<double>(k) * (k + 1));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return 0.5 * x * sum;
}

// Asymptotic tail sum for I_nu, nu in {0, 1}: terms are summed while they
// shrink; at x >= 15 the truncation error is below 1e-12 relative.
double asymptotic_tail(double x, int nu) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double prev = std::abs(term);
  for (int k = 1; k < 30; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (odd * odd - mu) / (8.0 * k * x);
    if (std::abs(term) >= prev) break;
    sum += term;
    prev = std::abs(term);
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

double scaled_asymptotic(double x, int nu) {
  return asymptotic_tail(x, nu) / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace

double bessel_i0(double x) {
  if (std::isnan(x)) throw domain_error("bessel_i0: NaN argument");
  x = std::abs(x);
  if (x <= kSeriesCutoff) return i0_series(x);
  return std::exp(x) * scaled_asymptotic(x, 0);
}

double bessel_i1(double x) {
  if (std::isnan(x)) throw domain_error("bessel_i1: NaN argument");
  const double sign = x < 0 ? -1.0 : 1.0;
  x = std::abs(x);
  if (x <= kSeriesCutoff) return sign * i1_series(x);
  return sign * std::exp(x) * scaled_asymptotic(x, 1);
}

double bessel_i0_scaled(double x) {
  if (std::isnan(x) || x < 0) throw domain_error("bessel_i0_scaled: argument must be >= 0");
  if (x <= kSeriesCutoff) return std::exp(-x) * i0_series(x);
  return scaled_asymptotic(x, 0);
}

double bessel_i1_scaled(double x) {
  if (std::isnan(x) || x < 0) throw domain_error("bessel_i1_scaled: argument must be >= 0");
  if (x <= kSeriesCutoff) return std::exp(-x) * i1_series(x);
  return scaled_asymptotic(x, 1);
}

double marcum_q1(double a, double b) {
  if (!(a >= 0) || !(b >= 0)) throw domain_error("marcum_q1: arguments must be >= 0");
  if (b == 0) return 1.0;
  const double alpha = 0.5 * a * a;  // Poisson rate of the mixture index
  const double beta = 0.5 * b * b;   // Poisson rate inside the gamma tail
  if (alpha == 0) return std::exp(-beta);

  // Q1 = sum_k Pois(k; alpha) * PoisCDF(k; beta). Both recurrences start at
  // k = 0 when the rate is moderate; for large rates they start 12 sigma
  // below the mode, keeping the first term representable while the
  // neglected lower tail stays under e^-72.
  const auto start_index = [](double rate) -> long {
    if (rate <= 650.0) return 0;
    return static_cast<long>(rate - 12.0 * std::sqrt(rate));
  };
  const auto log_pois = [](long k, double rate) {
    return static_cast<double>(k) * std::log(rate) - rate - std::lgamma(static_cast<double>(k) + 1.0);
  };

  const long ka = start_index(alpha);
  long j = start_index(beta);
  double a_term = std::exp(log_pois(ka, alpha));           // Pois(ka; alpha)
  double b_term = std::exp(log_pois(j, beta));             // Pois(j; beta)
  double t_sum = b_term;                                   // PoisCDF(j; beta)

  double q = 0.0;
  double a_mass = 0.0;
  const long k_max = ka + static_cast<long>(50.0 * std::sqrt(alpha + 1.0)) + 200;
  for (long k = ka; k <= k_max; ++k) {
    while (j < k) {
      ++j;
      b_term *= beta / static_cast<double>(j);
      t_sum += b_term;
    }
    q += a_term * (t_sum < 1.0 ? t_sum : 1.0);
    a_mass += a_term;
    if (1.0 - a_mass < 1e-14) break;
    a_term *= alpha / static_cast<double>(k + 1);
  }
  // Remaining Poisson mass multiplies gamma tails that are ~1 out there.
  q += 1.0 - a_mass;
  if (q < 0.0) return 0.0;
  if (q > 1.0) return 1.0;
  return q;
}

}  // namespace rcthresh
