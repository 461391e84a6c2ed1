#pragma once

namespace rcthresh {

/// Modified Bessel function of the first kind, order 0.
/// Power series for x <= 15, asymptotic expansion above; relative error
/// better than 1e-10 over the supported range. Overflows to +inf for
/// x beyond ~709 (use the scaled variants there).
double bessel_i0(double x);

/// Modified Bessel function of the first kind, order 1.
double bessel_i1(double x);

/// exp(-x) * I0(x), finite for all x >= 0.
double bessel_i0_scaled(double x);

/// exp(-x) * I1(x).
double bessel_i1_scaled(double x);

/// First-order Marcum Q function Q1(a, b) via the canonical Poisson
/// mixture series, absolute accuracy ~1e-12.
double marcum_q1(double a, double b);

}  // namespace rcthresh
