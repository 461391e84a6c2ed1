#!/usr/bin/env python3
"""High-precision reference values for the C++ test suites.

Computes, with mpmath at 50 significant digits, the quantities the unit and
acceptance tests assert against: Rayleigh/Rice distribution values, exact
binomial-sum statistics of the counting estimator, exclusion probabilities,
and the extreme-value formulas.  Everything here is derived independently of
the C++ implementation (direct summation and adaptive quadrature only).

Run:  python3 scripts/binomial_reference.py
"""

import mpmath as mp

mp.mp.dps = 50


def rayleigh_sigma():
    return mp.sqrt(2 / mp.pi)


def rayleigh_pdf(x, sigma):
    return (x / sigma**2) * mp.e**(-(x**2) / (2 * sigma**2))


def rayleigh_cdf(x, sigma):
    return 1 - mp.e**(-(x**2) / (2 * sigma**2))


def rayleigh_quantile(p, sigma):
    return sigma * mp.sqrt(-2 * mp.log(1 - p))


def rice_unit_mean_params(k_db):
    """Solve sigma for unit mean at the given K-factor (dB); return (sigma, nu)."""
    k = mp.mpf(10) ** (mp.mpf(k_db) / 10)
    # mean for sigma=1: sqrt(pi/2) e^{-K/2} [(1+K) I0(K/2) + K I1(K/2)]
    m1 = mp.sqrt(mp.pi / 2) * mp.e**(-k / 2) * (
        (1 + k) * mp.besseli(0, k / 2) + k * mp.besseli(1, k / 2))
    sigma = 1 / m1
    nu = sigma * mp.sqrt(2 * k)
    return sigma, nu


def rice_pdf(x, sigma, nu):
    return (x / sigma**2) * mp.e**(-(x**2 + nu**2) / (2 * sigma**2)) \
        * mp.besseli(0, x * nu / sigma**2)


def rice_cdf(x, sigma, nu):
    if x <= 0:
        return mp.mpf(0)
    return mp.quad(lambda t: rice_pdf(t, sigma, nu), [0, x])


def rice_quantile(p, sigma, nu):
    lo = mp.mpf(0)
    hi = nu + sigma * mp.sqrt(-2 * mp.log(1 - p)) + 10 * sigma
    for _ in range(140):
        mid = (lo + hi) / 2
        if rice_cdf(mid, sigma, nu) < p:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def marcum_q1(a, b):
    """Q1(a, b) = integral_b^inf t exp(-(t^2+a^2)/2) I0(a t) dt."""
    f = lambda t: t * mp.e**(-(t**2 + a**2) / 2) * mp.besseli(0, a * t)
    return mp.quad(f, [b, b + 5, b + 20, b + 60])


def binomial_point(n, p, quantile):
    """Conditional-on-admissibility mean/std of quantile(k/n), k=1..n-1,
    with Binomial(n, p) weights.  Direct high-precision summation."""
    weights = []
    for k in range(1, n):
        weights.append(mp.binomial(n, k) * p**k * (1 - p)**(n - k))
    wsum = mp.fsum(weights)
    qs = [quantile(mp.mpf(k) / n) for k in range(1, n)]
    mean = mp.fsum(w * q for w, q in zip(weights, qs)) / wsum
    var = mp.fsum(w * (q - mean)**2 for w, q in zip(weights, qs)) / wsum
    std = mp.sqrt(var)
    return mean, std, std / mean, p**n, (1 - p)**n, wsum


def show(label, value, digits=17):
    print(f"{label:58s} {mp.nstr(mp.mpf(value), digits)}")


def main():
    sig = rayleigh_sigma()
    print("== Rayleigh unit-mean ==")
    show("sigma = sqrt(2/pi)", sig)
    show("pdf(1)", rayleigh_pdf(1, sig))
    show("pdf(sigma) (mode)", rayleigh_pdf(sig, sig))
    show("cdf(1.71224)", rayleigh_cdf(mp.mpf('1.71224'), sig))
    show("quantile(0.9)", rayleigh_quantile(mp.mpf('0.9'), sig))
    show("quantile(0.5) (median)", rayleigh_quantile(mp.mpf('0.5'), sig))
    show("quantile(0.99)", rayleigh_quantile(mp.mpf('0.99'), sig))
    show("cdf(2.4)", rayleigh_cdf(mp.mpf('2.4'), sig))

    print("\n== Binomial oracle, Rayleigh, n = 10 ==")
    q = lambda p: rayleigh_quantile(p, sig)
    p24 = rayleigh_cdf(mp.mpf('2.4'), sig)
    mean, std, rel, pab, paa, wsum = binomial_point(10, p24, q)
    show("e_thr = 2.4: p = F(2.4)", p24)
    show("e_est_mean", mean)
    show("e_est_std", std)
    show("rel_std", rel)
    show("p_all_below = p^10", pab)
    show("p_all_above = (1-p)^10", paa)
    show("admissible fraction", 1 - pab - paa)

    print("\n== Binomial oracle, Rayleigh, n = 10, ceiling row p = 0.99 ==")
    e99 = rayleigh_quantile(mp.mpf('0.99'), sig)
    mean, std, rel, pab, paa, wsum = binomial_point(10, mp.mpf('0.99'), q)
    show("e_thr = quantile(0.99)", e99)
    show("e_est_mean", mean)
    show("corr_factor = e_thr / e_est_mean", e99 / mean)
    show("rel_std", rel)

    print("\n== Worked example: n=10, n_low=9, mean field 50 V/m ==")
    e_est = rayleigh_quantile(mp.mpf('0.9'), sig)
    corr = e99 / mean
    show("e_est_norm = quantile(0.9)", e_est)
    show("e_factor (ceiling row)", corr)
    show("e_thr_norm", e_est * corr)
    show("e_thr_abs (V/m)", 50 * e_est * corr)

    print("\n== Binomial oracle, Rayleigh, n = 2 at median ==")
    mean, std, rel, pab, paa, wsum = binomial_point(2, mp.mpf('0.5'), q)
    show("e_est_mean", mean)
    show("e_est_std", std)

    print("\n== Binomial oracle, Rayleigh, n = 1000 at median ==")
    med = rayleigh_quantile(mp.mpf('0.5'), sig)
    mean, std, rel, pab, paa, wsum = binomial_point(1000, mp.mpf('0.5'), q)
    show("e_est_mean", mean)
    show("corr_factor", med / mean)

    print("\n== Exclusion probabilities ==")
    show("(n=10, e_thr=2.4) all below", p24**10)
    show("(n=10, e_thr=2.4) all above", (1 - p24)**10)

    print("\n== Extreme-value formulas (Rayleigh) ==")
    for n in (1, 10, 100):
        v = mp.sqrt((4 / mp.pi) * (mp.mpf('0.5772') + mp.log(n + 1) - 1 / (2 * (n + 1))))
        show(f"expected max, n={n} (0.5772 constant)", v)
        v = mp.sqrt((4 / mp.pi) * (mp.euler + mp.log(n + 1) - 1 / (2 * (n + 1))))
        show(f"expected max, n={n} (full euler const)", v)
    show("max cdf n=10 at x=2", rayleigh_cdf(2, sig)**10)
    p95 = mp.mpf('0.95') ** (mp.mpf(1) / 10)
    show("max quantile n=10 p=0.95", sig * mp.sqrt(-2 * mp.log(1 - p95)))

    print("\n== Rice unit-mean parameters ==")
    for kdb in (-40, -20, -10, -5, 0, 3, 10):
        s, nu = rice_unit_mean_params(kdb)
        show(f"k_db={kdb}: sigma", s)
        show(f"k_db={kdb}: nu", nu)

    print("\n== Rice k_db = 3 reference values ==")
    s3, nu3 = rice_unit_mean_params(3)
    for x in ('0.25', '0.5', '1.0', '1.5', '2.0'):
        show(f"cdf({x})", rice_cdf(mp.mpf(x), s3, nu3))
    for x in ('0.5', '1.0', '1.5'):
        show(f"pdf({x})", rice_pdf(mp.mpf(x), s3, nu3))
    show("quantile(0.9)", rice_quantile(mp.mpf('0.9'), s3, nu3))
    show("quantile(0.99)", rice_quantile(mp.mpf('0.99'), s3, nu3))

    print("\n== Binomial oracle, Rice k_db = 3, n = 10 ==")
    q3 = lambda p: rice_quantile(p, s3, nu3)
    p = rice_cdf(mp.mpf('1.8'), s3, nu3)
    mean, std, rel, pab, paa, wsum = binomial_point(10, p, q3)
    show("e_thr = 1.8: p", p)
    show("e_est_mean", mean)
    show("rel_std", rel)

    print("\n== Bessel and Marcum reference (implementation checks) ==")
    for x in ('0.25', '1', '5', '14.5', '15.5', '30', '100'):
        show(f"I0({x})", mp.besseli(0, mp.mpf(x)))
    for x in ('0.25', '1', '5', '14.5', '15.5', '30', '100'):
        show(f"I1({x})", mp.besseli(1, mp.mpf(x)))
    for x in ('1', '15.5', '30', '100', '700'):
        show(f"exp(-x) I0({x})", mp.e**(-mp.mpf(x)) * mp.besseli(0, mp.mpf(x)))
    for (a, b) in (('0.5', '0.25'), ('1', '2'), ('2', '1'), ('2', '3'),
                   ('3', '0.5'), ('4.472135955', '6'), ('0.1', '4')):
        show(f"Q1({a}, {b})", marcum_q1(mp.mpf(a), mp.mpf(b)))


if __name__ == "__main__":
    main()
