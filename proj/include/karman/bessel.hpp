#pragma once

// Self-contained modified Bessel functions K0, K1, I0 and the smooth part g0
// of the small-argument decomposition K0(z) = -ln(z) + g0(z) + g1.
//
// Evaluation scheme:
//   x <= 2 : ascending power series around 0 (terms until the relative
//            increment drops below 1e-17, hard cap 40 terms).
//   x >  2 : e^x K_nu(x) by trapezoidal quadrature of
//            K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt,
//            which converges geometrically for these integrands; the step
//            shrinks like 1/sqrt(x) as the peak at t=0 narrows.
// Relative error <= 1e-12 over x in [1e-8, 700]; both branches agree at the
// crossover to ~1e-14.

#include <cmath>
#include <limits>

#include "karman/common.hpp"

namespace karman {

// g1 of K0(z) = -ln z + g0(z) + g1; fixed by g0(z) -> 0 as z -> 0.
inline constexpr double qgsw_g1 = 0.69314718055994530942 /*ln 2*/ - euler_gamma;

inline double bessel_i0(double x) {
    // All-positive series, no cancellation for any x; overflows to inf past ~709.
    double ax = std::abs(x);
    double term = 1.0, sum = 1.0;
    double q = 0.25 * ax * ax;
    for (int k = 1; k < 1000; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

namespace detail {

// e^x K_nu(x) for x > 2, nu in {0,1}.
inline double scaled_k_quadrature(double x, int nu) {
    const double h = std::min(0.18, 0.6 / std::sqrt(x));
    // Truncate once x(cosh t - 1) > 47: relative weight < 4e-21.
    double sum = 0.5;  // t = 0 term: integrand 1, half weight
    for (int j = 1;; ++j) {
        double t = h * j;
        double e = x * (std::cosh(t) - 1.0);
        if (e > 47.0) break;
        double f = std::exp(-e);
        if (nu == 1) f *= std::cosh(t);
        sum += f;
    }
    return sum * h;
}

inline double k0_series(double x) {
    // K0 = -ln(x/2) I0(x) + sum_{k>=0} (x/2)^{2k}/(k!)^2 (H_k - gamma)
    const double lhalf = std::log(0.5 * x);
    const double q = 0.25 * x * x;
    double term = 1.0, i0 = 1.0, s = -euler_gamma, hk = 0.0;
    for (int k = 1; k <= 40; ++k) {
        term *= q / (static_cast<double>(k) * k);
        hk += 1.0 / k;
        i0 += term;
        double inc = term * (hk - euler_gamma);
        s += inc;
        if (term < 1e-17 * i0) break;
    }
    return -lhalf * i0 + s;
}

inline double k1_series(double x) {
    // K1 = 1/x + sum_{k>=0} (x/2)^{2k+1}/(k!(k+1)!) [ln(x/2) - (H_k + H_{k+1})/2 + gamma]...
    // from the K_n expansion with n=1: ln(x/2) - phi(k+1)/2 - phi(k+2)/2,
    // phi(m+1) = H_m - gamma.
    const double lhalf = std::log(0.5 * x);
    const double q = 0.25 * x * x;
    double term = 0.5 * x;  // k=0: (x/2)/(0! 1!)
    double hk = 0.0,
           hk1 = 1.0;  // H_0, H_1
    double s = term * (lhalf - 0.5 * (hk - euler_gamma) - 0.5 * (hk1 - euler_gamma));
    for (int k = 1; k <= 40; ++k) {
        term *= q / (static_cast<double>(k) * (k + 1));
        hk += 1.0 / k;
        hk1 += 1.0 / (k + 1);
        double inc = term * (lhalf - 0.5 * (hk - euler_gamma) - 0.5 * (hk1 - euler_gamma));
        s += inc;
        if (term * (std::abs(lhalf) + hk1 + 1.0) < 1e-17 * (1.0 + std::abs(s))) break;
    }
    return 1.0 / x + s;
}

}  // namespace detail

struct BesselValue {
    double value = 0.0;
    bool underflow = false;  // set when e^{-x} is exactly zero in doubles
};

inline BesselValue bessel_k0_ex(double x) {
    if (!(x > 0.0)) throw precondition_error("bessel_k0: requires x > 0");
    if (x <= 2.0) return {detail::k0_series(x), false};
    double e = std::exp(-x);
    if (e == 0.0) return {0.0, true};
    return {e * detail::scaled_k_quadrature(x, 0), false};
}

inline BesselValue bessel_k1_ex(double x) {
    if (!(x > 0.0)) throw precondition_error("bessel_k1: requires x > 0");
    if (x <= 2.0) return {detail::k1_series(x), false};
    double e = std::exp(-x);
    if (e == 0.0) return {0.0, true};
    return {e * detail::scaled_k_quadrature(x, 1), false};
}

inline double bessel_k0(double x) { return bessel_k0_ex(x).value; }
inline double bessel_k1(double x) { return bessel_k1_ex(x).value; }

// Smooth part g0 of K0(z) = -ln z + g0(z) + g1, valid on (0, 1].
// g0(z) = (ln 2 - ln z)(I0(z) - 1) + sum_{k>=1} (z/2)^{2k}/(k!)^2 H_k ... - gamma terms;
// equivalently g0(z) = ln(z) A(z) + B(z) with A, B entire and A = O(z^2).
struct SmoothPartSplit {
    double log_factor;  // A(z) = -(I0(z) - 1)
    double regular;     // B(z)
};

inline SmoothPartSplit qgsw_smooth_part_split(double x) {
    if (!(x > 0.0)) throw precondition_error("qgsw_smooth_part: requires x > 0");
    if (x > 1.0)
        throw precondition_error(
            "qgsw_smooth_part: x outside series radius (x <= 1); use bessel_k0");
    const double q = 0.25 * x * x;
    const double ln2 = 0.69314718055994530942;
    double term = 1.0, hk = 0.0;
    double i0m1 = 0.0, s = 0.0;
    for (int k = 1; k <= 40; ++k) {
        term *= q / (static_cast<double>(k) * k);
        hk += 1.0 / k;
        i0m1 += term;
        s += term * (hk - euler_gamma);
        if (term < 1e-18) break;
    }
    return {-i0m1, ln2 * i0m1 + s};
}

inline double qgsw_smooth_part(double x) {
    auto sp = qgsw_smooth_part_split(x);
    return std::log(x) * sp.log_factor + sp.regular;
}

}  // namespace karman
