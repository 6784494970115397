#pragma once

// The N-vortex problem for the street configuration: two-vortex motion
// classification, translation speeds of the doubly infinite street for all
// three kernels, single-row stationarity, and a truncated-lattice RK4
// simulator.
//
// Sums over the lattice are symmetric partial sums (pairs k and -k together);
// for the Euler kernel that pairing is what makes the sum converge.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "karman/common.hpp"
#include "karman/kernels.hpp"
#include "karman/quadrature.hpp"

namespace karman {

// Outcome of the two-point problem: rotation about the strength-weighted
// center when the strengths do not cancel, rigid translation when they do.
struct TwoVortexMotion {
    bool is_rotation = false;
    double omega = 0.0;        // angular speed (rotation case)
    cdouble velocity{0.0, 0.0};  // translation velocity (translation case)
};

inline TwoVortexMotion two_vortex_motion(double gamma1, double gamma2, cdouble z1, cdouble z2,
                                         const RadialKernel& kernel) {
    if (z1 == z2) throw precondition_error("two_vortex_motion: coincident points");
    if (z1.imag() != 0.0 || z2.imag() != 0.0)
        throw precondition_error("two_vortex_motion: points must lie on the real axis");
    double d = std::abs(z1 - z2);
    double gp = kernel.Gprime(d);
    TwoVortexMotion out;
    if (gamma1 + gamma2 != 0.0) {
        cdouble center = gamma1 * z1 + gamma2 * z2;
        if (std::abs(center) > 1e-12 * (std::abs(gamma1 * z1) + std::abs(gamma2 * z2)))
            throw precondition_error(
                "two_vortex_motion: rotation case requires gamma1 z1 + gamma2 z2 = 0");
        out.is_rotation = true;
        out.omega = (gamma1 + gamma2) * gp / d;
    } else {
        double sgn = (z1.real() - z2.real()) > 0.0 ? 1.0 : -1.0;
        out.is_rotation = false;
        out.velocity = cdouble(0.0, 1.0) * gamma2 * gp * sgn;
    }
    return out;
}

// Euler street speed in closed form:
//   V0 = (1/(2 l i)) conj(cot(pi (i h - a)/l)),
// real and equal to coth(pi h / l)/(2l) at a = 0, tanh(pi h / l)/(2l) at a = l/2.
inline cdouble street_speed_closed_form(const StreetGeometry& geom) {
    geom.validate();
    cdouble zeta = pi * (cdouble(0.0, geom.h) - geom.a) / geom.l;
    cdouble cot = std::cos(zeta) / std::sin(zeta);
    return std::conj(cot) / (2.0 * geom.l * cdouble(0.0, 1.0));
}

struct LatticeSum {
    cdouble value{0.0, 0.0};
    long K = 0;            // truncation half-width actually used
    double tail_bound = 0.0;  // estimated magnitude of the neglected remainder
};

namespace detail {

// Summand of the street-speed lattice sum at offset index k (may be
// fractional for the tail integral): i G'(|a+kl-ih|) (a+kl-ih)/|a+kl-ih|.
inline cdouble speed_term(const RadialKernel& kernel, const StreetGeometry& geom, double k) {
    cdouble z(geom.a + k * geom.l, -geom.h);
    double r = std::abs(z);
    return cdouble(0.0, 1.0) * kernel.Gprime(r) * z / r;
}

inline cdouble speed_pair(const RadialKernel& kernel, const StreetGeometry& geom, double k) {
    return speed_term(kernel, geom, k) + speed_term(kernel, geom, -k);
}

}  // namespace detail

// V0 = i sum_k G'(|a+kl-ih|) (a+kl-ih)/|a+kl-ih| as a symmetric sum.
// Pairs k/-k are accumulated in ascending k; the remainder past the
// truncation is restored by int_{K+1/2}^inf of the pair summand
// (Gauss-Legendre after x -> X0/s) plus the Euler-Maclaurin h'/24 term.
inline LatticeSum street_speed_sum(const RadialKernel& kernel, const StreetGeometry& geom,
                                   double tol, long K_cap = 10'000'000) {
    geom.validate();
    if (!(tol > 0.0)) throw precondition_error("street_speed_sum: tol must be > 0");

    LatticeSum out;
    cdouble sum = detail::speed_term(kernel, geom, 0.0);

    if (kernel.kind() == KernelKind::qgsw_bessel) {
        // exponential decay: sum until the pair is negligible
        long k = 1;
        for (; k <= K_cap; ++k) {
            cdouble p = detail::speed_pair(kernel, geom, static_cast<double>(k));
            sum += p;
            if (std::abs(p) < 0.05 * tol && k * geom.l * kernel.lambda() > 3.0) break;
        }
        out.value = sum;
        out.K = k;
        out.tail_bound =
            std::abs(detail::speed_pair(kernel, geom, static_cast<double>(k + 1))) /
            (1.0 - std::exp(-kernel.lambda() * geom.l));
        if (out.tail_bound > tol)
            throw convergence_error("street_speed_sum: tolerance unreachable at cap",
                                    out.tail_bound);
        return out;
    }

    // algebraic pair decay: k^-2 (Euler), k^-(2+beta) (gSQG)
    const long K = std::min<long>(K_cap, 20000);
    for (long k = 1; k <= K; ++k)
        sum += detail::speed_pair(kernel, geom, static_cast<double>(k));

    // tail integral int_{K+1/2}^inf pair(x) dx via substitution x = X0/s
    static const GaussLegendre gl(48);
    const double X0 = K + 0.5;
    cdouble tail(0.0, 0.0);
    for (size_t i = 0; i < gl.x.size(); ++i) {
        double s = 0.5 * (gl.x[i] + 1.0);  // s in (0,1)
        if (s <= 0.0) continue;
        double x = X0 / s;
        tail += 0.5 * gl.w[i] * detail::speed_pair(kernel, geom, x) * (X0 / (s * s));
    }
    // Euler-Maclaurin correction + (1/24) d/dk pair(k) at K+1/2
    double dk = 1e-3;
    cdouble dpair = (detail::speed_pair(kernel, geom, X0 + dk) -
                     detail::speed_pair(kernel, geom, X0 - dk)) /
                    (2.0 * dk);
    tail += dpair / 24.0;
    sum += tail;

    out.value = sum;
    out.K = K;
    // remaining error ~ next EM term, bounded crudely by |pair(K)|/K^2
    out.tail_bound = std::abs(detail::speed_pair(kernel, geom, X0)) / (X0 * X0);
    if (out.tail_bound > tol)
        throw convergence_error("street_speed_sum: tolerance unreachable at cap",
                                out.tail_bound);
    return out;
}

// Velocity magnitude a single row of equal points induces on one of its own
// points, by symmetric truncated sum; zero to rounding for any row.
inline double single_row_velocity(const RadialKernel& kernel, double a, double h, double l,
                                  long K) {
    if (K < 1) throw precondition_error("single_row_velocity: K >= 1 required");
    (void)a;
    (void)h;
    cdouble v(0.0, 0.0);
    for (long k = 1; k <= K; ++k) {
        double r = k * l;
        double gp = kernel.Gprime(r);
        v += cdouble(0.0, 1.0) * gp * cdouble(-static_cast<double>(k) * l, 0.0) / r;
        v += cdouble(0.0, 1.0) * gp * cdouble(static_cast<double>(k) * l, 0.0) / r;
    }
    return std::abs(v);
}

// Snapshot of the truncated point lattice: 2K+1 points per row.
struct PointLatticeState {
    long K = 0;
    double t = 0.0;
    std::vector<cdouble> top;     // strengths +1
    std::vector<cdouble> bottom;  // strengths -1
};

struct PointTrajectory {
    std::vector<PointLatticeState> states;
    // drift of the central point of the top row over the run, and its
    // deviation from the street speed lattice sum
    cdouble drift_velocity{0.0, 0.0};
    cdouble street_speed{0.0, 0.0};
    double drift_deviation = 0.0;
};

namespace detail {

inline void lattice_rhs(const RadialKernel& kernel, const std::vector<cdouble>& top,
                        const std::vector<cdouble>& bot, std::vector<cdouble>& vt,
                        std::vector<cdouble>& vb) {
    const size_t n = top.size();
    const cdouble iu(0.0, 1.0);
    auto pair_vel = [&](cdouble from, cdouble to) {
        cdouble d = to - from;
        double r = std::abs(d);
        return iu * kernel.Gprime(r) * d / r;
    };
    for (size_t m = 0; m < n; ++m) {
        cdouble v(0.0, 0.0);
        for (size_t k = 0; k < n; ++k) {
            if (k != m) v += pair_vel(top[k], top[m]);
            v -= pair_vel(bot[k], top[m]);
        }
        vt[m] = v;
    }
    for (size_t m = 0; m < n; ++m) {
        cdouble v(0.0, 0.0);
        for (size_t k = 0; k < n; ++k) {
            v += pair_vel(top[k], bot[m]);
            if (k != m) v -= pair_vel(bot[k], bot[m]);
        }
        vb[m] = v;
    }
}

}  // namespace detail

// Classical fixed-step RK4 on the truncated first-order system. All
// 2(2K+1) points move freely; callers should read diagnostics only from the
// central points, where edge effects are smallest.
inline PointTrajectory simulate_street(const RadialKernel& kernel, const StreetGeometry& geom,
                                       long K, double dt, long steps, long record_every = 1) {
    geom.validate();
    if (K < 8) throw precondition_error("simulate_street: K >= 8 required");
    if (!(dt > 0.0)) throw precondition_error("simulate_street: dt must be > 0");

    const long n = 2 * K + 1;
    PointLatticeState st;
    st.K = K;
    st.top.resize(n);
    st.bottom.resize(n);
    for (long j = 0; j < n; ++j) {
        double k = static_cast<double>(j - K);
        st.top[j] = cdouble(k * geom.l, 0.0);
        st.bottom[j] = cdouble(geom.a + k * geom.l, -geom.h);
    }

    const double collision_tol = 1e-10 * geom.l;
    PointTrajectory traj;
    traj.states.push_back(st);
    cdouble start_center = st.top[K];

    std::vector<cdouble> k1t(n), k1b(n), k2t(n), k2b(n), k3t(n), k3b(n), k4t(n), k4b(n);
    std::vector<cdouble> tt(n), tb(n);

    auto min_gap = [&](const PointLatticeState& s) {
        double g = 1e300;
        for (long j = 0; j + 1 < n; ++j) {
            g = std::min(g, std::abs(s.top[j + 1] - s.top[j]));
            g = std::min(g, std::abs(s.bottom[j + 1] - s.bottom[j]));
        }
        for (long j = 0; j < n; ++j) g = std::min(g, std::abs(s.top[j] - s.bottom[j]));
        return g;
    };

    for (long step = 0; step < steps; ++step) {
        detail::lattice_rhs(kernel, st.top, st.bottom, k1t, k1b);
        for (long j = 0; j < n; ++j) {
            tt[j] = st.top[j] + 0.5 * dt * k1t[j];
            tb[j] = st.bottom[j] + 0.5 * dt * k1b[j];
        }
        detail::lattice_rhs(kernel, tt, tb, k2t, k2b);
        for (long j = 0; j < n; ++j) {
            tt[j] = st.top[j] + 0.5 * dt * k2t[j];
            tb[j] = st.bottom[j] + 0.5 * dt * k2b[j];
        }
        detail::lattice_rhs(kernel, tt, tb, k3t, k3b);
        for (long j = 0; j < n; ++j) {
            tt[j] = st.top[j] + dt * k3t[j];
            tb[j] = st.bottom[j] + dt * k3b[j];
        }
        detail::lattice_rhs(kernel, tt, tb, k4t, k4b);
        for (long j = 0; j < n; ++j) {
            st.top[j] += dt / 6.0 * (k1t[j] + 2.0 * k2t[j] + 2.0 * k3t[j] + k4t[j]);
            st.bottom[j] += dt / 6.0 * (k1b[j] + 2.0 * k2b[j] + 2.0 * k3b[j] + k4b[j]);
        }
        st.t += dt;
        if (min_gap(st) < collision_tol) {
            traj.states.push_back(st);
            throw convergence_error("simulate_street: point collision, state recorded",
                                    min_gap(st));
        }
        if ((step + 1) % record_every == 0 || step + 1 == steps) traj.states.push_back(st);
    }

    traj.drift_velocity = (st.top[K] - start_center) / st.t;
    traj.street_speed = street_speed_sum(kernel, geom, 1e-10).value;
    traj.drift_deviation = std::abs(traj.drift_velocity - traj.street_speed);
    return traj;
}

}  // namespace karman
