#pragma once

// Contour dynamics for a solved patch street: advect the sampled boundary of
// the representative patch (and its independently evolved partner row) with
// the full street velocity, recording area/centroid/shape diagnostics. This
// is the dynamical check that a solved street rigidly translates at its V.

#include <algorithm>
#include <cmath>
#include <vector>

#include "karman/common.hpp"
#include "karman/kernels.hpp"
#include "karman/lattice.hpp"
#include "karman/parallel.hpp"
#include "karman/quadrature.hpp"
#include "karman/solver.hpp"

namespace karman {

struct ContourState {
    std::vector<cdouble> nodes;  // positively oriented closed curve
    double t = 0.0;

    int size() const { return static_cast<int>(nodes.size()); }

    // Shoelace area; positive for counterclockwise node order.
    double area() const {
        double s = 0.0;
        int M = size();
        for (int j = 0; j < M; ++j) {
            const cdouble& a = nodes[j];
            const cdouble& b = nodes[(j + 1) % M];
            s += a.real() * b.imag() - b.real() * a.imag();
        }
        return 0.5 * s;
    }

    cdouble centroid() const {
        double A = area();
        cdouble c(0.0, 0.0);
        int M = size();
        for (int j = 0; j < M; ++j) {
            const cdouble& a = nodes[j];
            const cdouble& b = nodes[(j + 1) % M];
            double cross = a.real() * b.imag() - b.real() * a.imag();
            c += (a + b) * cross;
        }
        return c / (6.0 * A);
    }

    void spacing(double& mn, double& mx) const {
        mn = 1e300;
        mx = 0.0;
        int M = size();
        for (int j = 0; j < M; ++j) {
            double d = std::abs(nodes[(j + 1) % M] - nodes[j]);
            mn = std::min(mn, d);
            mx = std::max(mx, d);
        }
    }
};

// The physical street: top patch boundary (vorticity q0 = 1/(pi eps^2)) and
// the partner row boundary, generated by the symmetry map at t = 0 and
// evolved independently afterwards.
struct StreetContours {
    ContourState top, bottom;
    double patch_vorticity = 0.0;
};

inline StreetContours make_street_contours(const StreetSolution& sol, int M) {
    RadialKernel kernel = sol.kernel();
    BoundaryMap map(kernel, sol.eps, sol.coeffs);
    StreetContours sc;
    sc.top.nodes.resize(M);
    sc.bottom.nodes.resize(M);
    for (int j = 0; j < M; ++j) {
        cdouble w = std::polar(1.0, two_pi * j / M);
        cdouble y = sol.eps * map.phi(w);
        sc.top.nodes[j] = y;
        sc.bottom.nodes[j] = -y + sol.geom.bottom_offset();
    }
    sc.patch_vorticity = 1.0 / (pi * sol.eps * sol.eps);
    return sc;
}

namespace detail {

struct CurveQuadrature {
    // Per-contour precomputation for one velocity evaluation.
    std::vector<cdouble> dnodes;  // spectral d(node)/ds

    explicit CurveQuadrature(const ContourState& c) { dnodes = spectral_derivative(c.nodes); }
};

// oint_C P(x - y) dy with P the periodized row kernel; self = index of x in
// the contour's own nodes (or -1 when x is off this contour). The singular
// self term is handled with the log / power product weights in the curve
// parameter.
inline cdouble contour_integral(const RadialKernel& kernel, const RowLattice& lat,
                                const ContourState& c, const CurveQuadrature& q,
                                const std::vector<double>& Wlog,
                                const std::vector<double>& Wpow, cdouble x, int self) {
    const int M = c.size();
    const double dtheta = two_pi / M;
    cdouble acc(0.0, 0.0);
    if (self < 0) {
        for (int j = 0; j < M; ++j) acc += dtheta * lat.periodized(x - c.nodes[j]) * q.dnodes[j];
        return acc;
    }
    const bool power = kernel.kind() == KernelKind::gsqg_power;
    const bool qgsw = kernel.kind() == KernelKind::qgsw_bessel;
    const double lam = kernel.lambda();
    for (int j = 0; j < M; ++j) {
        cdouble dy = x - c.nodes[j];
        double dist = std::abs(dy);
        // smooth ratio |x - y| / (2|sin((s_i - s)/2)|), -> |y'(s_i)| on the diagonal
        double chord = 2.0 * std::abs(std::sin(0.5 * dtheta * (self - j)));
        double ratio = (j == self) ? std::abs(q.dnodes[self]) : dist / chord;
        int d = (self - j + M) % M;
        // lattice images beyond the central one are smooth
        acc += dtheta * lat.images_minus_center(dy) * q.dnodes[j];
        if (!power) {
            acc += (Wlog[d] * q.dnodes[j] + dtheta * std::log(ratio) * q.dnodes[j]) / two_pi;
            if (qgsw && j != self) {
                auto sp = qgsw_smooth_part_split(lam * dist);
                double smooth_log = std::log(ratio) + std::log(lam);
                acc -= (Wlog[d] * sp.log_factor * q.dnodes[j] +
                        dtheta * (smooth_log * sp.log_factor + sp.regular) * q.dnodes[j]) /
                       two_pi;
            }
        } else {
            double cG = kernel.power_prefactor();
            acc += cG * Wpow[d] * std::pow(ratio, -kernel.beta()) * q.dnodes[j];
        }
    }
    return acc;
}

}  // namespace detail

struct StreetVelocities {
    std::vector<cdouble> top, bottom;
};

// Velocity of the full street at every node of both contours.
inline StreetVelocities boundary_velocity(const RadialKernel& kernel,
                                          const StreetGeometry& geom,
                                          const StreetContours& sc, int gsqg_images = 64) {
    geom.validate();
    const int Mt = sc.top.size(), Mb = sc.bottom.size();
    if (Mt < 16 || Mt % 2 != 0 || Mb < 16 || Mb % 2 != 0)
        throw precondition_error("boundary_velocity: node counts must be even and >= 16");
    double mn, mx;
    sc.top.spacing(mn, mx);
    if (mx > 5.0 * mn)
        throw precondition_error("boundary_velocity: node spacing degenerate, remesh required");
    sc.bottom.spacing(mn, mx);
    if (mx > 5.0 * mn)
        throw precondition_error("boundary_velocity: node spacing degenerate, remesh required");

    RowLattice lat(kernel, geom.l, gsqg_images);
    detail::CurveQuadrature qt(sc.top), qb(sc.bottom);
    std::vector<double> Wlog_t = log_kernel_weights(Mt);
    std::vector<double> Wlog_b = Mt == Mb ? Wlog_t : log_kernel_weights(Mb);
    std::vector<double> Wpow_t, Wpow_b;
    if (kernel.kind() == KernelKind::gsqg_power) {
        Wpow_t = power_kernel_weights(kernel.beta(), Mt);
        Wpow_b = Mt == Mb ? Wpow_t : power_kernel_weights(kernel.beta(), Mb);
    }

    const double q0 = sc.patch_vorticity;
    StreetVelocities out;
    out.top.resize(Mt);
    out.bottom.resize(Mb);
    parallel_for(static_cast<std::size_t>(Mt + Mb), [&](std::size_t k) {
        if (k < static_cast<std::size_t>(Mt)) {
            int i = static_cast<int>(k);
            cdouble x = sc.top.nodes[i];
            cdouble v = -detail::contour_integral(kernel, lat, sc.top, qt, Wlog_t, Wpow_t, x, i) +
                        detail::contour_integral(kernel, lat, sc.bottom, qb, Wlog_b, Wpow_b, x, -1);
            out.top[i] = q0 * v;
        } else {
            int i = static_cast<int>(k) - Mt;
            cdouble x = sc.bottom.nodes[i];
            cdouble v = -detail::contour_integral(kernel, lat, sc.top, qt, Wlog_t, Wpow_t, x, -1) +
                        detail::contour_integral(kernel, lat, sc.bottom, qb, Wlog_b, Wpow_b, x, i);
            out.bottom[i] = q0 * v;
        }
    });
    return out;
}

// Velocity one periodic row of patches induces at its own boundary nodes;
// a lone row is stationary, so this should be purely tangential.
inline std::vector<cdouble> single_row_patch_velocity(const RadialKernel& kernel, double period,
                                                      const ContourState& c, double q0,
                                                      int gsqg_images = 64) {
    const int M = c.size();
    RowLattice lat(kernel, period, gsqg_images);
    detail::CurveQuadrature q(c);
    std::vector<double> Wlog = log_kernel_weights(M);
    std::vector<double> Wpow;
    if (kernel.kind() == KernelKind::gsqg_power)
        Wpow = power_kernel_weights(kernel.beta(), M);
    std::vector<cdouble> v(M);
    for (int i = 0; i < M; ++i)
        v[i] = -q0 * detail::contour_integral(kernel, lat, c, q, Wlog, Wpow, c.nodes[i], i);
    return v;
}

// Outward-normal flux residual Re[conj(v - V) n] at the top contour nodes.
inline std::vector<double> boundary_flux(const RadialKernel& kernel, const StreetGeometry& geom,
                                         const StreetContours& sc, double V,
                                         int gsqg_images = 64) {
    StreetVelocities vel = boundary_velocity(kernel, geom, sc, gsqg_images);
    auto dn = spectral_derivative(sc.top.nodes);
    std::vector<double> flux(sc.top.size());
    for (int j = 0; j < sc.top.size(); ++j) {
        cdouble tangent = dn[j] / std::abs(dn[j]);
        cdouble normal = -cdouble(0.0, 1.0) * tangent;  // outward for CCW curves
        flux[j] = (std::conj(vel.top[j] - V) * normal).real();
    }
    return flux;
}

struct EvolveRecord {
    double t = 0.0;
    double area = 0.0;
    cdouble centroid{0.0, 0.0};
    double shape_dev = 0.0;  // co-moving max node distance to the initial contour
    double sym_dev = 0.0;    // drift of the partner row from the exact mirror
};

struct EvolveResult {
    std::vector<StreetContours> snapshots;
    std::vector<EvolveRecord> records;
};

namespace detail {

inline double point_to_polyline(cdouble p, const std::vector<cdouble>& poly) {
    double best = 1e300;
    int M = static_cast<int>(poly.size());
    for (int j = 0; j < M; ++j) {
        cdouble a = poly[j], b = poly[(j + 1) % M];
        cdouble ab = b - a;
        double t = ((p - a) * std::conj(ab)).real() / std::norm(ab);
        t = std::clamp(t, 0.0, 1.0);
        best = std::min(best, std::abs(p - (a + t * ab)));
    }
    return best;
}

inline bool polyline_self_intersects(const std::vector<cdouble>& poly) {
    auto cross = [](cdouble u, cdouble v) { return u.real() * v.imag() - u.imag() * v.real(); };
    int M = static_cast<int>(poly.size());
    for (int i = 0; i < M; ++i) {
        cdouble a = poly[i], b = poly[(i + 1) % M];
        for (int j = i + 2; j < M; ++j) {
            if (i == 0 && j == M - 1) continue;
            cdouble c = poly[j], d = poly[(j + 1) % M];
            double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
            double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
            if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return true;
        }
    }
    return false;
}

}  // namespace detail

inline EvolveResult evolve(const RadialKernel& kernel, const StreetGeometry& geom,
                           StreetContours sc, double dt, long steps, long record_every = 1,
                           int gsqg_images = 64) {
    if (!(dt > 0.0)) throw precondition_error("evolve: dt must be > 0");
    const int Mt = sc.top.size(), Mb = sc.bottom.size();

    {
        StreetVelocities v0 = boundary_velocity(kernel, geom, sc, gsqg_images);
        double vmax = 0.0;
        for (const auto& v : v0.top) vmax = std::max(vmax, std::abs(v));
        double mn, mx;
        sc.top.spacing(mn, mx);
        if (dt * vmax >= 0.25 * mn)
            throw precondition_error("evolve: dt too large for the node spacing (dt*|v| >= h/4)");
    }

    const std::vector<cdouble> initial_top = sc.top.nodes;
    const cdouble c0 = sc.top.centroid();
    const cdouble mirror_shift = geom.bottom_offset();

    EvolveResult out;
    auto record = [&]() {
        EvolveRecord r;
        r.t = sc.top.t;
        r.area = sc.top.area();
        r.centroid = sc.top.centroid();
        cdouble drift = r.centroid - c0;
        double sd = 0.0;
        for (const auto& p : sc.top.nodes)
            sd = std::max(sd, detail::point_to_polyline(p - drift, initial_top));
        r.shape_dev = sd;
        // Both rows translate with the street, so the exact partner of the
        // evolved top contour is -top + offset + 2*drift; nodes drift
        // tangentially, so compare as point sets, not index by index.
        std::vector<cdouble> mirror(Mt);
        for (int j = 0; j < Mt; ++j)
            mirror[j] = -sc.top.nodes[j] + mirror_shift + 2.0 * drift;
        double symd = 0.0;
        for (int j = 0; j < Mb; ++j)
            symd = std::max(symd, detail::point_to_polyline(sc.bottom.nodes[j], mirror));
        r.sym_dev = symd;
        out.records.push_back(r);
        out.snapshots.push_back(sc);
    };
    record();

    auto rhs = [&](const StreetContours& s) {
        return boundary_velocity(kernel, geom, s, gsqg_images);
    };
    auto advanced = [&](const StreetContours& s, const StreetVelocities& v, double h) {
        StreetContours n = s;
        for (int j = 0; j < Mt; ++j) n.top.nodes[j] = s.top.nodes[j] + h * v.top[j];
        for (int j = 0; j < Mb; ++j) n.bottom.nodes[j] = s.bottom.nodes[j] + h * v.bottom[j];
        return n;
    };

    for (long step = 0; step < steps; ++step) {
        StreetVelocities k1 = rhs(sc);
        StreetContours s2 = advanced(sc, k1, 0.5 * dt);
        StreetVelocities k2 = rhs(s2);
        StreetContours s3 = advanced(sc, k2, 0.5 * dt);
        StreetVelocities k3 = rhs(s3);
        StreetContours s4 = advanced(sc, k3, dt);
        StreetVelocities k4 = rhs(s4);
        for (int j = 0; j < Mt; ++j)
            sc.top.nodes[j] += dt / 6.0 * (k1.top[j] + 2.0 * k2.top[j] + 2.0 * k3.top[j] + k4.top[j]);
        for (int j = 0; j < Mb; ++j)
            sc.bottom.nodes[j] +=
                dt / 6.0 * (k1.bottom[j] + 2.0 * k2.bottom[j] + 2.0 * k3.bottom[j] + k4.bottom[j]);
        sc.top.t += dt;
        sc.bottom.t = sc.top.t;

        double mn, mx;
        sc.top.spacing(mn, mx);
        if (mx > 5.0 * mn) {
            record();
            throw convergence_error("evolve: node spacing degenerated, state recorded", mx / mn);
        }
        if ((step + 1) % record_every == 0 || step + 1 == steps) {
            if (detail::polyline_self_intersects(sc.top.nodes) ||
                detail::polyline_self_intersects(sc.bottom.nodes)) {
                record();
                throw convergence_error("evolve: contour crossed itself, state recorded", 0.0);
            }
            record();
        }
    }
    return out;
}

}  // namespace karman
