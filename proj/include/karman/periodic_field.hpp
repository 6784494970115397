#pragma once

// Periodic velocity fields induced by patch streets (vorticity +-1/pi on the
// two rows), evaluated through boundary integrals: the three equivalent Euler
// representations and the truncated lattice form for QGSW/gSQG.

#include <cmath>
#include <functional>
#include <vector>

#include "karman/boundary_map.hpp"
#include "karman/common.hpp"
#include "karman/kernels.hpp"
#include "karman/lattice.hpp"
#include "karman/quadrature.hpp"

namespace karman {

// Closed curve sampled uniformly in its parameter; dnodes holds d(node)/dtheta.
struct SampledBoundary {
    std::vector<cdouble> nodes;
    std::vector<cdouble> dnodes;

    int size() const { return static_cast<int>(nodes.size()); }

    static SampledBoundary from_circle(cdouble center, double radius, int M) {
        SampledBoundary b;
        b.nodes.resize(M);
        b.dnodes.resize(M);
        for (int j = 0; j < M; ++j) {
            cdouble w = std::polar(1.0, two_pi * j / M);
            b.nodes[j] = center + radius * w;
            b.dnodes[j] = radius * cdouble(0.0, 1.0) * w;
        }
        b.validate();
        return b;
    }

    static SampledBoundary from_ellipse(cdouble center, double ra, double rb, int M) {
        SampledBoundary b;
        b.nodes.resize(M);
        b.dnodes.resize(M);
        for (int j = 0; j < M; ++j) {
            double t = two_pi * j / M;
            b.nodes[j] = center + cdouble(ra * std::cos(t), rb * std::sin(t));
            b.dnodes[j] = cdouble(-ra * std::sin(t), rb * std::cos(t));
        }
        b.validate();
        return b;
    }

    // Unscaled patch boundary phi(T) of a boundary map.
    static SampledBoundary from_map(const BoundaryMap& map, int M) {
        SampledBoundary b;
        b.nodes.resize(M);
        b.dnodes.resize(M);
        for (int j = 0; j < M; ++j) {
            cdouble w = std::polar(1.0, two_pi * j / M);
            b.nodes[j] = map.phi(w);
            b.dnodes[j] = map.dphi(w) * cdouble(0.0, 1.0) * w;
        }
        b.validate();
        return b;
    }

    // Image of this boundary under z -> -z + shift (the partner row relation).
    SampledBoundary mirrored(cdouble shift) const {
        SampledBoundary b;
        b.nodes.resize(nodes.size());
        b.dnodes.resize(nodes.size());
        for (size_t j = 0; j < nodes.size(); ++j) {
            b.nodes[j] = -nodes[j] + shift;
            b.dnodes[j] = -dnodes[j];
        }
        return b;
    }

    void validate() const {
        int M = size();
        if (M < 16 || M % 2 != 0)
            throw precondition_error("SampledBoundary: M must be even and >= 16");
        // pairwise segment-intersection scan (desk scale)
        auto segs_intersect = [](cdouble a, cdouble b, cdouble c, cdouble d) {
            auto cross = [](cdouble u, cdouble v) {
                return u.real() * v.imag() - u.imag() * v.real();
            };
            double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
            double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
            return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
        };
        for (int i = 0; i < M; ++i) {
            cdouble a = nodes[i], b = nodes[(i + 1) % M];
            for (int j = i + 2; j < M; ++j) {
                if (i == 0 && j == M - 1) continue;  // adjacent around the wrap
                cdouble c = nodes[j], d = nodes[(j + 1) % M];
                if (segs_intersect(a, b, c, d))
                    throw precondition_error("SampledBoundary: curve self-intersects");
            }
        }
    }
};

namespace detail {

inline void require_off_boundary(cdouble x, const SampledBoundary& b) {
    for (const auto& n : b.nodes)
        if (std::abs(x - n) < 1e-8)
            throw precondition_error(
                "field evaluation point within 1e-8 of a boundary node; use the on-boundary "
                "routines");
}

}  // namespace detail

// Prop-style representation (1): two log|sin| boundary integrals.
inline cdouble euler_velocity_logsin(cdouble x, const SampledBoundary& b1,
                                     const SampledBoundary& b2, double l) {
    detail::require_off_boundary(x, b1);
    detail::require_off_boundary(x, b2);
    cdouble s1(0.0, 0.0), s2(0.0, 0.0);
    for (int j = 0; j < b1.size(); ++j)
        s1 += log_abs_sin(pi * (x - b1.nodes[j]) / l) * b1.dnodes[j];
    for (int j = 0; j < b2.size(); ++j)
        s2 += log_abs_sin(pi * (x - b2.nodes[j]) / l) * b2.dnodes[j];
    return -(two_pi / b1.size()) * s1 / (2.0 * pi * pi) +
           (two_pi / b2.size()) * s2 / (2.0 * pi * pi);
}

// Representation (3): the same value with ln|sin| split into ln|pi(x-xi)/l| +
// ln|H(pi(x-xi)/l)|; the solver consumes this split, and the two pieces are
// returned for tests.
struct DecomposedVelocity {
    cdouble total{0.0, 0.0};
    cdouble log_part{0.0, 0.0};
    cdouble sinc_part{0.0, 0.0};
};

inline DecomposedVelocity decomposed_velocity(cdouble x, const SampledBoundary& b1,
                                              const SampledBoundary& b2, double l) {
    detail::require_off_boundary(x, b1);
    detail::require_off_boundary(x, b2);
    DecomposedVelocity out;
    auto add = [&](const SampledBoundary& b, double sign) {
        cdouble slog(0.0, 0.0), ssinc(0.0, 0.0);
        for (int j = 0; j < b.size(); ++j) {
            cdouble zeta = pi * (x - b.nodes[j]) / l;
            slog += std::log(std::abs(zeta)) * b.dnodes[j];
            ssinc += log_abs_sinc(zeta) * b.dnodes[j];
        }
        double c = sign * (two_pi / b.size()) / (2.0 * pi * pi);
        out.log_part += c * slog;
        out.sinc_part += c * ssinc;
    };
    add(b1, -1.0);
    add(b2, +1.0);
    out.total = out.log_part + out.sinc_part;
    return out;
}

// Star-shaped patch for the area-quadrature cross-check of representation (2).
struct PolarPatch {
    cdouble center{0.0, 0.0};
    std::function<double(double)> radius;  // R(phi) > 0

    static PolarPatch circle(cdouble c, double r) {
        return {c, [r](double) { return r; }};
    }
    static PolarPatch ellipse(cdouble c, double ra, double rb) {
        return {c, [ra, rb](double t) {
                    double ct = std::cos(t), st = std::sin(t);
                    return ra * rb / std::sqrt(rb * rb * ct * ct + ra * ra * st * st);
                }};
    }
};

// Representation (2): conjugated cotangent area integrals on polar grids.
// Test oracle only; x must lie outside both patch closures.
inline cdouble euler_velocity_cot(cdouble x, const PolarPatch& p1, const PolarPatch& p2,
                                  double l, int nr = 64, int nphi = 256) {
    static const cdouble iu(0.0, 1.0);
    GaussLegendre gl(nr);
    auto patch_integral = [&](const PolarPatch& p) {
        cdouble acc(0.0, 0.0);
        for (int k = 0; k < nphi; ++k) {
            double t = two_pi * k / nphi;
            double R = p.radius(t);
            for (int q = 0; q < nr; ++q) {
                double u = 0.5 * (gl.x[q] + 1.0);  // radial fraction in (0,1)
                double wq = 0.5 * gl.w[q];
                cdouble y = p.center + u * R * std::polar(1.0, t);
                cdouble zeta = pi * (x - y) / l;
                cdouble cot = std::cos(zeta) / std::sin(zeta);
                acc += wq * (two_pi / nphi) * u * R * R * cot;
            }
        }
        return acc;
    };
    cdouble I1 = patch_integral(p1), I2 = patch_integral(p2);
    return iu / (2.0 * l * pi) * std::conj(I1 - I2);
}

// General-kernel lattice velocity via the periodized row kernel.
inline cdouble lattice_velocity(const RadialKernel& kernel, cdouble x,
                                const SampledBoundary& b1, const SampledBoundary& b2,
                                const StreetGeometry& geom, double tol,
                                int gsqg_images = 128) {
    geom.validate();
    if (!(tol > 0.0)) throw precondition_error("lattice_velocity: tol must be > 0");
    detail::require_off_boundary(x, b1);
    detail::require_off_boundary(x, b2);
    RowLattice lat(kernel, geom.l, gsqg_images);
    cdouble s1(0.0, 0.0), s2(0.0, 0.0);
    for (int j = 0; j < b1.size(); ++j) s1 += lat.periodized(x - b1.nodes[j]) * b1.dnodes[j];
    for (int j = 0; j < b2.size(); ++j) s2 += lat.periodized(x - b2.nodes[j]) * b2.dnodes[j];
    return -(two_pi / b1.size()) * s1 / pi + (two_pi / b2.size()) * s2 / pi;
}

// Rectangular field sampling for the CLI: returns rows (x, y, u, v).
struct FieldSample {
    double x, y, u, v;
};

inline std::vector<FieldSample> sample_field_grid(
    const RadialKernel& kernel, const SampledBoundary& b1, const SampledBoundary& b2,
    const StreetGeometry& geom, double x0, double x1, int nx, double y0, double y1, int ny) {
    std::vector<FieldSample> out;
    out.reserve(static_cast<size_t>(nx) * ny);
    for (int i = 0; i < nx; ++i) {
        double xv = nx > 1 ? x0 + (x1 - x0) * i / (nx - 1) : x0;
        for (int j = 0; j < ny; ++j) {
            double yv = ny > 1 ? y0 + (y1 - y0) * j / (ny - 1) : y0;
            cdouble p(xv, yv);
            cdouble v = kernel.kind() == KernelKind::euler_log
                            ? euler_velocity_logsin(p, b1, b2, geom.l)
                            : lattice_velocity(kernel, p, b1, b2, geom, 1e-10);
            out.push_back({xv, yv, v.real(), v.imag()});
        }
    }
    return out;
}

}  // namespace karman
