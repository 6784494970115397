#pragma once

// The boundary functional of the patch street.
//
// For a boundary map phi(w) = i(w + sigma(eps) f(w)) the velocity of the
// eps-scaled street evaluated on the representative boundary is
//
//   I(eps,f)(w) = -(1/(pi eps)) [ oint S1row(eps(phi(w)-phi(xi))) phi'(xi) dxi
//                               + oint S2row(eps(phi(w)+phi(xi)) - a + ih) phi'(xi) dxi ]
//
// with S1row/S2row the periodized row kernels, and the translating-street
// residual is F(eps,f,V)(w) = Re[(conj I - V) w phi'(w)], projected onto
// sin(n theta), n >= 2, after V is fixed by the quotient that kills the
// first sine mode.
//
// The self-interaction term of I carries the only singular quadrature: the
// log kernels use Kussmaul-Martensen weights on ln|w-xi| after splitting off
// the smooth ratio ln|dphi/dw| (plus the g0 part of K0 for QGSW, itself split
// as ln(z)A(z)+B(z)); the power kernel uses product weights for |w-xi|^-beta
// against the smooth factor |dphi/dw|^-beta.
//
// I also carries a term proportional to w/eps (the leading self-patch field,
// -w/(2 pi eps) for the log kernels). Its contribution to F reduces exactly
// to a multiple of Im[f'(w)], so the evaluation works with the reduced
// velocity I_red = I - sing_coeff(eps) w and adds that closed-form term back;
// this keeps every intermediate O(1) as eps -> 0. At eps = 0 the analytic
// limit expressions are used instead, so the continuation can start exactly
// at the point-vortex solution.

#include <algorithm>
#include <cmath>
#include <vector>

#include "karman/boundary_map.hpp"
#include "karman/common.hpp"
#include "karman/kernels.hpp"
#include "karman/lattice.hpp"
#include "karman/parallel.hpp"
#include "karman/point_street.hpp"
#include "karman/quadrature.hpp"

namespace karman {

// Y-space projection: entry j holds the coefficient of sin((j+2) theta).
struct ResidualModes {
    std::vector<double> modes;

    double max_abs() const {
        double m = 0.0;
        for (double v : modes) m = std::max(m, std::abs(v));
        return m;
    }
};

struct FunctionalDiagnostics {
    double symmetry_defect = 0.0;    // max |F(theta) + F(-theta)| after projection
    double velocity_defect = 0.0;    // raw max |I(w) - conj(I(conj w))| (pre-projection)
    double first_sine_mode = 0.0;    // sin(theta) coefficient before exclusion
    double max_cosine_mode = 0.0;
    double imag_V = 0.0;
};

struct H6Result {
    cdouble lambda{0.0, 0.0};  // Lambda_n
    cdouble part1{0.0, 0.0};   // n oint G(|1-xi|)(1 - conj(xi)^{n+1}) dxi
    cdouble part2{0.0, 0.0};   // -i oint G'(|1-xi|)/|1-xi| Im[(1-xi)(1-xi^n)] dxi
    bool nonzero = false;      // |lambda| > 1e-10 verdict
};

class StreetFunctional {
  public:
    StreetFunctional(const RadialKernel& kernel, const StreetGeometry& geom, int N, int M,
                     int gsqg_images = 64)
        : kernel_(kernel),
          geom_(geom),
          N_(N),
          M_(M),
          grid_(M),
          lattice_(kernel, geom.l, gsqg_images),
          gsqg_images_(gsqg_images) {
        geom_.validate();
        if (!geom_.symmetric_stagger())
            throw precondition_error(
                "StreetFunctional: stagger must be 0 or l/2 (real-coefficient ansatz)");
        if (N_ < 1) throw precondition_error("StreetFunctional: N >= 1 required");
        if (M_ < 4 * N_ || M_ % 2 != 0)
            throw precondition_error("StreetFunctional: M must be even and >= 4N");
        Wlog_ = log_kernel_weights(M_);
        if (kernel_.kind() == KernelKind::gsqg_power) {
            Wpow_ = power_kernel_weights(kernel_.beta(), M_);
            m_beta_ = two_pi * power_kernel_moments(kernel_.beta(), 1)[1];
        }
        V0_ = street_speed_sum(kernel_, geom_, 1e-12).value.real();
    }

    const RadialKernel& kernel() const { return kernel_; }
    const StreetGeometry& geom() const { return geom_; }
    int modes_count() const { return N_; }
    int grid_size() const { return M_; }
    double point_speed() const { return V0_; }

    BoundaryMap make_map(double eps, std::vector<double> coeffs) const {
        return BoundaryMap(kernel_, eps, std::move(coeffs));
    }

    // Velocity values I(eps,f)(w_j) on the grid. For eps > 0 this is the full
    // velocity including the singular self-patch part; at eps = 0 it is the
    // finite part of the analytic limit (the w/eps term is excluded there and
    // enters the residual through its exact Im[f'] reduction).
    std::vector<cdouble> I_eval(const BoundaryMap& map) const {
        Evaluation ev = evaluate(map);
        if (map.eps() > 0.0) {
            double c = sing_coeff(map.eps());
            for (int j = 0; j < M_; ++j) ev.I_red[j] += c * grid_.w[j];
        }
        return std::move(ev.I_red);
    }

    // Translation speed functional V(eps, f).
    double V_of(const BoundaryMap& map) const { return evaluate(map).V; }

    ResidualModes residual_F(const BoundaryMap& map,
                             FunctionalDiagnostics* diag_out = nullptr) const {
        Evaluation ev = evaluate(map);
        if (diag_out) *diag_out = ev.diag;
        return std::move(ev.modes);
    }

    // Pointwise residual samples F(w_j); used by tests and diagnostics.
    std::vector<double> residual_nodes(const BoundaryMap& map) const {
        return evaluate(map).F;
    }

    // Predicted diagonal of the linearization at (eps, f) = (0, 0) for the
    // log-type kernels: perturbing a_n excites sin((n+1) theta) with
    // coefficient +n/(2 pi). (The QGSW linearization coincides with Euler's.)
    static double linearized_modes_euler(int n) {
        if (n < 1) throw precondition_error("linearized_modes_euler: n >= 1");
        return n / two_pi;
    }

    // Lambda_n of hypothesis (H6), by singular product quadrature.
    H6Result h6_coefficient(int n) const {
        if (kernel_.kind() != KernelKind::gsqg_power)
            throw precondition_error("h6_coefficient: power kernel only");
        if (n < 1) throw precondition_error("h6_coefficient: n >= 1");
        const double cG = kernel_.power_prefactor();
        const double beta = kernel_.beta();
        H6Result res;
        cdouble t1(0.0, 0.0), t2(0.0, 0.0);
        for (int j = 0; j < M_; ++j) {
            cdouble xi = grid_.w[j];
            cdouble dxi = cdouble(0.0, 1.0) * xi;
            double Wj = Wpow_[(M_ - j) % M_];  // distance index (0 - j) mod M
            // (1 - xi^n)/(1 - xi) summed directly for stability at xi = 1
            cdouble p(0.0, 0.0), xk(1.0, 0.0);
            for (int m = 0; m < n; ++m) {
                p += xk;
                xk *= xi;
            }
            t1 += Wj * cG * (1.0 - std::pow(std::conj(xi), n + 1)) * dxi;
            t2 += Wj * beta * cG * (xi * p).imag() * dxi;
        }
        res.part1 = static_cast<double>(n) * t1;
        res.part2 = cdouble(0.0, -1.0) * t2;
        res.lambda = res.part1 + res.part2;
        res.nonzero = std::abs(res.lambda) > 1e-10;
        return res;
    }

    // Predicted FD-Jacobian diagonal entry (input mode n -> sine mode n+1) at
    // the eps = 0 branch point.
    double linearized_diag_prediction(int n) const {
        if (kernel_.kind() == KernelKind::gsqg_power)
            return -(2.0 / kernel_.c_beta()) * h6_coefficient(n).lambda.imag();
        return linearized_modes_euler(n);
    }

    // Quadrature self-check: rebuilds the functional at 2M and returns the
    // max difference of the residual modes. Throws accuracy_error above tol.
    double verify_quadrature(const BoundaryMap& map, double tol) const {
        StreetFunctional fine(kernel_, geom_, N_, 2 * M_, gsqg_images_);
        ResidualModes a = residual_F(map);
        ResidualModes b = fine.residual_F(map);
        double d = 0.0;
        for (int k = 0; k < N_; ++k) d = std::max(d, std::abs(a.modes[k] - b.modes[k]));
        if (d > tol)
            throw accuracy_error("quadrature self-convergence check failed: defect " +
                                 std::to_string(d));
        return d;
    }

  private:
    struct Evaluation {
        std::vector<cdouble> I_red;
        std::vector<double> F;
        ResidualModes modes;
        double V = 0.0;
        FunctionalDiagnostics diag;
    };

    // Coefficient of w in the subtracted singular velocity part.
    double sing_coeff(double eps) const {
        if (kernel_.kind() == KernelKind::gsqg_power)
            return kernel_.G(eps) * m_beta_ / (pi * eps);
        return -1.0 / (two_pi * eps);
    }

    Evaluation evaluate(const BoundaryMap& map) const {
        return map.eps() > 0.0 ? evaluate_positive(map) : evaluate_limit(map);
    }

    Evaluation evaluate_positive(const BoundaryMap& map) const {
        const double eps = map.eps();
        const double sigma = map.sigma();
        const cdouble iu(0.0, 1.0);
        const cdouble offset = -geom_.a + cdouble(0.0, geom_.h);
        const double dtheta = grid_.dtheta();
        const bool qgsw = kernel_.kind() == KernelKind::qgsw_bessel;
        const bool power = kernel_.kind() == KernelKind::gsqg_power;
        const double lam = kernel_.lambda();

        std::vector<cdouble> fv(M_), fpv(M_), phi(M_), dphi(M_);
        for (int j = 0; j < M_; ++j) {
            fv[j] = map.f(grid_.w[j]);
            fpv[j] = map.fprime(grid_.w[j]);
            phi[j] = iu * (grid_.w[j] + sigma * fv[j]);
            dphi[j] = iu * (1.0 + sigma * fpv[j]);
        }

        if (qgsw) {
            // the g0 series is used at lam*eps*|dphi| <= 1
            double reach = lam * eps * 2.0 * (1.0 + map.guard_norm());
            if (reach > 1.0)
                throw precondition_error(
                    "StreetFunctional: lambda*eps too large for the K0 smooth-part series");
        }
        {
            double reach = 2.0 * eps * (1.0 + map.guard_norm());
            if (reach >= std::abs(geom_.h) || reach >= 0.5 * geom_.l)
                throw precondition_error(
                    "StreetFunctional: eps too large for the row separation/period");
        }

        const double Geps = power ? kernel_.G(eps) : 0.0;
        // subtracting the eps=0 value of the row-2 kernel keeps the summand
        // O(eps), so the 1/eps in I_red does not amplify rounding noise
        const double S2ref = lattice_.periodized(offset);
        Evaluation ev;
        ev.I_red.assign(M_, cdouble(0.0, 0.0));

        parallel_for(static_cast<std::size_t>(M_), [&](std::size_t ii) {
            const int i = static_cast<int>(ii);
            const cdouble wi = grid_.w[i];
            const cdouble phii = phi[i];
            cdouble T1(0.0, 0.0), T2(0.0, 0.0);
            for (int j = 0; j < M_; ++j) {
                const cdouble wj = grid_.w[j];
                const cdouble dxi = iu * wj;  // d xi / d theta
                const cdouble pj = dphi[j];
                const cdouble dph = phii - phi[j];
                const cdouble ratio =
                    (i == j) ? pj : dph / (wi - wj);
                const double Wd = Wlog_[(i - j + M_) % M_];

                // row 1: k = 0 reduced singular part
                if (!power) {
                    // (1/2pi)[ KM(ln|w-xi|; i sigma f') + trap(ln|dphi/dw| phi') ]
                    T1 += (Wd * (iu * (sigma * fpv[j])) * dxi +
                           dtheta * std::log(std::abs(ratio)) * pj * dxi) /
                          two_pi;
                    if (qgsw && i != j) {
                        // -(1/2pi) oint g0(lam eps |dphi|) phi' dxi,
                        // g0(z) = ln(z) A(z) + B(z), ln z = ln|w-xi| + ln|ratio| + ln(lam eps);
                        // the diagonal contributes nothing since A, B = O(z^2)
                        auto sp = qgsw_smooth_part_split(lam * eps * std::abs(dph));
                        double smooth_log = std::log(std::abs(ratio)) + std::log(lam * eps);
                        T1 -= (Wd * sp.log_factor * pj * dxi +
                               dtheta * (smooth_log * sp.log_factor + sp.regular) * pj * dxi) /
                              two_pi;
                    }
                } else {
                    // G(eps) * PW(|w-xi|^-beta ; s phi' - i), s = |dphi/dw|^-beta
                    const double Wp = Wpow_[(i - j + M_) % M_];
                    double s = std::pow(std::abs(ratio), -kernel_.beta());
                    T1 += Geps * Wp * (s * pj - iu) * dxi;
                }

                // row 1: images k != 0
                T1 += dtheta * lattice_.images_minus_center(eps * dph) * pj * dxi;

                // row 2: all images
                T2 += dtheta * (lattice_.periodized(eps * (phii + phi[j]) + offset) - S2ref) *
                      pj * dxi;
            }
            ev.I_red[i] = -(T1 + T2) / (pi * eps);
        });

        finalize(map, ev);
        return ev;
    }

    // Analytic eps = 0 branch: I is the finite part of the limit,
    //   log kernels : I0 = V0 - (i/2pi^2)[ oint ln|w-xi| f'(xi) dxi
    //                                    + oint Re[(f(w)-f(xi))/(w-xi)] dxi ]
    //   power kernel: I0 = V0 - (i/pi) [ oint |w-xi|^-beta (-beta Re q) dxi
    //                                  + oint |w-xi|^-beta f'(xi) dxi ],
    // with q = (f(w)-f(xi))/(w-xi) and the power kernel normalized to r^-beta
    // (the G(eps r)/G(eps) limit of the scaling hypotheses).
    Evaluation evaluate_limit(const BoundaryMap& map) const {
        const cdouble iu(0.0, 1.0);
        const double dtheta = grid_.dtheta();
        const bool power = kernel_.kind() == KernelKind::gsqg_power;

        std::vector<cdouble> fv(M_), fpv(M_);
        for (int j = 0; j < M_; ++j) {
            fv[j] = map.f(grid_.w[j]);
            fpv[j] = map.fprime(grid_.w[j]);
        }

        Evaluation ev;
        ev.I_red.assign(M_, cdouble(0.0, 0.0));
        parallel_for(static_cast<std::size_t>(M_), [&](std::size_t ii) {
            const int i = static_cast<int>(ii);
            const cdouble wi = grid_.w[i];
            cdouble acc(0.0, 0.0);
            for (int j = 0; j < M_; ++j) {
                const cdouble wj = grid_.w[j];
                const cdouble dxi = iu * wj;
                const cdouble q = (i == j) ? fpv[i] : (fv[i] - fv[j]) / (wi - wj);
                if (!power) {
                    double Wd = Wlog_[(i - j + M_) % M_];
                    acc += Wd * fpv[j] * dxi + dtheta * q.real() * dxi;
                } else {
                    double Wp = Wpow_[(i - j + M_) % M_];
                    acc += Wp * (fpv[j] - kernel_.beta() * q.real()) * dxi;
                }
            }
            ev.I_red[i] = V0_ - (power ? iu / pi : iu / (2.0 * pi * pi)) * acc;
        });

        finalize(map, ev);
        return ev;
    }

    void finalize(const BoundaryMap& map, Evaluation& ev) const {
        const cdouble iu(0.0, 1.0);
        const double dtheta = grid_.dtheta();
        const double sigma = map.sigma();

        std::vector<cdouble> fpv(M_), dphi(M_);
        for (int j = 0; j < M_; ++j) {
            fpv[j] = map.fprime(grid_.w[j]);
            dphi[j] = iu * (1.0 + sigma * fpv[j]);
        }

        // The exact velocity satisfies I(conj w) = conj(I(w)); the computed
        // values break it only through rounding (amplified by 1/eps at small
        // eps). Assert the raw defect, then project onto the symmetry class
        // so V and F inherit their reality/oddness exactly.
        double iscale = 1.0, idefect = 0.0;
        for (int j = 0; j < M_; ++j) iscale = std::max(iscale, std::abs(ev.I_red[j]));
        for (int j = 0; j <= M_ / 2; ++j) {
            int k = (M_ - j) % M_;
            idefect = std::max(idefect, std::abs(ev.I_red[j] - std::conj(ev.I_red[k])));
        }
        ev.diag.velocity_defect = idefect;
        if (idefect > 1e-7 * iscale)
            throw consistency_error(
                "residual_F: velocity conjugation symmetry violated (quadrature or map bug)");
        for (int j = 1; j < M_ / 2; ++j) {
            int k = M_ - j;
            cdouble avg = 0.5 * (ev.I_red[j] + std::conj(ev.I_red[k]));
            ev.I_red[j] = avg;
            ev.I_red[k] = std::conj(avg);
        }
        ev.I_red[0] = cdouble(ev.I_red[0].real(), 0.0);
        ev.I_red[M_ / 2] = cdouble(ev.I_red[M_ / 2].real(), 0.0);

        cdouble num(0.0, 0.0), den(0.0, 0.0);
        for (int j = 0; j < M_; ++j) {
            cdouble wj = grid_.w[j];
            cdouble mom = wj * dphi[j] * (1.0 - std::conj(wj) * std::conj(wj)) * (iu * wj);
            num += std::conj(ev.I_red[j]) * mom * dtheta;
            den += mom * dtheta;
        }
        if (std::abs(den) < 1e-6)
            throw precondition_error("V_of: degenerate map, denominator ~ 0");
        cdouble Vc = num / den;
        ev.diag.imag_V = std::abs(Vc.imag());
        if (ev.diag.imag_V > 1e-12 * std::max(1.0, std::abs(Vc)))
            throw consistency_error("V_of: imaginary residue above tolerance");
        ev.V = Vc.real();

        // residual nodes, with the exact Im[f'] reduction of the singular part
        double corr = map.eps() > 0.0 ? -sing_coeff(map.eps()) * sigma
                      : (kernel_.kind() == KernelKind::gsqg_power ? -m_beta_ / pi
                                                                  : 1.0 / two_pi);
        ev.F.resize(M_);
        double fmax = 0.0;
        for (int j = 0; j < M_; ++j) {
            cdouble t = (std::conj(ev.I_red[j]) - ev.V) * grid_.w[j] * dphi[j];
            ev.F[j] = t.real() + corr * fpv[j].imag();
            fmax = std::max(fmax, std::abs(ev.F[j]));
        }

        // odd symmetry F(-theta) = -F(theta)
        double sym = std::abs(2.0 * ev.F[0]);
        for (int j = 1; j < M_; ++j) sym = std::max(sym, std::abs(ev.F[j] + ev.F[M_ - j]));
        ev.diag.symmetry_defect = sym;
        if (sym > 1e-10 * std::max(1.0, fmax))
            throw consistency_error("residual_F: odd-symmetry violation (quadrature or map bug)");

        auto sines = sine_modes(ev.F, N_ + 1);
        ev.diag.first_sine_mode = std::abs(sines[0]);
        if (ev.diag.first_sine_mode > 1e-10 * std::max(1.0, fmax))
            throw consistency_error("residual_F: first sine mode not removed by V");
        auto cosines = cosine_modes(ev.F, N_ + 1);
        for (double c : cosines) ev.diag.max_cosine_mode = std::max(ev.diag.max_cosine_mode, std::abs(c));

        ev.modes.modes.assign(sines.begin() + 1, sines.end());
    }

    RadialKernel kernel_;
    StreetGeometry geom_;
    int N_, M_;
    CircleGrid grid_;
    RowLattice lattice_;
    int gsqg_images_;
    std::vector<double> Wlog_, Wpow_;
    double m_beta_ = 0.0;
    double V0_ = 0.0;
};

}  // namespace karman
