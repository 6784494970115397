#pragma once

// Periodized row kernels: lattice sums sum_k G(|z - k l|) and their
// constant-subtracted variants, evaluated fast enough to sit in the
// quadrature inner loops.
//
// Additive constants in these sums are dropped where they are irrelevant:
// every consumer integrates the values against phi'(xi) dxi (or dy) around a
// closed contour, where constants cancel exactly. For the Euler kernel the
// sum collapses to (1/2pi) ln|sin(pi z / l)| by the sine product formula; for
// QGSW it converges absolutely (exponential K1 decay); for gSQG the pairs
// k/-k with the value at z=0 subtracted decay like k^-(2+beta) and the
// remainder past the truncation is restored by an integral tail estimate with
// an Euler-Maclaurin derivative correction.

#include <algorithm>
#include <cmath>
#include <vector>

#include "karman/bessel.hpp"
#include "karman/common.hpp"
#include "karman/kernels.hpp"

namespace karman {

// ln|sin(zeta)| for complex zeta, stable for large |Im zeta|:
// |sin(x+iy)|^2 = sin^2 x + sinh^2 y.
inline double log_abs_sin(cdouble zeta) {
    double x = zeta.real();
    double ay = std::abs(zeta.imag());
    if (ay > 19.0) {
        // |sin|^2 = (e^{2|y|}/4) [(1-q)^2 + 4 q sin^2 x], q = e^{-2|y|}
        double q = std::exp(-2.0 * ay);
        double s = std::sin(x);
        return ay - 0.69314718055994530942 +
               0.5 * std::log((1.0 - q) * (1.0 - q) + 4.0 * q * s * s);
    }
    double s = std::sin(x), sh = std::sinh(ay);
    double m2 = s * s + sh * sh;
    if (m2 <= 0.0) throw precondition_error("log_abs_sin: argument on the lattice");
    return 0.5 * std::log(m2);
}

// ln|H(zeta)| with H(zeta) = sin(zeta)/zeta, H(0) = 1.
inline double log_abs_sinc(cdouble zeta) {
    double m = std::abs(zeta);
    if (m == 0.0) return 0.0;
    if (m < 1e-4) {
        // ln|1 - zeta^2/6 + ...|
        cdouble z2 = zeta * zeta;
        return std::log(std::abs(1.0 - z2 / 6.0 + z2 * z2 / 120.0));
    }
    return log_abs_sin(zeta) - std::log(m);
}

// Piecewise view of e^x K0(x) as a Chebyshev series in v = 1/sqrt(x),
// x in [2, 47]; feeds the QGSW lattice inner loop. Validated against
// bessel_k0 in the test suite.
class ScaledK0Table {
  public:
    ScaledK0Table() {
        const int n = deg_ + 1;
        const double vlo = 1.0 / std::sqrt(47.0), vhi = 1.0 / std::sqrt(2.0);
        std::vector<double> fv(n);
        for (int i = 0; i < n; ++i) {
            double t = std::cos(pi * (i + 0.5) / n);
            double v = 0.5 * (vlo + vhi) + 0.5 * (vhi - vlo) * t;
            double x = 1.0 / (v * v);
            fv[i] = std::exp(x) * bessel_k0(x);
        }
        coef_.assign(n, 0.0);
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += fv[i] * std::cos(pi * k * (i + 0.5) / n);
            coef_[k] = 2.0 * s / n;
        }
        coef_[0] *= 0.5;
        vlo_ = vlo;
        vhi_ = vhi;
    }

    // K0(x) for x > 0; outside [2,47] falls back to the exact paths.
    double k0(double x) const {
        if (x < 2.0) return bessel_k0(x);
        if (x > 47.0) return 0.0;  // K0(47) ~ 7e-22, below all tolerances here
        double v = 1.0 / std::sqrt(x);
        double t = (2.0 * v - (vlo_ + vhi_)) / (vhi_ - vlo_);
        // Clenshaw
        double b1 = 0.0, b2 = 0.0;
        for (int k = deg_; k >= 1; --k) {
            double b0 = 2.0 * t * b1 - b2 + coef_[k];
            b2 = b1;
            b1 = b0;
        }
        return (t * b1 - b2 + coef_[0]) * std::exp(-x);
    }

  private:
    static constexpr int deg_ = 30;
    std::vector<double> coef_;
    double vlo_ = 0.0, vhi_ = 0.0;
};

inline const ScaledK0Table& scaled_k0_table() {
    static const ScaledK0Table table;
    return table;
}

class RowLattice {
  public:
    RowLattice(const RadialKernel& kernel, double period, int gsqg_images = 64)
        : kernel_(kernel), l_(period), K_(gsqg_images) {
        if (!(period > 0.0)) throw precondition_error("RowLattice: period must be > 0");
        if (kernel_.kind() == KernelKind::gsqg_power) {
            Gk_.resize(K_ + 1, 0.0);
            for (int k = 1; k <= K_; ++k) Gk_[k] = kernel_.G(k * l_);
        }
    }

    // sum_{k != 0} [G(|z - k l|) - G(|k| l)]; requires |z| < l.
    double images_minus_center(cdouble z) const {
        switch (kernel_.kind()) {
            case KernelKind::euler_log:
                return log_abs_sinc(pi / l_ * z) / two_pi;
            case KernelKind::qgsw_bessel: {
                const auto& tab = scaled_k0_table();
                double lam = kernel_.lambda();
                double s = 0.0;
                for (int k = 1; k <= qgsw_cap_; ++k) {
                    double kl = k * l_;
                    double t = -(tab.k0(lam * std::abs(z - kl)) + tab.k0(lam * std::abs(z + kl)) -
                                 2.0 * tab.k0(lam * kl)) /
                               two_pi;
                    s += t;
                    if (lam * (kl - std::abs(z)) > 47.0) break;
                }
                return s;
            }
            case KernelKind::gsqg_power: {
                double s = 0.0;
                for (int k = 1; k <= K_; ++k) {
                    double kl = k * l_;
                    s += kernel_.G(std::abs(z - kl)) + kernel_.G(std::abs(z + kl)) - 2.0 * Gk_[k];
                }
                return s + gsqg_tail(z);
            }
        }
        return 0.0;
    }

    // Full periodized kernel sum_k G(|z - k l|), modulo an additive constant
    // for Euler and gSQG (irrelevant under closed-contour integration).
    double periodized(cdouble z) const {
        switch (kernel_.kind()) {
            case KernelKind::euler_log:
                return log_abs_sin(pi / l_ * z) / two_pi;
            case KernelKind::qgsw_bessel: {
                const auto& tab = scaled_k0_table();
                double lam = kernel_.lambda();
                double s = -tab.k0(lam * std::abs(z)) / two_pi;
                for (int k = 1; k <= qgsw_cap_; ++k) {
                    double kl = k * l_;
                    s += -(tab.k0(lam * std::abs(z - kl)) + tab.k0(lam * std::abs(z + kl))) /
                         two_pi;
                    if (lam * (kl - std::abs(z)) > 47.0) break;
                }
                return s;
            }
            case KernelKind::gsqg_power:
                return kernel_.G(std::abs(z)) + images_minus_center(z);
        }
        return 0.0;
    }

  private:
    // Integral tail for the gSQG pair sum past k = K_. The pair summand
    // g(x) = G(|z-x|) + G(|z+x|) - 2G(x) expands as
    // cG [A x^-(beta+2) + B x^-(beta+4) + O(x^-(beta+6))] for x >> |z|.
    double gsqg_tail(cdouble z) const {
        double beta = kernel_.beta(), cG = kernel_.power_prefactor();
        double u = z.real(), v = z.imag();
        double r2 = u * u + v * v;
        double b2 = 0.5 * beta;
        double c2 = b2 * (b2 + 1.0) / 2.0;
        double c3 = -b2 * (b2 + 1.0) * (b2 + 2.0) / 6.0;
        double c4 = b2 * (b2 + 1.0) * (b2 + 2.0) * (b2 + 3.0) / 24.0;
        double A = beta * (beta + 2.0) * u * u - beta * r2;
        double B = 2.0 * c2 * r2 * r2 + 24.0 * c3 * u * u * r2 + 32.0 * c4 * u * u * u * u;
        double X0 = (K_ + 0.5) * l_;
        double p1 = std::pow(X0, -beta - 1.0);
        double p3 = p1 / (X0 * X0);
        double p5 = p3 / (X0 * X0);
        double integral = (cG / l_) * (A * p1 / (beta + 1.0) + B * p3 / (beta + 3.0));
        double gprime = cG * (-(beta + 2.0) * A * p3 - (beta + 4.0) * B * p5);
        return integral + (l_ / 24.0) * gprime;
    }

    RadialKernel kernel_;
    double l_;
    int K_;
    static constexpr int qgsw_cap_ = 100000;
    std::vector<double> Gk_;
};

}  // namespace karman
