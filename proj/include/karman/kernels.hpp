#pragma once

// Radial interaction kernels for the three models:
//   Euler : G(r) = (1/2pi) ln r
//   QGSW  : G(r) = -(1/2pi) K0(lambda r)   (Green's function of (Lap - lambda^2)^-1)
//   gSQG  : G(r) = (C_beta/2pi) r^-beta,   C_beta = Gamma(beta/2) / (2^{1-beta} Gamma((2-beta)/2))
// plus the conformal-map scale rule sigma(eps): eps for the log-type kernels,
// eps/G(eps) for the power kernel.

#include <cmath>
#include <string>

#include "karman/bessel.hpp"
#include "karman/common.hpp"

namespace karman {

enum class KernelKind { euler_log, qgsw_bessel, gsqg_power };

inline const char* kernel_name(KernelKind k) {
    switch (k) {
        case KernelKind::euler_log: return "euler";
        case KernelKind::qgsw_bessel: return "qgsw";
        case KernelKind::gsqg_power: return "gsqg";
    }
    return "?";
}

class RadialKernel {
  public:
    static RadialKernel euler() { return RadialKernel(KernelKind::euler_log, 0.0, 0.0); }

    static RadialKernel qgsw(double lambda) {
        if (!(lambda > 0.0)) throw precondition_error("qgsw kernel: lambda must be > 0");
        return RadialKernel(KernelKind::qgsw_bessel, lambda, 0.0);
    }

    static RadialKernel gsqg(double beta) {
        if (!(beta > 0.0 && beta < 1.0))
            throw precondition_error("gsqg kernel: beta must lie in (0,1)");
        return RadialKernel(KernelKind::gsqg_power, 0.0, beta);
    }

    KernelKind kind() const { return kind_; }
    double lambda() const { return lambda_; }
    double beta() const { return beta_; }

    // C_beta / 2pi, the kernel prefactor for gsqg.
    double power_prefactor() const { return c_beta_ / two_pi; }
    double c_beta() const { return c_beta_; }

    double G(double r) const {
        if (!(r > 0.0)) throw precondition_error("kernel G: requires r > 0");
        switch (kind_) {
            case KernelKind::euler_log: return std::log(r) / two_pi;
            case KernelKind::qgsw_bessel: return -bessel_k0(lambda_ * r) / two_pi;
            case KernelKind::gsqg_power: return power_prefactor() * std::pow(r, -beta_);
        }
        return 0.0;
    }

    double Gprime(double r) const {
        if (!(r > 0.0)) throw precondition_error("kernel G': requires r > 0");
        switch (kind_) {
            case KernelKind::euler_log: return 1.0 / (two_pi * r);
            case KernelKind::qgsw_bessel: return lambda_ * bessel_k1(lambda_ * r) / two_pi;
            case KernelKind::gsqg_power:
                return -beta_ * power_prefactor() * std::pow(r, -beta_ - 1.0);
        }
        return 0.0;
    }

    // Conformal-map coefficient sigma(eps): phi(w) = i (w + sigma(eps) f(w)).
    double map_scale(double eps) const {
        if (!(eps > 0.0 && eps < 1.0))
            throw precondition_error("map_scale: requires 0 < eps < 1");
        if (kind_ == KernelKind::gsqg_power) return eps / G(eps);
        return eps;
    }

    // Tail-decay exponent of hypothesis (H2); Euler is the critical case and
    // carries 1 as metadata only (its sums rely on symmetric pairing).
    double decay_exponent() const {
        return kind_ == KernelKind::gsqg_power ? beta_ : 1.0;
    }

    // Singularity-strength exponent of hypothesis (H3); 0 for log-type kernels.
    double singularity_exponent() const {
        return kind_ == KernelKind::gsqg_power ? beta_ : 0.0;
    }

    bool is_log_type() const { return kind_ != KernelKind::gsqg_power; }

    std::string describe() const {
        switch (kind_) {
            case KernelKind::euler_log: return "euler";
            case KernelKind::qgsw_bessel: return "qgsw(lambda=" + std::to_string(lambda_) + ")";
            case KernelKind::gsqg_power: return "gsqg(beta=" + std::to_string(beta_) + ")";
        }
        return "?";
    }

  private:
    RadialKernel(KernelKind k, double lambda, double beta)
        : kind_(k), lambda_(lambda), beta_(beta) {
        if (kind_ == KernelKind::gsqg_power)
            c_beta_ = std::tgamma(0.5 * beta_) /
                      (std::pow(2.0, 1.0 - beta_) * std::tgamma(0.5 * (2.0 - beta_)));
    }

    KernelKind kind_;
    double lambda_;
    double beta_;
    double c_beta_ = 0.0;
};

// Street geometry: top row of +1 points at (k l, 0), bottom row of -1 points
// at (a + k l, -h).
struct StreetGeometry {
    double l = 1.0;  // horizontal period, > 0
    double h = 1.0;  // row separation, != 0
    double a = 0.0;  // stagger

    void validate() const {
        if (!(l > 0.0)) throw precondition_error("geometry: period l must be > 0");
        if (h == 0.0) throw precondition_error("geometry: row separation h must be nonzero");
        if (!std::isfinite(a)) throw precondition_error("geometry: stagger a must be finite");
    }

    // The patch machinery requires a in {0, l/2}; the point model does not.
    bool symmetric_stagger() const { return a == 0.0 || a == 0.5 * l; }

    cdouble bottom_offset() const { return cdouble(a, -h); }
};

}  // namespace karman
