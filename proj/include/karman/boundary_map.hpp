#pragma once

// Conformal-map boundary representation phi(w) = i (w + sigma(eps) f(w)) with
// f(w) = sum_{n>=1} a_n w^-n, a_n real. sigma(eps) is the kernel's map-scale
// rule; real coefficients give the conjugation symmetry
// phi(conj w) = -conj(phi(w)) identically.

#include <cmath>
#include <utility>
#include <vector>

#include "karman/common.hpp"
#include "karman/kernels.hpp"

namespace karman {

class BoundaryMap {
  public:
    // eps = 0 selects the analytic branch: sigma = 0 and the map is i*w.
    BoundaryMap(const RadialKernel& kernel, double eps, std::vector<double> coeffs)
        : eps_(eps), coeffs_(std::move(coeffs)) {
        if (eps < 0.0) throw precondition_error("BoundaryMap: eps must be >= 0");
        sigma_ = eps > 0.0 ? kernel.map_scale(eps) : 0.0;
        check_guard();
    }

    double eps() const { return eps_; }
    double sigma() const { return sigma_; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    int modes() const { return static_cast<int>(coeffs_.size()); }

    // Bilipschitz guard proxy sum n |a_n|; the map is bilipschitz while < 1.
    double guard_norm() const {
        double s = 0.0;
        for (size_t n = 0; n < coeffs_.size(); ++n) s += (n + 1.0) * std::abs(coeffs_[n]);
        return s;
    }

    cdouble f(cdouble w) const {
        // Horner in 1/w
        cdouble inv = 1.0 / w;
        cdouble acc(0.0, 0.0);
        for (size_t n = coeffs_.size(); n-- > 0;) acc = (acc + coeffs_[n]) * inv;
        return acc;
    }

    cdouble fprime(cdouble w) const {
        cdouble inv = 1.0 / w;
        cdouble acc(0.0, 0.0);
        for (size_t n = coeffs_.size(); n-- > 0;)
            acc = (acc - (n + 1.0) * coeffs_[n]) * inv;
        return acc * inv;
    }

    cdouble phi(cdouble w) const { return cdouble(0.0, 1.0) * (w + sigma_ * f(w)); }
    cdouble dphi(cdouble w) const { return cdouble(0.0, 1.0) * (1.0 + sigma_ * fprime(w)); }

  private:
    void check_guard() const {
        double g = guard_norm();
        if (!(g < 1.0))
            throw precondition_error("BoundaryMap: bilipschitz guard violated (sum n|a_n| = " +
                                     std::to_string(g) + " >= 1)");
    }

    double eps_;
    double sigma_;
    std::vector<double> coeffs_;
};

}  // namespace karman
