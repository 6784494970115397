#pragma once

// Spectral quadrature tools on the uniform periodic grid theta_j = 2 pi j / M:
//  - trapezoid rule for smooth periodic integrands,
//  - Kussmaul-Martensen style weights exact for the log kernel
//    ln(2|sin((t_i - t)/2)|) against trigonometric polynomials,
//  - product weights for the power kernel (2|sin((t_i - t)/2)|)^-beta built
//    from its exact Fourier moments (Gamma-function closed form),
//  - sine-mode analysis and spectral differentiation.

#include <cmath>
#include <vector>

#include "karman/common.hpp"

namespace karman {

struct CircleGrid {
    int M = 0;
    std::vector<double> theta;
    std::vector<cdouble> w;  // e^{i theta_j}

    explicit CircleGrid(int M_) : M(M_), theta(M_), w(M_) {
        if (M < 16 || M % 2 != 0)
            throw precondition_error("CircleGrid: M must be even and >= 16");
        for (int j = 0; j < M; ++j) {
            theta[j] = two_pi * j / M;
            w[j] = std::polar(1.0, theta[j]);
        }
    }

    double dtheta() const { return two_pi / M; }
};

// Weights W_d with
//   int_0^{2pi} ln(2|sin((t_i - t)/2)|) g(t) dt ~= sum_j W_{(i-j) mod M} g(t_j),
// exact for trigonometric polynomials of degree <= M/2 (cosine part at M/2).
inline std::vector<double> log_kernel_weights(int M) {
    std::vector<double> W(M, 0.0);
    for (int d = 0; d < M; ++d) {
        double s = 0.0;
        for (int m = 1; m < M / 2; ++m) s += std::cos(two_pi * m * d / M) / m;
        W[d] = -(two_pi / M) * s - (two_pi / (static_cast<double>(M) * M)) * std::cos(pi * d);
    }
    return W;
}

// Fourier moments of the power kernel:
//   c_k(beta) = (1/2pi) int_0^{2pi} (2 sin(t/2))^{-beta} e^{-ikt} dt
//             = Gamma(k + beta/2) Gamma(1-beta) / (Gamma(beta/2) Gamma(k+1-beta/2) Gamma(1-beta/2)^... )
// computed by c_0 = Gamma(1-beta)/Gamma(1-beta/2)^2 and the stable upward
// recurrence c_{k+1} = c_k (k + beta/2)/(k + 1 - beta/2).
inline std::vector<double> power_kernel_moments(double beta, int kmax) {
    if (!(beta > 0.0 && beta < 1.0))
        throw precondition_error("power_kernel_moments: beta in (0,1) required");
    std::vector<double> c(kmax + 1);
    double g = std::tgamma(1.0 - 0.5 * beta);
    c[0] = std::tgamma(1.0 - beta) / (g * g);
    for (int k = 0; k < kmax; ++k)
        c[k + 1] = c[k] * (k + 0.5 * beta) / (k + 1.0 - 0.5 * beta);
    return c;
}

// Product-rule weights for int (2|sin((t_i-t)/2)|)^{-beta} g(t) dt.
inline std::vector<double> power_kernel_weights(double beta, int M) {
    auto c = power_kernel_moments(beta, M / 2);
    std::vector<double> W(M, 0.0);
    for (int d = 0; d < M; ++d) {
        double s = c[0];
        for (int m = 1; m < M / 2; ++m) s += 2.0 * c[m] * std::cos(two_pi * m * d / M);
        s += c[M / 2] * std::cos(pi * d);
        W[d] = (two_pi / M) * s;
    }
    return W;
}

// Coefficients of sin(m theta), m = 1..mmax, of grid samples F_j.
inline std::vector<double> sine_modes(const std::vector<double>& F, int mmax) {
    int M = static_cast<int>(F.size());
    std::vector<double> c(mmax, 0.0);
    for (int m = 1; m <= mmax; ++m) {
        double s = 0.0;
        for (int j = 0; j < M; ++j) s += F[j] * std::sin(two_pi * m * j / M);
        c[m - 1] = 2.0 * s / M;
    }
    return c;
}

inline std::vector<double> cosine_modes(const std::vector<double>& F, int mmax) {
    int M = static_cast<int>(F.size());
    std::vector<double> c(mmax, 0.0);
    for (int m = 1; m <= mmax; ++m) {
        double s = 0.0;
        for (int j = 0; j < M; ++j) s += F[j] * std::cos(two_pi * m * j / M);
        c[m - 1] = 2.0 * s / M;
    }
    return c;
}

// d/dtheta of a periodic sample set, spectral accuracy (even M).
inline std::vector<cdouble> spectral_derivative(const std::vector<cdouble>& y) {
    int M = static_cast<int>(y.size());
    std::vector<cdouble> d(M, cdouble(0.0, 0.0));
    for (int i = 0; i < M; ++i) {
        cdouble s(0.0, 0.0);
        for (int j = 0; j < M; ++j) {
            if (i == j) continue;
            int k = i - j;
            double sign = (k % 2 == 0) ? 1.0 : -1.0;
            s += sign * 0.5 / std::tan(0.5 * two_pi * k / M) * y[j];
        }
        d[i] = s;
    }
    return d;
}

// Gauss-Legendre rule on [-1,1]; Newton iteration on Legendre polynomials.
struct GaussLegendre {
    std::vector<double> x, w;

    explicit GaussLegendre(int n) : x(n), w(n) {
        for (int i = 0; i < n; ++i) {
            double xi = std::cos(pi * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = xi;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
                double dx = p1 / dp;
                xi -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            double p0 = 1.0, p1 = xi;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
            x[n - 1 - i] = xi;
            w[n - 1 - i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
        }
    }
};

}  // namespace karman
