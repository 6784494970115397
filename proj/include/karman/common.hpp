#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace karman {

using cdouble = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double two_pi = 2.0 * pi;
// Euler-Mascheroni constant, 20 digits.
inline constexpr double euler_gamma = 0.57721566490153286061;

// Error hierarchy. CLI exit codes: config errors -> 2, convergence -> 3,
// internal consistency -> 4; everything else maps to precondition misuse.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller violated a documented precondition (bad argument, bad state).
struct precondition_error : error {
    using error::error;
};

// An iteration or truncated sum failed to reach the requested tolerance.
struct convergence_error : error {
    double achieved = 0.0;
    convergence_error(const std::string& msg, double achieved_bound)
        : error(msg), achieved(achieved_bound) {}
};

// A self-check on quadrature accuracy failed.
struct accuracy_error : error {
    using error::error;
};

// An internal invariant that should hold by construction was violated;
// signals a bug, not bad input.
struct consistency_error : error {
    using error::error;
};

struct config_error : error {
    using error::error;
};

}  // namespace karman
