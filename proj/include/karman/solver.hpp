#pragma once

// Newton solve of residual_F = 0 in the coefficients a_1..a_N at fixed eps,
// and continuation in eps from the point-vortex limit. The Jacobian is
// finite-difference (column step 1e-7, rebuilt every iteration); unknowns are
// a_1..a_N against sine modes 2..N+1, a square system through the mode shift
// n -> n+1 of the linearization.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "karman/common.hpp"
#include "karman/functional.hpp"
#include "karman/parallel.hpp"

namespace karman {

struct StreetSolution {
    KernelKind kind = KernelKind::euler_log;
    double lambda = 0.0;
    double beta = 0.0;
    StreetGeometry geom;
    double eps = 0.0;
    int N = 0;
    int M = 0;
    std::vector<double> coeffs;
    double V = 0.0;
    double residual_norm = 0.0;
    int newton_iters = 0;

    RadialKernel kernel() const {
        switch (kind) {
            case KernelKind::euler_log: return RadialKernel::euler();
            case KernelKind::qgsw_bessel: return RadialKernel::qgsw(lambda);
            case KernelKind::gsqg_power: return RadialKernel::gsqg(beta);
        }
        throw precondition_error("StreetSolution: bad kernel kind");
    }
};

struct SolveOptions {
    double tol = 1e-11;       // max |residual mode|
    int max_iters = 25;
    double fd_step = 1e-7;    // Jacobian column step
    int max_halvings = 5;     // guard-violation damping
};

struct SolveFailure : convergence_error {
    std::vector<double> residual_history;
    StreetSolution last;
    SolveFailure(const std::string& msg, double achieved, std::vector<double> history,
                 StreetSolution last_state)
        : convergence_error(msg, achieved),
          residual_history(std::move(history)),
          last(std::move(last_state)) {}
};

namespace detail {

inline Eigen::MatrixXd fd_jacobian(const StreetFunctional& fn, double eps,
                                   const std::vector<double>& coeffs, double step) {
    const int N = fn.modes_count();
    Eigen::MatrixXd J(N, N);
    ResidualModes base = fn.residual_F(fn.make_map(eps, coeffs));
    // columns evaluated serially; each residual already parallelizes its nodes
    for (int n = 0; n < N; ++n) {
        std::vector<double> c = coeffs;
        c[n] += step;
        ResidualModes col = fn.residual_F(fn.make_map(eps, c));
        for (int m = 0; m < N; ++m) J(m, n) = (col.modes[m] - base.modes[m]) / step;
    }
    return J;
}

inline StreetSolution pack_solution(const StreetFunctional& fn, double eps,
                                    const std::vector<double>& coeffs, double V,
                                    double residual, int iters) {
    StreetSolution s;
    s.kind = fn.kernel().kind();
    s.lambda = fn.kernel().lambda();
    s.beta = fn.kernel().beta();
    s.geom = fn.geom();
    s.eps = eps;
    s.N = fn.modes_count();
    s.M = fn.grid_size();
    s.coeffs = coeffs;
    s.V = V;
    s.residual_norm = residual;
    s.newton_iters = iters;
    return s;
}

}  // namespace detail

// Newton records per iteration, for convergence-rate diagnostics.
struct NewtonTrace {
    std::vector<double> residual_history;
    bool quadratic_tail_ok = true;  // r_{k+1} <= C r_k^2 over the last steps
};

inline StreetSolution solve_at_eps(const StreetFunctional& fn, double eps,
                                   std::vector<double> init, const SolveOptions& opt = {},
                                   NewtonTrace* trace = nullptr) {
    const StreetGeometry& geom = fn.geom();
    if (!(eps > 0.0 && eps < std::min(1.0, geom.l / 4.0)))
        throw precondition_error("solve_at_eps: eps must lie in (0, min(1, l/4))");
    const int N = fn.modes_count();
    if (static_cast<int>(init.size()) != N)
        throw precondition_error("solve_at_eps: init size != N");

    std::vector<double> coeffs = std::move(init);
    std::vector<double> history;
    double V = 0.0;

    for (int it = 0; it <= opt.max_iters; ++it) {
        BoundaryMap map = fn.make_map(eps, coeffs);
        FunctionalDiagnostics diag;
        ResidualModes r = fn.residual_F(map, &diag);
        V = fn.V_of(map);
        double rn = r.max_abs();
        history.push_back(rn);
        if (rn < opt.tol) {
            if (trace) {
                trace->residual_history = history;
                trace->quadratic_tail_ok = true;
                size_t k = history.size();
                if (k >= 3 && history[k - 2] > 0.0) {
                    double C = history[k - 1] / (history[k - 2] * history[k - 2]);
                    trace->quadratic_tail_ok = C < 1e9;
                }
            }
            return detail::pack_solution(fn, eps, coeffs, V, rn, it);
        }
        if (it == opt.max_iters) break;

        Eigen::MatrixXd J = detail::fd_jacobian(fn, eps, coeffs, opt.fd_step);
        Eigen::VectorXd rhs(N);
        for (int m = 0; m < N; ++m) rhs(m) = -r.modes[m];
        Eigen::VectorXd delta = J.partialPivLu().solve(rhs);

        // step-halving against the bilipschitz guard
        double scale = 1.0;
        int halvings = 0;
        for (;; ++halvings) {
            if (halvings > opt.max_halvings) {
                auto last = detail::pack_solution(fn, eps, coeffs, V, rn, it);
                throw SolveFailure("solve_at_eps: bilipschitz guard blocks the Newton step",
                                   rn, history, last);
            }
            double g = 0.0;
            for (int n = 0; n < N; ++n)
                g += (n + 1.0) * std::abs(coeffs[n] + scale * delta(n));
            if (g < 0.999) break;
            scale *= 0.5;
        }
        for (int n = 0; n < N; ++n) coeffs[n] += scale * delta(n);
    }

    auto last = detail::pack_solution(fn, eps, coeffs, V, history.back(),
                                      static_cast<int>(history.size()) - 1);
    throw SolveFailure("solve_at_eps: no convergence in " + std::to_string(opt.max_iters) +
                           " iterations",
                       history.back(), history, last);
}

enum class ContinuationStop { reached_target, step_floor };

struct ContinuationRun {
    std::vector<StreetSolution> branch;  // strictly increasing eps, all converged
    std::vector<double> step_history;
    ContinuationStop termination = ContinuationStop::reached_target;
};

// Adaptive continuation: start at eps = 1e-4 from zero coefficients, double
// the step after fast solves (<= 2 iterations), halve on failure, floor 1e-6.
inline ContinuationRun continue_in_eps(const StreetFunctional& fn, double eps_target,
                                       const SolveOptions& opt = {}) {
    const StreetGeometry& geom = fn.geom();
    if (!(eps_target > 0.0 && eps_target < std::min(1.0, geom.l / 4.0)))
        throw precondition_error("continue_in_eps: eps_target must lie in (0, min(1, l/4))");

    ContinuationRun run;
    const int N = fn.modes_count();
    std::vector<double> guess(N, 0.0);
    double eps = std::min(1e-4, 0.5 * eps_target);

    StreetSolution sol = solve_at_eps(fn, eps, guess, opt);
    run.branch.push_back(sol);
    guess = sol.coeffs;

    double step = eps;
    const double floor = 1e-6;
    while (eps < eps_target) {
        double next = std::min(eps + step, eps_target);
        try {
            StreetSolution s = solve_at_eps(fn, next, guess, opt);
            run.branch.push_back(s);
            run.step_history.push_back(next - eps);
            eps = next;
            guess = s.coeffs;
            if (s.newton_iters <= 2) step *= 2.0;
        } catch (const SolveFailure&) {
            step *= 0.5;
            if (step < floor) {
                run.termination = ContinuationStop::step_floor;
                return run;
            }
        }
    }
    run.termination = ContinuationStop::reached_target;
    return run;
}

struct LimitReport {
    double empirical_order = 0.0;   // slope of log|V(eps)-V0| vs log eps
    double V0 = 0.0;
    std::vector<double> eps_values;
    std::vector<double> V_errors;      // |V(eps) - V0|
    std::vector<double> max_coeffs;    // max_n |a_n(eps)|
    int fit_points = 0;
};

// Least-squares fit of the branch's approach to the point-vortex limit.
// Entries whose |V - V0| sits at the numerical floor (< 1e-11) carry no slope
// information and are excluded from the fit; if everything is at the floor
// the limit is resolved to machine precision and the order reports infinite.
inline LimitReport verify_limit(const ContinuationRun& run) {
    if (run.branch.size() < 4)
        throw precondition_error("verify_limit: need >= 4 branch entries");
    double span = run.branch.back().eps / run.branch.front().eps;
    if (span < 10.0 * (1.0 - 1e-9))
        throw precondition_error("verify_limit: branch must span a decade in eps");

    const StreetSolution& first = run.branch.front();
    RadialKernel kernel = first.kernel();
    LimitReport rep;
    rep.V0 = street_speed_sum(kernel, first.geom, 1e-12).value.real();

    const double floor = 1e-11;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& s : run.branch) {
        double err = std::abs(s.V - rep.V0);
        rep.eps_values.push_back(s.eps);
        rep.V_errors.push_back(err);
        double mc = 0.0;
        for (double c : s.coeffs) mc = std::max(mc, std::abs(c));
        rep.max_coeffs.push_back(mc);
        if (err < floor) continue;
        double x = std::log(s.eps), y = std::log(err);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++rep.fit_points;
    }
    int n = rep.fit_points;
    if (n >= 2) rep.empirical_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    else rep.empirical_order = std::numeric_limits<double>::infinity();
    return rep;
}

// Flat key-value record, 17 significant digits, one line per key.
inline std::string serialize_solution(const StreetSolution& s) {
    std::ostringstream os;
    char buf[64];
    auto put = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << key << " = " << buf << "\n";
    };
    os << "kernel = " << kernel_name(s.kind) << "\n";
    if (s.kind == KernelKind::qgsw_bessel) put("lambda", s.lambda);
    if (s.kind == KernelKind::gsqg_power) put("beta", s.beta);
    put("l", s.geom.l);
    put("h", s.geom.h);
    put("a", s.geom.a);
    put("eps", s.eps);
    os << "N = " << s.N << "\n";
    os << "M = " << s.M << "\n";
    put("V", s.V);
    put("residual_norm", s.residual_norm);
    os << "newton_iters = " << s.newton_iters << "\n";
    for (int n = 0; n < s.N; ++n) {
        std::snprintf(buf, sizeof buf, "%.17g", s.coeffs[n]);
        os << "coeff_" << (n + 1) << " = " << buf << "\n";
    }
    return os.str();
}

inline StreetSolution parse_solution(const std::string& text) {
    StreetSolution s;
    std::istringstream is(text);
    std::string line;
    std::vector<std::pair<int, double>> coeffs;
    while (std::getline(is, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto trim = [](std::string& t) {
            t.erase(0, t.find_first_not_of(" \t"));
            t.erase(t.find_last_not_of(" \t\r") + 1);
        };
        trim(key);
        trim(val);
        if (key == "kernel") {
            if (val == "euler") s.kind = KernelKind::euler_log;
            else if (val == "qgsw") s.kind = KernelKind::qgsw_bessel;
            else if (val == "gsqg") s.kind = KernelKind::gsqg_power;
            else throw precondition_error("parse_solution: unknown kernel " + val);
        } else if (key == "lambda") s.lambda = std::stod(val);
        else if (key == "beta") s.beta = std::stod(val);
        else if (key == "l") s.geom.l = std::stod(val);
        else if (key == "h") s.geom.h = std::stod(val);
        else if (key == "a") s.geom.a = std::stod(val);
        else if (key == "eps") s.eps = std::stod(val);
        else if (key == "N") s.N = std::stoi(val);
        else if (key == "M") s.M = std::stoi(val);
        else if (key == "V") s.V = std::stod(val);
        else if (key == "residual_norm") s.residual_norm = std::stod(val);
        else if (key == "newton_iters") s.newton_iters = std::stoi(val);
        else if (key.rfind("coeff_", 0) == 0)
            coeffs.emplace_back(std::stoi(key.substr(6)), std::stod(val));
        else
            throw precondition_error("parse_solution: unknown key " + key);
    }
    s.coeffs.assign(s.N, 0.0);
    for (auto& [idx, v] : coeffs) {
        if (idx < 1 || idx > s.N) throw precondition_error("parse_solution: bad coeff index");
        s.coeffs[idx - 1] = v;
    }
    return s;
}

}  // namespace karman
