#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "karman/solver.hpp"

using namespace karman;

namespace {
const StreetGeometry kGeom{1.0, 1.0, 0.0};
}

TEST_CASE("solve at small eps from the flat map", "[solver]") {
    StreetFunctional fn(RadialKernel::euler(), kGeom, 8, 64);
    NewtonTrace trace;
    StreetSolution sol = solve_at_eps(fn, 1e-3, std::vector<double>(8, 0.0), {}, &trace);
    CHECK(sol.newton_iters <= 3);
    CHECK(sol.residual_norm < 1e-11);
    double V0 = fn.point_speed();
    CHECK(std::abs(sol.V - V0) < 10.0 * 1e-3);  // bounded by O(eps)
    CHECK(trace.quadratic_tail_ok);

    // coefficients -> 0 and V -> V0 as eps -> 0
    StreetSolution tiny = solve_at_eps(fn, 1e-5, std::vector<double>(8, 0.0));
    double mc = 0.0;
    for (double c : tiny.coeffs) mc = std::max(mc, std::abs(c));
    CHECK(mc < 1e-4);
    CHECK(std::abs(tiny.V - V0) < 1e-4);
}

TEST_CASE("solver preconditions and failure paths", "[solver]") {
    StreetFunctional fn(RadialKernel::euler(), kGeom, 8, 64);
    CHECK_THROWS_AS(solve_at_eps(fn, 0.3, std::vector<double>(8, 0.0)),
                    precondition_error);  // eps >= l/4
    CHECK_THROWS_AS(solve_at_eps(fn, 1e-3, std::vector<double>(4, 0.0)), precondition_error);

    SolveOptions strict;
    strict.tol = 1e-30;  // unreachable
    strict.max_iters = 3;
    try {
        solve_at_eps(fn, 1e-3, std::vector<double>(8, 0.0), strict);
        FAIL("expected SolveFailure");
    } catch (const SolveFailure& f) {
        CHECK(f.residual_history.size() == 4);
        CHECK(f.last.eps == 1e-3);
        CHECK(f.achieved > 0.0);
    }
}

TEST_CASE("continuation to eps = 0.05", "[solver]") {
    StreetFunctional fn(RadialKernel::euler(), kGeom, 8, 64);
    ContinuationRun run = continue_in_eps(fn, 0.05);
    REQUIRE(run.termination == ContinuationStop::reached_target);
    REQUIRE(run.branch.size() >= 4);
    CHECK(run.branch.back().eps == 0.05);
    for (size_t i = 1; i < run.branch.size(); ++i)
        CHECK(run.branch[i].eps > run.branch[i - 1].eps);
    for (const auto& s : run.branch) CHECK(s.residual_norm < 1e-11);

    // |V(eps) - V0| grows along the branch wherever it is above the
    // numerical floor
    double V0 = fn.point_speed();
    double prev = 0.0;
    for (const auto& s : run.branch) {
        double err = std::abs(s.V - V0);
        if (err < 1e-12) continue;
        CHECK(err >= prev);
        prev = err;
    }

    LimitReport rep = verify_limit(run);
    CHECK(rep.empirical_order >= 1.0);
    CHECK(rep.V0 == Catch::Approx(V0).margin(1e-12));
    // coefficients shrink toward the point-vortex limit
    CHECK(rep.max_coeffs.front() < rep.max_coeffs.back());
}

TEST_CASE("verify_limit preconditions", "[solver]") {
    ContinuationRun run;
    CHECK_THROWS_AS(verify_limit(run), precondition_error);
}

TEST_CASE("mirror branch: flipping h flips V and reflects the patch", "[solver]") {
    // the -h street is the complex conjugate of the +h street, so the solved
    // domain reflects: a_n -> (-1)^{n+1} a_n, V -> -V
    StreetFunctional up(RadialKernel::euler(), kGeom, 8, 64);
    StreetGeometry flipped{1.0, -1.0, 0.0};
    StreetFunctional down(RadialKernel::euler(), flipped, 8, 64);
    StreetSolution a = solve_at_eps(up, 0.02, std::vector<double>(8, 0.0));
    StreetSolution b = solve_at_eps(down, 0.02, std::vector<double>(8, 0.0));
    CHECK(std::abs(a.V + b.V) < 1e-10);
    for (int n = 0; n < 8; ++n) {
        double sign = (n % 2 == 0) ? 1.0 : -1.0;  // coeffs[n] holds a_{n+1}
        CHECK(std::abs(a.coeffs[n] - sign * b.coeffs[n]) < 1e-10);
    }
}

TEST_CASE("determinism: identical inputs give bit-identical records", "[solver]") {
    StreetFunctional fn(RadialKernel::qgsw(1.0), kGeom, 8, 64);
    StreetSolution a = solve_at_eps(fn, 0.01, std::vector<double>(8, 0.0));
    StreetSolution b = solve_at_eps(fn, 0.01, std::vector<double>(8, 0.0));
    CHECK(serialize_solution(a) == serialize_solution(b));
}

TEST_CASE("solution record round-trip", "[solver]") {
    StreetFunctional fn(RadialKernel::gsqg(0.5), kGeom, 8, 64);
    StreetSolution s = solve_at_eps(fn, 0.01, std::vector<double>(8, 0.0));
    StreetSolution t = parse_solution(serialize_solution(s));
    CHECK(t.kind == s.kind);
    CHECK(t.beta == s.beta);
    CHECK(t.eps == s.eps);
    CHECK(t.V == s.V);
    CHECK(t.coeffs == s.coeffs);
    CHECK_THROWS_AS(parse_solution("kernel = euler\nbogus_key = 3\n"), precondition_error);
}
