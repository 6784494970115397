#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "karman/evolution.hpp"

using namespace karman;

namespace {

const StreetGeometry kGeom{1.0, 1.0, 0.0};

StreetSolution solved_euler(double eps, int N, int M) {
    StreetFunctional fn(RadialKernel::euler(), kGeom, N, M);
    ContinuationRun run = continue_in_eps(fn, eps);
    REQUIRE(run.termination == ContinuationStop::reached_target);
    return run.branch.back();
}

}  // namespace

TEST_CASE("contour state geometry", "[evolution]") {
    ContourState c;
    int M = 64;
    c.nodes.resize(M);
    for (int j = 0; j < M; ++j) c.nodes[j] = cdouble(2.0, -1.0) + 0.5 * std::polar(1.0, two_pi * j / M);
    // shoelace area of the inscribed M-gon: pi r^2 sin(x)/x, x = 2pi/M
    CHECK(c.area() == Catch::Approx(pi * 0.25).epsilon(2e-3));
    CHECK(std::abs(c.centroid() - cdouble(2.0, -1.0)) < 1e-12);
}

TEST_CASE("boundary flux of a solved street vanishes", "[evolution]") {
    StreetSolution sol = solved_euler(0.04, 8, 64);
    StreetContours sc = make_street_contours(sol, 64);
    auto flux = boundary_flux(sol.kernel(), kGeom, sc, sol.V);
    double fmax = 0.0;
    for (double f : flux) fmax = std::max(fmax, std::abs(f));
    CHECK(fmax < 1e-8);

    // against a wrong V the flux does not vanish
    auto bad = boundary_flux(sol.kernel(), kGeom, sc, sol.V + 0.01);
    double bmax = 0.0;
    for (double f : bad) bmax = std::max(bmax, std::abs(f));
    CHECK(bmax > 1e-3);
}

TEST_CASE("velocity is l-periodic under node translation", "[evolution]") {
    StreetSolution sol = solved_euler(0.04, 8, 64);
    StreetContours sc = make_street_contours(sol, 64);
    auto v0 = boundary_velocity(sol.kernel(), kGeom, sc);
    StreetContours shifted = sc;
    for (auto& n : shifted.top.nodes) n += kGeom.l;
    for (auto& n : shifted.bottom.nodes) n += kGeom.l;
    auto v1 = boundary_velocity(sol.kernel(), kGeom, shifted);
    double worst = 0.0;
    for (int j = 0; j < 64; ++j) worst = std::max(worst, std::abs(v0.top[j] - v1.top[j]));
    CHECK(worst < 1e-10);
}

TEST_CASE("a single circular row of patches is stationary", "[evolution]") {
    // stationarity at patch level means the patches do not translate: the
    // induced velocity at each patch center vanishes by the k <-> -k pairing.
    // Pointwise the boundary still sees the O(strain * rho) normal flow of
    // the neighbours' non-uniform field, which shrinks with the patch size.
    auto center_velocity = [](const RadialKernel& kernel, const ContourState& c, double q0) {
        RowLattice lat(kernel, 1.0, 64);
        auto dn = spectral_derivative(c.nodes);
        cdouble acc(0.0, 0.0);
        for (int j = 0; j < c.size(); ++j)
            acc += (two_pi / c.size()) * lat.periodized(-c.nodes[j]) * dn[j];
        return -q0 * acc;
    };
    auto flux_max = [](const RadialKernel& kernel, const ContourState& c, double q0) {
        auto v = single_row_patch_velocity(kernel, 1.0, c, q0);
        auto dn = spectral_derivative(c.nodes);
        double fmax = 0.0;
        for (int j = 0; j < c.size(); ++j) {
            cdouble n = -cdouble(0.0, 1.0) * dn[j] / std::abs(dn[j]);
            fmax = std::max(fmax, std::abs((std::conj(v[j]) * n).real()));
        }
        return fmax;
    };
    auto circle = [](double rho, int M) {
        ContourState c;
        c.nodes.resize(M);
        for (int j = 0; j < M; ++j) c.nodes[j] = rho * std::polar(1.0, two_pi * j / M);
        return c;
    };
    for (const auto& kernel :
         {RadialKernel::euler(), RadialKernel::qgsw(1.0), RadialKernel::gsqg(0.5)}) {
        CAPTURE(kernel.describe());
        ContourState big = circle(0.1, 96), small = circle(0.05, 96);
        CHECK(std::abs(center_velocity(kernel, big, 1.0 / (pi * 0.01))) < 1e-12);
        double fb = flux_max(kernel, big, 1.0 / (pi * 0.01));
        double fs = flux_max(kernel, small, 1.0 / (pi * 0.0025));
        CHECK(fb < 0.1);            // finite-size strain effect, not zero
        CHECK(fs < 0.65 * fb);      // and it decays with the patch radius
    }
}

TEST_CASE("short evolution of a solved street", "[evolution][.slow]") {
    StreetSolution sol = solved_euler(0.04, 8, 96);
    StreetContours sc = make_street_contours(sol, 96);
    RadialKernel kernel = sol.kernel();

    double mn, mx;
    sc.top.spacing(mn, mx);
    double dt = 5e-5;
    EvolveResult res = evolve(kernel, kGeom, sc, dt, 200, 50);

    const auto& r0 = res.records.front();
    const auto& r1 = res.records.back();
    cdouble vdrift = (r1.centroid - r0.centroid) / (r1.t - r0.t);
    CHECK(std::abs(vdrift - sol.V) < 1e-3 * std::abs(sol.V));
    CHECK(std::abs(r1.area - r0.area) / r0.area < 1e-6);
    CHECK(r1.shape_dev < 1e-3 * 2.0 * sol.eps);
    // sym_dev floors at the polyline-chord error (2 pi eps / M)^2 / (8 eps)
    CHECK(r1.sym_dev < 3e-5);
}

TEST_CASE("RK4 order of the centroid error", "[evolution][.slow]") {
    StreetSolution sol = solved_euler(0.04, 8, 64);
    RadialKernel kernel = sol.kernel();
    // large steps so the time error dominates; Richardson ratio ~ 2^4
    double T = 6e-4;
    auto run = [&](long steps) {
        StreetContours sc = make_street_contours(sol, 64);
        EvolveResult res = evolve(kernel, kGeom, sc, T / steps, steps, steps);
        return res.records.back().centroid;
    };
    cdouble c1 = run(4), c2 = run(8), c3 = run(16);
    double ratio = std::abs(c1 - c2) / std::abs(c2 - c3);
    CHECK(ratio > 8.0);
    CHECK(ratio < 32.0);
}

TEST_CASE("evolve guards", "[evolution]") {
    StreetSolution sol = solved_euler(0.04, 8, 64);
    StreetContours sc = make_street_contours(sol, 64);
    CHECK_THROWS_AS(evolve(sol.kernel(), kGeom, sc, 1.0, 1), precondition_error);

    // degenerate spacing triggers the remesh-required error
    StreetContours bad = sc;
    bad.top.nodes[3] = bad.top.nodes[2] + 1e-4 * (bad.top.nodes[3] - bad.top.nodes[2]);
    CHECK_THROWS_AS(boundary_velocity(sol.kernel(), kGeom, bad), precondition_error);
}
