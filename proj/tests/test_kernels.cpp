#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "karman/kernels.hpp"
#include "oracles.hpp"

using namespace karman;

TEST_CASE("kernel values", "[kernels]") {
    auto e = RadialKernel::euler();
    CHECK(e.G(1.0) == 0.0);  // ln 1 = 0
    CHECK(e.Gprime(2.0) == Catch::Approx(1.0 / (4.0 * pi)).epsilon(1e-15));

    // QGSW normalized as the Green's function of (Lap - lambda^2)^{-1}:
    // G = -K0(lambda r)/(2pi), G' = lambda K1(lambda r)/(2pi)
    auto q = RadialKernel::qgsw(1.0);
    CHECK(q.G(1.0) == Catch::Approx(-oracle::k0_series_dd(1.0) / two_pi).epsilon(1e-13));
    CHECK(q.Gprime(1.0) == Catch::Approx(oracle::k1_series_dd(1.0) / two_pi).epsilon(1e-13));

    auto p = RadialKernel::gsqg(0.5);
    double c_half = std::tgamma(0.25) / (std::sqrt(2.0) * std::tgamma(0.75));
    CHECK(p.c_beta() == Catch::Approx(c_half).epsilon(1e-14));
    CHECK(p.G(1.0) == Catch::Approx(c_half / two_pi).epsilon(1e-14));
    CHECK(p.Gprime(4.0) ==
          Catch::Approx(-0.5 * c_half / two_pi * std::pow(4.0, -1.5)).epsilon(1e-14));
}

TEST_CASE("G' is the derivative of G", "[kernels]") {
    auto kernels = {RadialKernel::euler(), RadialKernel::qgsw(1.3), RadialKernel::gsqg(0.5),
                    RadialKernel::gsqg(0.2), RadialKernel::gsqg(0.8)};
    for (const auto& k : kernels) {
        for (int i = 0; i <= 50; ++i) {
            double r = 0.1 * std::pow(100.0, i / 50.0);  // dense grid on [0.1, 10]
            double h = 1e-6 * r;
            double fd = (k.G(r + h) - k.G(r - h)) / (2.0 * h);
            CAPTURE(k.describe(), r);
            CHECK(fd == Catch::Approx(k.Gprime(r)).epsilon(1e-6));
        }
    }
}

TEST_CASE("tail decay (H2)", "[kernels]") {
    auto p = RadialKernel::gsqg(0.5);
    // |G'(r)| r^{1+beta} constant in r for the power kernel
    double c1 = std::abs(p.Gprime(2.0)) * std::pow(2.0, 1.5);
    double c2 = std::abs(p.Gprime(37.0)) * std::pow(37.0, 1.5);
    CHECK(c1 == Catch::Approx(c2).epsilon(1e-12));

    auto q = RadialKernel::qgsw(1.0);
    double prev = 1e300;
    for (double r : {10.0, 20.0, 40.0}) {
        double v = std::abs(q.Gprime(r)) * std::exp(0.5 * r);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev < 1e-6);
}

TEST_CASE("scaling limits (H4) for the power kernel", "[kernels]") {
    // For G = c r^-beta the ratios are exactly 1/c and (1/c) respectively;
    // normalized by the kernel's own c they equal 1 identically.
    auto p = RadialKernel::gsqg(0.5);
    double c = p.power_prefactor();
    double prev_worst = 1e300;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        double worst = 0.0;
        for (double r : {0.1, 0.5, 1.0, 1.9}) {
            double ratio_G = p.G(eps * r) / (p.G(eps) * p.G(r)) * c;
            double ratio_Gp = eps * p.Gprime(eps * r) / (p.G(eps) * p.Gprime(r)) * c;
            worst = std::max({worst, std::abs(ratio_G - 1.0), std::abs(ratio_Gp - 1.0)});
            CHECK(std::abs(ratio_G - 1.0) < 10.0 * eps);
            CHECK(std::abs(ratio_Gp - 1.0) < 10.0 * eps);
        }
        CHECK(worst <= prev_worst);
        prev_worst = worst;
    }
}

TEST_CASE("map scale rule", "[kernels]") {
    CHECK(RadialKernel::euler().map_scale(0.01) == 0.01);
    CHECK(RadialKernel::qgsw(1.0).map_scale(0.01) == 0.01);
    auto p = RadialKernel::gsqg(0.5);
    CHECK(p.map_scale(0.01) == Catch::Approx(0.01 / p.G(0.01)).epsilon(1e-15));
    CHECK_THROWS_AS(p.map_scale(0.0), precondition_error);
    CHECK_THROWS_AS(p.map_scale(1.0), precondition_error);
}

TEST_CASE("kernel metadata and validation", "[kernels]") {
    CHECK_THROWS_AS(RadialKernel::gsqg(0.0), precondition_error);
    CHECK_THROWS_AS(RadialKernel::gsqg(1.0), precondition_error);
    CHECK_THROWS_AS(RadialKernel::qgsw(0.0), precondition_error);
    auto p = RadialKernel::gsqg(0.3);
    CHECK(p.decay_exponent() == 0.3);
    CHECK(p.singularity_exponent() == 0.3);
    CHECK(RadialKernel::euler().singularity_exponent() == 0.0);
    CHECK(RadialKernel::qgsw(2.0).singularity_exponent() == 0.0);
    CHECK_THROWS_AS(RadialKernel::euler().G(0.0), precondition_error);
    CHECK_THROWS_AS(RadialKernel::euler().G(-2.0), precondition_error);
    CHECK_THROWS_AS(RadialKernel::gsqg(0.5).Gprime(0.0), precondition_error);
}

TEST_CASE("geometry validation", "[kernels]") {
    StreetGeometry bad{0.0, 1.0, 0.0};
    CHECK_THROWS_AS(bad.validate(), precondition_error);
    StreetGeometry flat{1.0, 0.0, 0.0};
    CHECK_THROWS_AS(flat.validate(), precondition_error);
    StreetGeometry ok{2.0, -0.7, 1.0};
    ok.validate();
    CHECK(ok.symmetric_stagger());
    ok.a = 0.3;
    CHECK_FALSE(ok.symmetric_stagger());
}
