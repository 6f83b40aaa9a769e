#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "folmod/capacity.hpp"

using namespace folmod;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("radial q-harmonic potentials in closed form") {
    SUBCASE("planar annulus [1, e], q = 2: u = ln(r/a) / ln(b/a)") {
        GridChart chart(WarpProfile::euclidean(1.0, std::exp(1.0)), ChartMode::radial,
                        128);
        QHarmonicRadial qh = q_harmonic_radial(chart, ModulusParams::from_p(2.0));
        CHECK(qh.c == doctest::Approx(2.0 * kPi).epsilon(1e-12));
        for (double r : {1.0, 1.3, 2.0, std::exp(1.0)})
            CHECK(qh.u.u(r, 0.0) == doctest::Approx(std::log(r)).epsilon(1e-12).scale(1.0));
    }
    SUBCASE("spherical shell k = 2, [1, 2], q = 2: u = 2 (1 - 1/r)") {
        GridChart chart(WarpProfile::euclidean(1.0, 2.0, 2), ChartMode::radial, 128);
        QHarmonicRadial qh = q_harmonic_radial(chart, ModulusParams::from_p(2.0));
        CHECK(qh.c == doctest::Approx(8.0 * kPi).epsilon(1e-12));
        for (double r : {1.0, 1.5, 2.0})
            CHECK(qh.u.u(r, 0.0) ==
                  doctest::Approx(2.0 * (1.0 - 1.0 / r)).epsilon(1e-12).scale(1.0));
    }
    SUBCASE("circle bases have no condenser") {
        GridChart chart(WarpProfile::torus(1.0), ChartMode::radial, 64);
        CHECK_THROWS_AS(q_harmonic_radial(chart, ModulusParams::from_p(2.0)),
                        std::invalid_argument);
    }
}

TEST_CASE("capacity report on closed-form condensers") {
    SUBCASE("planar annulus [1, e]: cap_2 = 2 pi") {
        GridChart chart(WarpProfile::euclidean(1.0, std::exp(1.0)), ChartMode::radial,
                        256);
        CapacityReport rep = capacity_report(chart, ModulusParams::from_p(2.0));
        CHECK(rep.capacity == doctest::Approx(2.0 * kPi).epsilon(1e-8));
        CHECK(rep.capacity_closed == doctest::Approx(2.0 * kPi).epsilon(1e-12));
        CHECK(rep.modulus == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-10));
        CHECK(rep.relation_residual < 1e-10);
        CHECK(rep.harmonic_residual < 1e-8);
        CHECK(rep.nu_constancy < 1e-8);
    }
    SUBCASE("spherical shell k = 2, [1, 2]: cap_2 = 8 pi") {
        GridChart chart(WarpProfile::euclidean(1.0, 2.0, 2), ChartMode::radial, 256);
        CapacityReport rep = capacity_report(chart, ModulusParams::from_p(2.0));
        CHECK(rep.capacity == doctest::Approx(8.0 * kPi).epsilon(1e-8));
        CHECK(rep.modulus == doctest::Approx(1.0 / (8.0 * kPi)).epsilon(1e-10));
        CHECK(rep.relation_residual < 1e-10);
    }
}

TEST_CASE("modulus-capacity relation off the integer exponents") {
    // mod_p = cap_q^{1-p} must hold to quadrature accuracy for every p
    for (double p : {1.5, 2.0, 3.0}) {
        GridChart chart(WarpProfile::hyperbolic(0.5, 1.5), ChartMode::radial, 256);
        CapacityReport rep = capacity_report(chart, ModulusParams::from_p(p));
        CHECK(rep.q == doctest::Approx(p / (p - 1.0)).epsilon(1e-15));
        CHECK(rep.relation_residual < 1e-8 * std::max(1.0, rep.modulus));
        CHECK(rep.harmonic_residual < 1e-6);
        CHECK(rep.nu_constancy < 1e-6 * std::max(1.0, rep.capacity));
    }
}
