#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "folmod/errors.hpp"
#include "folmod/fields.hpp"
#include "folmod/modulus.hpp"

using namespace folmod;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("conjugate exponents") {
    CHECK(conjugate_exponent(2.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(conjugate_exponent(1.5) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(conjugate_exponent(3.0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK_THROWS_AS(conjugate_exponent(1.0), std::domain_error);
    CHECK_THROWS_AS(conjugate_exponent(0.5), std::domain_error);
}

TEST_CASE("closed-form moduli of radial foliations") {
    SUBCASE("euclidean annulus [1, e], p = 2: 1/(2 pi)") {
        GridChart chart(WarpProfile::euclidean(1.0, std::exp(1.0)), ChartMode::radial,
                        512);
        GraphFoliation fol = GraphFoliation::radial(chart);
        ModulusReport rep = p_modulus(fol, ModulusParams::from_p(2.0));
        CHECK(rep.value == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-10));
        CHECK(rep.cross_check == doctest::Approx(rep.value).epsilon(1e-13));
        CHECK(rep.normalization_residual < 1e-12);
        CHECK(std::abs(rep.admissibility_margin) < 1e-12);
    }
    SUBCASE("euclidean shell k=2 [1, 2], p = 2: 1/(8 pi)") {
        GridChart chart(WarpProfile::euclidean(1.0, 2.0, 2), ChartMode::radial, 512);
        GraphFoliation fol = GraphFoliation::radial(chart);
        ModulusReport rep = p_modulus(fol, ModulusParams::from_p(2.0));
        CHECK(rep.value == doctest::Approx(1.0 / (8.0 * kPi)).epsilon(1e-10));
    }
    SUBCASE("cylinder of unit length: (2 pi)^{1-p}") {
        for (double p : {1.5, 2.0, 3.0}) {
            GridChart chart(WarpProfile::cylinder(0.0, 1.0), ChartMode::radial, 256);
            GraphFoliation fol = GraphFoliation::radial(chart);
            ModulusReport rep = p_modulus(fol, ModulusParams::from_p(p));
            CHECK(rep.value ==
                  doctest::Approx(std::pow(2.0 * kPi, 1.0 - p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("extremal function of the euclidean annulus is 1/(2 pi r)") {
    GridChart chart(WarpProfile::euclidean(1.0, 2.0), ChartMode::radial, 128);
    GraphFoliation fol = GraphFoliation::radial(chart);
    ExtremalFunction ext = extremal_function(fol, ModulusParams::from_p(2.0));
    for (int j = 0; j < chart.nr; ++j)
        CHECK(ext.f0(j) ==
              doctest::Approx(1.0 / (2.0 * kPi * chart.r[j])).epsilon(1e-12));
    CHECK(ext.min_value > 0.0);
}

TEST_CASE("torus shear modulus closed form") {
    // rho = t + eps sin(theta) on the unit-circumference flat torus:
    // mod_2 = 1 / (2 pi + pi eps^2)
    GridChart chart(WarpProfile::torus(1.0), ChartMode::surface, 128, 256);
    for (double eps : {0.1, 0.3}) {
        GraphFoliation fol =
            GraphFoliation::shear(chart, [](double th) { return std::sin(th); }, eps);
        ModulusReport rep = p_modulus(fol, ModulusParams::from_p(2.0));
        CHECK(rep.value ==
              doctest::Approx(1.0 / (2.0 * kPi + kPi * eps * eps)).epsilon(1e-9));
        CHECK(rep.cross_check == doctest::Approx(rep.value).epsilon(1e-13));
    }
}

TEST_CASE("modulus is monotone in the leaf family") {
    // a subfamily is constrained by fewer leaves, so its modulus is smaller;
    // the radial family of the larger annulus contains the smaller one
    ModulusParams params = ModulusParams::from_p(2.0);
    GridChart small(WarpProfile::euclidean(1.2, 1.8), ChartMode::radial, 128);
    GridChart large(WarpProfile::euclidean(1.0, 2.0), ChartMode::radial, 128);
    double mod_small = p_modulus(GraphFoliation::radial(small), params).value;
    double mod_large = p_modulus(GraphFoliation::radial(large), params).value;
    CHECK(mod_small < mod_large);
}

TEST_CASE("admissibility margin flags sub-admissible fields") {
    GridChart chart(WarpProfile::euclidean(1.0, 2.0), ChartMode::radial, 64);
    GraphFoliation fol = GraphFoliation::radial(chart);
    // half the extremal function integrates to 1/2 on every leaf
    CHECK(admissibility_margin(fol, [](double r, double) {
              return 0.5 / (2.0 * kPi * r);
          }) == doctest::Approx(-0.5).epsilon(1e-10));
    ScalarField neg(chart.nr, 1, -1.0);
    CHECK_THROWS_AS(admissibility_margin(fol, neg), std::domain_error);
}

TEST_CASE("integral identities on a sheared torus") {
    GridChart chart(WarpProfile::torus(1.0), ChartMode::surface, 128, 128);
    GraphFoliation fol =
        GraphFoliation::shear(chart, [](double th) { return std::sin(th); }, 0.25);
    for (double p : {1.5, 2.0, 3.0}) {
        NormalField a = random_normal_field(chart.profile, 101, 3);
        NormalField b = random_normal_field(chart.profile, 202, 3);
        auto [res1, res2] =
            fubini_residuals(fol, ModulusParams::from_p(p), a.f, b.f);
        CHECK(res1 < 1e-12);
        CHECK(res2 < 1e-12);
    }
}

TEST_CASE("level-set weights") {
    WarpProfile prof = WarpProfile::euclidean(1.0, 2.0);
    GridChart chart(prof, ChartMode::radial, 128);
    LevelSetFunction u = LevelSetFunction::from_radial(
        chart, [](double r) { return r; }, [](double) { return 1.0; });
    SUBCASE("nu of the distance function is the leaf length") {
        for (double q : {1.5, 2.0, 3.0})
            for (double t : {1.1, 1.5, 1.9})
                CHECK(nu_q(chart, u, q, t) ==
                      doctest::Approx(2.0 * kPi * t).epsilon(1e-12));
        CHECK_THROWS_AS(nu_q(chart, u, 2.0, 3.0), std::domain_error);
    }
    SUBCASE("modulus through the nu route matches the closed form") {
        // mod_2 = (2 pi)^{-1} ln 2 on [1, 2]
        double v = modulus_from_levels(chart, u, ModulusParams::from_p(2.0));
        CHECK(v == doctest::Approx(std::log(2.0) / (2.0 * kPi)).epsilon(1e-10));
    }
}

TEST_CASE("q-Laplacian point evaluations") {
    WarpProfile prof = WarpProfile::euclidean(1.0, 2.0);
    GridChart chart(prof, ChartMode::radial, 64);
    SUBCASE("u = r, q = 2: Laplacian of the distance is 1/r") {
        LevelSetFunction u = LevelSetFunction::from_radial(
            chart, [](double r) { return r; }, [](double) { return 1.0; });
        for (double r : {1.2, 1.5, 1.8})
            CHECK(q_laplacian_at(chart, u, 2.0, r, 0.0) ==
                  doctest::Approx(1.0 / r).epsilon(1e-8));
    }
    SUBCASE("u = ln r is harmonic in the plane") {
        LevelSetFunction u = LevelSetFunction::from_radial(
            chart, [](double r) { return std::log(r); },
            [](double r) { return 1.0 / r; });
        for (double r : {1.2, 1.5, 1.8})
            CHECK(std::abs(q_laplacian_at(chart, u, 2.0, r, 0.0)) < 1e-9);
    }
}

TEST_CASE("nu derivative identity for the distance function") {
    // both sides closed-form: d(nu)/dt = 2 pi, leaf integral of (1/r) is 2 pi
    GridChart chart(WarpProfile::euclidean(1.0, 2.0), ChartMode::radial, 64);
    LevelSetFunction u = LevelSetFunction::from_radial(
        chart, [](double r) { return r; }, [](double) { return 1.0; });
    CHECK(nu_derivative_residual(chart, u, ModulusParams::from_p(2.0), 1.5, 1e-3) <
          1e-9);
}

TEST_CASE("criticality residual of level-set foliations") {
    GridChart chart(WarpProfile::euclidean(1.0, 2.0), ChartMode::radial, 64);
    SUBCASE("log r generates a critical foliation for p = 2") {
        LevelSetFunction u = LevelSetFunction::from_radial(
            chart, [](double r) { return std::log(r); },
            [](double r) { return 1.0 / r; });
        CHECK(criticality_residual_u(chart, u, ModulusParams::from_p(2.0)).max_abs() <
              1e-8);
    }
    SUBCASE("the distance foliation is critical regardless of the label function") {
        // u = r^2 relabels the same leaves; the residual is label-invariant
        LevelSetFunction u = LevelSetFunction::from_radial(
            chart, [](double r) { return r * r; }, [](double r) { return 2.0 * r; });
        CHECK(criticality_residual_u(chart, u, ModulusParams::from_p(2.0)).max_abs() <
              1e-7);
    }
}
