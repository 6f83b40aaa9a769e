#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "folmod/fields.hpp"
#include "folmod/variation.hpp"

using namespace folmod;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("leafwise divergences of f N") {
    GridChart chart(WarpProfile::euclidean(1.0, 2.0), ChartMode::radial, 64);
    GraphFoliation fol = GraphFoliation::radial(chart);
    NormalField one;
    one.f = [](double, double) { return 1.0; };
    one.fr = [](double, double) { return 0.0; };
    one.fth = [](double, double) { return 0.0; };
    auto [div_leaf, div_perp] = leafwise_divergences(fol, one);
    for (int j = 0; j < chart.nr; ++j) {
        CHECK(div_leaf(j) == doctest::Approx(1.0 / chart.r[j]).epsilon(1e-12));
        CHECK(div_perp(j) == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("jacobian derivative closed forms") {
    GridChart annulus(WarpProfile::euclidean(1.0, 2.0), ChartMode::surface, 24, 24);
    GridChart torus(WarpProfile::torus(1.0), ChartMode::surface, 24, 24);
    SUBCASE("X = r d/dr on the euclidean annulus") {
        JacobianDerivatives d = jacobian_derivatives(annulus, radial_scaling_field());
        for (int j = 2; j < annulus.nr - 2; ++j)
            for (int i = 0; i < annulus.nth; ++i) {
                CHECK(d.div_leaf(j, i) == doctest::Approx(1.0).epsilon(1e-9));
                CHECK(d.div_full(j, i) == doctest::Approx(2.0).epsilon(1e-9));
                CHECK(d.d2j_leaf(j, i) == doctest::Approx(1.0).epsilon(1e-7));
                CHECK(d.d2j_full(j, i) == doctest::Approx(4.0).epsilon(1e-7));
            }
    }
    SUBCASE("X = d/dtheta is measure preserving") {
        for (const GridChart* chart : {&annulus, &torus}) {
            JacobianDerivatives d = jacobian_derivatives(*chart, rotation_field());
            for (int j = 2; j < chart->nr - 2; ++j)
                for (int i = 0; i < chart->nth; ++i) {
                    CHECK(d.d2j_leaf(j, i) ==
                          doctest::Approx(0.0).epsilon(1e-7).scale(1.0));
                    CHECK(d.d2j_full(j, i) ==
                          doctest::Approx(0.0).epsilon(1e-7).scale(1.0));
                }
        }
    }
    SUBCASE("X = sin(theta) d/dr on the flat torus") {
        JacobianDerivatives d =
            jacobian_derivatives(torus, sin_theta_radial_field(torus.profile));
        for (int j = 0; j < torus.nr; ++j)
            for (int i = 0; i < torus.nth; ++i) {
                double c = std::cos(torus.th[i]);
                CHECK(d.d2j_leaf(j, i) ==
                      doctest::Approx(c * c).epsilon(1e-7).scale(1.0));
                CHECK(d.d2j_full(j, i) ==
                      doctest::Approx(0.0).epsilon(1e-7).scale(1.0));
            }
    }
}

TEST_CASE("flow-based second differences confirm the jacobian formulas") {
    GridChart annulus(WarpProfile::euclidean(1.0, 2.0), ChartMode::surface, 16, 16);
    GridChart torus(WarpProfile::torus(1.0), ChartMode::surface, 16, 16);
    SUBCASE("worked fields") {
        FlowCheckResult a = jacobian_flow_check(annulus, radial_scaling_field());
        CHECK(a.max_rel_leaf < 1e-3);
        CHECK(a.max_rel_full < 1e-3);
        FlowCheckResult b = jacobian_flow_check(annulus, rotation_field());
        CHECK(b.max_rel_leaf < 1e-3);
        CHECK(b.max_rel_full < 1e-3);
        FlowCheckResult c =
            jacobian_flow_check(torus, sin_theta_radial_field(torus.profile));
        CHECK(c.max_rel_leaf < 1e-3);
        CHECK(c.max_rel_full < 1e-3);
    }
    SUBCASE("seeded smooth fields on a curved profile") {
        GridChart hyp(WarpProfile::hyperbolic(0.5, 1.5), ChartMode::surface, 16, 16);
        for (std::uint32_t seed : {1u, 2u, 3u}) {
            FlowCheckResult r =
                jacobian_flow_check(hyp, random_general_field(hyp.profile, seed));
            CHECK(r.max_rel_leaf < 1e-3);
            CHECK(r.max_rel_full < 1e-3);
        }
    }
}

TEST_CASE("first variation") {
    ModulusParams p2 = ModulusParams::from_p(2.0);
    SUBCASE("vanishes on distance foliations") {
        GridChart chart(WarpProfile::euclidean(1.0, 2.0), ChartMode::surface, 64, 64);
        GraphFoliation fol = GraphFoliation::radial(chart);
        for (std::uint32_t seed : {5u, 6u, 7u}) {
            NormalField f = random_normal_field(chart.profile, seed, 2);
            CHECK(std::abs(first_variation(fol, p2, f)) < 1e-8);
        }
    }
    SUBCASE("matches a finite difference of the modulus at a non-critical point") {
        // shear foliation of the flat torus flowed by the radial field
        // phi(r) d/dr; the normal component of the variation is phi / J
        GridChart chart(WarpProfile::torus(1.0), ChartMode::surface, 128, 128);
        double eps = 0.3;
        GraphFoliation fol = GraphFoliation::shear(
            chart, [](double th) { return std::sin(th); }, eps);
        auto jfac = [eps](double th) {
            double c = eps * std::cos(th);
            return std::sqrt(1.0 + c * c);
        };
        NormalField normal_part;
        normal_part.f = [=](double, double th) { return std::sin(th) / jfac(th); };
        normal_part.fr = [](double, double) { return 0.0; };
        normal_part.fth = [=](double, double th) {
            double jf = jfac(th);
            double djf = -eps * eps * std::sin(th) * std::cos(th) / jf;
            return (std::cos(th) * jf - std::sin(th) * djf) / (jf * jf);
        };
        double analytic = first_variation(fol, p2, normal_part);

        // flowing by sin(theta) d/dr steepens the shear: rho = t + (eps+s)
        // sin(theta), so mod_2(s) = 1/(2 pi + pi (eps+s)^2) in closed form
        NormalField radial_flow;
        radial_flow.f = [](double, double th) { return std::sin(th); };
        radial_flow.fr = [](double, double) { return 0.0; };
        radial_flow.fth = [](double, double th) { return std::cos(th); };
        double h = 1e-4;
        double mp = p_modulus(flow_normal_field(fol, radial_flow, h, 8), p2).value;
        double mm = p_modulus(flow_normal_field(fol, radial_flow, -h, 8), p2).value;
        double fd = (mp - mm) / (2.0 * h);
        double denom = 2.0 * kPi + kPi * eps * eps;
        double closed = -2.0 * kPi * eps / (denom * denom);
        CHECK(analytic == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
        CHECK(analytic == doctest::Approx(closed).epsilon(1e-7));
        CHECK(std::abs(analytic) > 1e-2);  // genuinely non-critical direction
    }
}

TEST_CASE("criticality residual") {
    ModulusParams p2 = ModulusParams::from_p(2.0);
    SUBCASE("distance foliation: N log f0^p and p h cancel exactly") {
        GridChart chart(WarpProfile::euclidean(1.0, 2.0), ChartMode::radial, 512);
        GraphFoliation fol = GraphFoliation::radial(chart);
        CHECK(critical_residual(fol, p2).max_abs() < 1e-9);
    }
    SUBCASE("torus shear at eps = 0.3 is visibly non-critical") {
        GridChart chart(WarpProfile::torus(1.0), ChartMode::surface, 128, 128);
        GraphFoliation fol = GraphFoliation::shear(
            chart, [](double th) { return std::sin(th); }, 0.3);
        CHECK(critical_residual(fol, p2).max_abs() > 1e-2);
    }
}

TEST_CASE("second variation") {
    ModulusParams p2 = ModulusParams::from_p(2.0);
    GridChart torus(WarpProfile::torus(1.0), ChartMode::surface, 128, 128);
    GraphFoliation flat = GraphFoliation::radial(torus);
    SUBCASE("p below 2 is rejected") {
        CHECK_THROWS_AS(second_variation(flat, ModulusParams::from_p(1.5),
                                         sin_theta_field(torus.profile)),
                        std::domain_error);
    }
    SUBCASE("torus benchmark: f = sin(theta) gives -1/(2 pi)") {
        SecondVariationReport rep =
            second_variation(flat, p2, sin_theta_field(torus.profile));
        CHECK(rep.critical);
        CHECK(rep.a_part == doctest::Approx(-1.0 / (2.0 * kPi)).epsilon(1e-10));
        CHECK(std::abs(rep.b_part) < 1e-12);
        CHECK(rep.total == doctest::Approx(-1.0 / (2.0 * kPi)).epsilon(1e-10));
    }
    SUBCASE("matches the flow-based second difference of the modulus") {
        SecondVariationReport rep = second_variation(
            flat, p2, sin_theta_field(torus.profile), true, 1e-2, 16);
        CHECK(rep.fd_checked);
        CHECK(rep.fd_discrepancy < 1e-5);
    }
    SUBCASE("seeded field against the flow oracle") {
        NormalField f = random_normal_field(torus.profile, 17, 2);
        SecondVariationReport rep = second_variation(flat, p2, f, true, 1e-2, 16);
        CHECK(rep.fd_discrepancy < 1e-3 * std::max(1.0, std::abs(rep.total)));
        CHECK(rep.total <= 1e-10);
    }
    SUBCASE("radial reperturbations of the annulus are neutral directions") {
        // a compactly supported radial field only relabels the concentric
        // circles, so the second variation must vanish; an independent 1D
        // Simpson oracle of the reduced integrand must agree
        GridChart chart(WarpProfile::euclidean(1.0, 2.0), ChartMode::radial, 256);
        GraphFoliation fol = GraphFoliation::radial(chart);
        NormalField f;
        f.f = [](double r, double) {
            double s = std::sin(kPi * (r - 1.0));
            return s * s;
        };
        f.fr = [](double r, double) { return kPi * std::sin(2.0 * kPi * (r - 1.0)); };
        f.fth = [](double, double) { return 0.0; };
        f.compact_support = true;
        SecondVariationReport rep = second_variation(fol, p2, f);
        int n = 2000;
        double h = 1.0 / n, oracle = 0.0;
        for (int i = 0; i <= n; ++i) {
            double r = 1.0 + i * h;
            double fv = std::sin(kPi * (r - 1.0)) * std::sin(kPi * (r - 1.0));
            double fp = kPi * std::sin(2.0 * kPi * (r - 1.0));
            double psi = fp - fv / r;
            double integrand =
                (-fp * fp + fv * fv / (r * r) + psi * psi) / (kPi * r);
            double weight = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            oracle += weight * integrand;
        }
        oracle *= h / 3.0;
        CHECK(rep.total == doctest::Approx(oracle).epsilon(1e-8).scale(1.0));
        CHECK(std::abs(rep.total) < 1e-8 * std::max(1.0, rep.scale));
    }
}

TEST_CASE("stability scan on distance foliations") {
    GridChart chart(WarpProfile::hyperbolic(0.5, 1.5), ChartMode::surface, 256, 64);
    GraphFoliation fol = GraphFoliation::radial(chart);
    for (double p : {2.0, 3.0}) {
        std::vector<NormalField> family;
        for (std::uint32_t s = 0; s < 5; ++s)
            family.push_back(random_normal_field(chart.profile, 30 + s, 2));
        StabilityReport rep = stability_scan(fol, ModulusParams::from_p(p), family);
        CHECK(rep.stable);
        CHECK(static_cast<int>(rep.records.size()) == 5);
        for (const SecondVariationReport& r : rep.records) CHECK(r.critical);
    }
}

TEST_CASE("hardy-type inequality") {
    ModulusParams p2 = ModulusParams::from_p(2.0);
    GridChart chart(WarpProfile::spherical(0.7, 2.2), ChartMode::surface, 64, 64);
    GraphFoliation fol = GraphFoliation::radial(chart);
    SUBCASE("zero field gives zero") {
        NormalField zero;
        zero.f = [](double, double) { return 0.0; };
        zero.fr = [](double, double) { return 0.0; };
        zero.fth = [](double, double) { return 0.0; };
        zero.compact_support = true;
        HardyReport rep = hardy_report(fol, p2, zero);
        CHECK(rep.lhs == 0.0);
        CHECK(rep.rhs == 0.0);
        CHECK(rep.residual == 0.0);
    }
    SUBCASE("residuals are nonnegative on a stable band") {
        for (double p : {2.0, 3.0})
            for (std::uint32_t seed : {40u, 41u, 42u}) {
                NormalField f = random_normal_field(chart.profile, seed, 2);
                CHECK(hardy_residual(fol, ModulusParams::from_p(p), f) >= -1e-10);
            }
    }
}

TEST_CASE("alpha0 sufficient condition") {
    ModulusParams p2 = ModulusParams::from_p(2.0);
    SUBCASE("torus benchmark value") {
        GridChart torus(WarpProfile::torus(1.0), ChartMode::surface, 128, 128);
        GraphFoliation flat = GraphFoliation::radial(torus);
        Alpha0Report rep =
            alpha0_sufficient_check(flat, p2, sin_theta_field(torus.profile));
        CHECK(rep.alpha0_max_dev < 1e-12);
        CHECK(rep.value == doctest::Approx(-1.0 / (2.0 * kPi)).epsilon(1e-10));
    }
    SUBCASE("alpha0 = 1 on distance foliations, and the bound is nonpositive") {
        GridChart chart(WarpProfile::euclidean(1.0, 2.0), ChartMode::surface, 64, 64);
        GraphFoliation fol = GraphFoliation::radial(chart);
        for (std::uint32_t seed : {50u, 51u}) {
            NormalField f = random_normal_field(chart.profile, seed, 2);
            Alpha0Report rep = alpha0_sufficient_check(fol, p2, f);
            CHECK(rep.alpha0_max_dev < 1e-10);
            CHECK(rep.value <= 1e-10);
        }
    }
}

TEST_CASE("extremal-function form of the second variation identity") {
    SUBCASE("euclidean annulus, p = 2") {
        GridChart chart(WarpProfile::euclidean(1.0, 2.0), ChartMode::radial, 512);
        GraphFoliation fol = GraphFoliation::radial(chart);
        Sigma2Report rep = sigma2f0_residual(fol, ModulusParams::from_p(2.0));
        CHECK(rep.critical);
        CHECK(rep.residual < 1e-8);
    }
    SUBCASE("both gradient-term variants coincide on radial critical foliations") {
        GridChart chart(WarpProfile::spherical(0.7, 2.2), ChartMode::radial, 512);
        GraphFoliation fol = GraphFoliation::radial(chart);
        ModulusParams p3 = ModulusParams::from_p(3.0);
        Sigma2Report a = sigma2f0_residual(fol, p3, GradTermExponent::squared);
        Sigma2Report b = sigma2f0_residual(fol, p3, GradTermExponent::linear);
        CHECK(a.residual == b.residual);
        CHECK(a.residual < 1e-6);
    }
}
