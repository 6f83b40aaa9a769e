#include "folmod/modulus.hpp"

#include <cmath>
#include <stdexcept>

#include "folmod/errors.hpp"
#include "folmod/kernels.hpp"

namespace folmod {

namespace {
constexpr double kWarpMin = 1e-6;

void check_nondegenerate(const GraphFoliation& fol) {
    for (double w : fol.frame.wv.v)
        if (w < kWarpMin)
            throw NumericError("degenerate leaf: warp factor below 1e-6");
}
}  // namespace

double conjugate_exponent(double p) {
    if (!(p > 1.0)) throw std::domain_error("conjugate_exponent: p must be > 1");
    return p / (p - 1.0);
}

ModulusParams ModulusParams::from_p(double p) { return {p, conjugate_exponent(p)}; }

double foliation_volume_integral(const GraphFoliation& fol, const ScalarField& f) {
    const FoliationFrame& fr = fol.frame;
    if (f.nr != fol.rho.nr || f.nth != fol.rho.nth)
        throw std::invalid_argument("foliation_volume_integral: shape mismatch");
    if (fol.chart->mode == ChartMode::radial) {
        return parallel_sum(f.nr, [&](std::ptrdiff_t j) {
            return f(static_cast<int>(j)) * fr.vol(static_cast<int>(j)) * fol.tw[j];
        });
    }
    double dth = fol.chart->dth;
    return parallel_sum(f.nr, [&](std::ptrdiff_t jj) {
        int j = static_cast<int>(jj);
        double row = 0.0;
        for (int i = 0; i < f.nth; ++i) row += f(j, i) * fr.vol(j, i);
        return row * fol.tw[j] * dth;
    });
}

double admissibility_margin(const GraphFoliation& fol, const ScalarField& f) {
    for (double x : f.v)
        if (x < -1e-12)
            throw std::domain_error("admissibility_margin: field must be nonnegative");
    std::vector<double> hats = hat_leafwise(fol, f);
    double margin = hats[0] - 1.0;
    for (double h : hats) margin = std::min(margin, h - 1.0);
    return margin;
}

double admissibility_margin(const GraphFoliation& fol, const FieldFn& f) {
    return admissibility_margin(fol, fol.sample(f));
}

ExtremalFunction extremal_function(const GraphFoliation& fol, const ModulusParams& params) {
    check_nondegenerate(fol);
    const ScalarField& j = fol.frame.jphi;
    ScalarField jq(j.nr, j.nth);
    for (std::size_t i = 0; i < j.v.size(); ++i) jq.v[i] = std::pow(j.v[i], params.q - 1.0);
    ExtremalFunction out;
    out.hat_j = hat_leafwise(fol, jq);
    out.f0 = ScalarField(j.nr, j.nth);
    for (int l = 0; l < j.nr; ++l) {
        if (!(out.hat_j[l] > 0.0))
            throw NumericError("extremal_function: vanishing leaf integral");
        for (int i = 0; i < j.nth; ++i) out.f0(l, i) = jq(l, i) / out.hat_j[l];
    }
    std::vector<double> hats = hat_leafwise(fol, out.f0);
    out.normalization_residual = 0.0;
    for (double h : hats)
        out.normalization_residual = std::max(out.normalization_residual, std::abs(h - 1.0));
    out.min_value = out.f0.v[0];
    for (double x : out.f0.v) out.min_value = std::min(out.min_value, x);
    return out;
}

ModulusReport p_modulus(const GraphFoliation& fol, const ModulusParams& params) {
    ExtremalFunction ext = extremal_function(fol, params);
    ModulusReport rep;
    rep.p = params.p;
    rep.q = params.q;
    rep.n_r = fol.n_leaves();
    rep.n_theta = fol.chart->mode == ChartMode::surface ? fol.chart->nth : 1;
    double mod = 0.0;
    for (int l = 0; l < fol.n_leaves(); ++l)
        mod += std::pow(ext.hat_j[l], 1.0 - params.p) * fol.tw[l];
    rep.value = mod;
    rep.normalization_residual = ext.normalization_residual;
    rep.admissibility_margin = admissibility_margin(fol, ext.f0);
    ScalarField f0p(ext.f0.nr, ext.f0.nth);
    for (std::size_t i = 0; i < f0p.v.size(); ++i) f0p.v[i] = std::pow(ext.f0.v[i], params.p);
    rep.cross_check = foliation_volume_integral(fol, f0p);
    return rep;
}

std::pair<double, double> fubini_residuals(const GraphFoliation& fol,
                                           const ModulusParams& params,
                                           const FieldFn& phi, const FieldFn& psi) {
    ExtremalFunction ext = extremal_function(fol, params);
    ScalarField ph = fol.sample(phi), ps = fol.sample(psi);
    std::vector<double> hph = hat_leafwise(fol, ph), hps = hat_leafwise(fol, ps);
    int nt = ph.nr, nth = ph.nth;
    ScalarField a(nt, nth), b(nt, nth), c(nt, nth), d(nt, nth);
    for (int l = 0; l < nt; ++l)
        for (int i = 0; i < nth; ++i) {
            double f0p1 = std::pow(ext.f0(l, i), params.p - 1.0);
            double f0p = f0p1 * ext.f0(l, i);
            a(l, i) = f0p1 * ph(l, i) * hps[l];
            b(l, i) = f0p1 * hph[l] * ps(l, i);
            c(l, i) = f0p1 * ph(l, i);
            d(l, i) = f0p * hph[l];
        }
    double res1 = std::abs(foliation_volume_integral(fol, a) -
                           foliation_volume_integral(fol, b));
    double res2 = std::abs(foliation_volume_integral(fol, c) -
                           foliation_volume_integral(fol, d));
    return {res1, res2};
}

double nu_q(const GridChart& chart, const LevelSetFunction& u, double q, double t) {
    if (t < u.tmin - 1e-12 || t > u.tmax + 1e-12)
        throw std::domain_error("nu_q: level outside range");
    auto weight = [&](double r, double th) {
        double gr = u.ur(r, th);
        double gt = chart.mode == ChartMode::surface
                        ? u.uth(r, th) / chart.profile.eval_w(r)
                        : 0.0;
        return std::pow(std::sqrt(gr * gr + gt * gt), q - 1.0);
    };
    return level_leaf_integral(chart, u, t, weight);
}

double modulus_from_levels(const GridChart& chart, const LevelSetFunction& u,
                           const ModulusParams& params) {
    int n = chart.nr;
    std::vector<double> tw;
    double h;
    if (chart.periodic_r()) {
        h = (u.tmax - u.tmin) / n;
        tw = periodic_weights(n, h);
    } else {
        h = (u.tmax - u.tmin) / (n - 1);
        tw = gregory_weights(n, h);
    }
    return parallel_sum(n, [&](std::ptrdiff_t i) {
        double t = u.tmin + i * h;
        return std::pow(nu_q(chart, u, params.q, t), 1.0 - params.p) * tw[i];
    });
}

double q_laplacian_at(const GridChart& chart, const LevelSetFunction& u, double q,
                      double r, double theta, double h) {
    const WarpProfile& p = chart.profile;
    if (h <= 0.0) h = 1e-3 * p.base_length();
    auto grad_sq = [&](double rr, double tt) {
        double gr = u.ur(rr, tt);
        double gt = chart.mode == ChartMode::surface ? u.uth(rr, tt) / p.eval_w(rr) : 0.0;
        return gr * gr + gt * gt;
    };
    if (q < 2.0 && grad_sq(r, theta) < 1e-24)
        throw NumericError("q_laplacian: vanishing gradient with singular weight");
    if (chart.mode == ChartMode::radial) {
        auto flux = [&](double rr) {
            double du = u.ur(rr, 0.0);
            return p.fiber_volume * std::pow(p.eval_w(rr), p.fiber_dim) *
                   std::pow(std::abs(du), q - 2.0) * du;
        };
        return fd_deriv(flux, r, h) / p.leaf_volume(r);
    }
    double hth = 1e-3 * chart.theta_len;
    auto flux_r = [&](double rr) {
        return p.eval_w(rr) * std::pow(grad_sq(rr, theta), 0.5 * (q - 2.0)) * u.ur(rr, theta);
    };
    auto flux_th = [&](double tt) {
        return std::pow(grad_sq(r, tt), 0.5 * (q - 2.0)) * u.uth(r, tt) / p.eval_w(r);
    };
    return (fd_deriv(flux_r, r, h) + fd_deriv(flux_th, theta, hth)) / p.eval_w(r);
}

ScalarField q_laplacian(const GridChart& chart, const LevelSetFunction& u, double q) {
    ScalarField out(chart.nr, chart.nth);
    parallel_for(chart.nr, [&](std::ptrdiff_t jj) {
        int j = static_cast<int>(jj);
        for (int i = 0; i < chart.nth; ++i)
            out(j, i) = q_laplacian_at(chart, u, q, chart.r[j],
                                       chart.mode == ChartMode::surface ? chart.th[i] : 0.0);
    });
    return out;
}

double nu_derivative_residual(const GridChart& chart, const LevelSetFunction& u,
                              const ModulusParams& params, double s, double h) {
    double dnu = (nu_q(chart, u, params.q, s + h) - nu_q(chart, u, params.q, s - h)) /
                 (2.0 * h);
    auto integrand = [&](double r, double th) {
        double gr = u.ur(r, th);
        double gt = chart.mode == ChartMode::surface
                        ? u.uth(r, th) / chart.profile.eval_w(r)
                        : 0.0;
        return q_laplacian_at(chart, u, params.q, r, th) / std::sqrt(gr * gr + gt * gt);
    };
    double rhs = level_leaf_integral(chart, u, s, integrand);
    return std::abs(dnu - rhs);
}

ScalarField criticality_residual_u(const GridChart& chart, const LevelSetFunction& u,
                                   const ModulusParams& params) {
    GraphFoliation fol = GraphFoliation::from_level_function(chart, u);
    int nt = fol.rho.nr, nth = fol.rho.nth;
    ScalarField grad(nt, nth), lap(nt, nth), weight(nt, nth);
    parallel_for(nt, [&](std::ptrdiff_t jj) {
        int j = static_cast<int>(jj);
        for (int i = 0; i < nth; ++i) {
            double r = fol.rho(j, i);
            double th = chart.mode == ChartMode::surface ? chart.th[i] : 0.0;
            double gr = u.ur(r, th);
            double gt = chart.mode == ChartMode::surface
                            ? u.uth(r, th) / chart.profile.eval_w(r)
                            : 0.0;
            grad(j, i) = std::sqrt(gr * gr + gt * gt);
            lap(j, i) = q_laplacian_at(chart, u, params.q, r, th);
            weight(j, i) = std::pow(grad(j, i), params.q - 1.0);
        }
    });
    std::vector<double> hat_w = hat_leafwise(fol, weight);
    ScalarField ratio(nt, nth);
    for (int j = 0; j < nt; ++j)
        for (int i = 0; i < nth; ++i) ratio(j, i) = lap(j, i) / grad(j, i);
    std::vector<double> hat_ratio = hat_leafwise(fol, ratio);
    ScalarField out(nt, nth);
    for (int j = 0; j < nt; ++j)
        for (int i = 0; i < nth; ++i) {
            double f0 = weight(j, i) / hat_w[j];
            out(j, i) = lap(j, i) - f0 * grad(j, i) * hat_ratio[j];
        }
    return out;
}

}  // namespace folmod
