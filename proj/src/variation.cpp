#include "folmod/variation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "folmod/errors.hpp"
#include "folmod/kernels.hpp"

namespace folmod {

namespace {

// A critical foliation is recognized by the sup norm of N(log f0^p) - p h.
constexpr double kCriticalTol = 1e-6;

ScalarField f0_power_p(const ExtremalFunction& ext, double p) {
    ScalarField out(ext.f0.nr, ext.f0.nth);
    for (std::size_t i = 0; i < ext.f0.v.size(); ++i)
        out.v[i] = std::pow(ext.f0.v[i], p);
    return out;
}

// First partial derivatives of a general field at a point, 4th-order central
// differences of the callables.
struct XDeriv {
    double xr, xth;
    double xr_r, xr_th, xth_r, xth_th;
};

XDeriv eval_xderiv(const GeneralField& x, double r, double th, double hr, double hth) {
    XDeriv d;
    d.xr = x.xr(r, th);
    d.xth = x.xth(r, th);
    d.xr_r = fd_deriv([&](double s) { return x.xr(s, th); }, r, hr);
    d.xr_th = fd_deriv([&](double s) { return x.xr(r, s); }, th, hth);
    d.xth_r = fd_deriv([&](double s) { return x.xth(s, th); }, r, hr);
    d.xth_th = fd_deriv([&](double s) { return x.xth(r, s); }, th, hth);
    return d;
}

// Pushforward field Z = nabla_X X in chart components, from the warped-product
// Christoffel symbols Gamma^r_{theta theta} = -w w', Gamma^theta_{r theta} = w'/w.
void eval_z(const GeneralField& x, const WarpProfile& prof, double r, double th,
            double hr, double hth, double* zr, double* zth) {
    XDeriv d = eval_xderiv(x, r, th, hr, hth);
    double w = prof.eval_w(r), dw = prof.eval_dw(r);
    *zr = d.xr * d.xr_r + d.xth * d.xr_th - w * dw * d.xth * d.xth;
    *zth = d.xr * d.xth_r + d.xth * d.xth_th + 2.0 * (dw / w) * d.xr * d.xth;
}

double stencil_deriv(const double* f, double h) {
    // f = {x-2h, x-h, x+h, x+2h}
    return (f[0] - 8.0 * f[1] + 8.0 * f[2] - f[3]) / (12.0 * h);
}

}  // namespace

std::pair<ScalarField, ScalarField> leafwise_divergences(const GraphFoliation& fol,
                                                         const NormalField& f) {
    NormalFieldOnLeaves s = sample_normal_field(fol, f);
    ScalarField div_leaf(s.f.nr, s.f.nth);
    for (std::size_t i = 0; i < s.f.v.size(); ++i)
        div_leaf.v[i] = -s.f.v[i] * fol.frame.mean_curv.v[i];
    return {std::move(div_leaf), std::move(s.nf)};
}

JacobianDerivatives jacobian_derivatives(const GridChart& chart, const GeneralField& x) {
    if (chart.mode != ChartMode::surface)
        throw std::invalid_argument("jacobian_derivatives: surface-mode chart required");
    const WarpProfile& prof = chart.profile;
    double hr = 1e-3 * prof.base_length();
    double hth = 1e-3 * chart.theta_len;
    JacobianDerivatives out;
    out.div_leaf = ScalarField(chart.nr, chart.nth);
    out.d2j_leaf = ScalarField(chart.nr, chart.nth);
    out.div_full = ScalarField(chart.nr, chart.nth);
    out.d2j_full = ScalarField(chart.nr, chart.nth);
    parallel_for(chart.nr, [&](std::ptrdiff_t jj) {
        int j = static_cast<int>(jj);
        double r = chart.r[j];
        double w = prof.eval_w(r), dw = prof.eval_dw(r), ddw = prof.eval_ddw(r);
        double curv = -ddw / w;  // Gauss curvature of the surface
        for (int i = 0; i < chart.nth; ++i) {
            double th = chart.th[i];
            XDeriv d = eval_xderiv(x, r, th, hr, hth);
            double div_f = d.xth_th + (dw / w) * d.xr;
            double div_m = d.xr_r + d.xth_th + (dw / w) * d.xr;
            out.div_leaf(j, i) = div_f;
            out.div_full(j, i) = div_m;

            // divergences of Z = nabla_X X by outer differences of the Z callables
            double zfr[4], zfth[4], zr_c, zth_c;
            double offs[4] = {-2.0, -1.0, 1.0, 2.0};
            for (int s = 0; s < 4; ++s) {
                double zr, zth;
                eval_z(x, prof, r + offs[s] * hr, th, hr, hth, &zr, &zth);
                zfr[s] = zr;
                eval_z(x, prof, r, th + offs[s] * hth, hr, hth, &zr, &zth);
                zfth[s] = zth;
            }
            eval_z(x, prof, r, th, hr, hth, &zr_c, &zth_c);
            double zr_r = stencil_deriv(zfr, hr);
            double zth_th = stencil_deriv(zfth, hth);
            double div_f_z = zth_th + (dw / w) * zr_c;
            double div_m_z = zr_r + zth_th + (dw / w) * zr_c;

            // leafwise: |nabla_{e_theta} X|^2 - Ric_F(X) + div_F(Z) - (div_F X)^2
            double a_rth = d.xr_th - w * dw * d.xth;
            double a_thr = d.xth_r + (dw / w) * d.xth;
            double a_thth = d.xth_th + (dw / w) * d.xr;
            double grad_eth_sq =
                (a_rth * a_rth) / (w * w) + a_thth * a_thth;
            double ric_leaf = curv * d.xr * d.xr;
            out.d2j_leaf(j, i) = grad_eth_sq - ric_leaf + div_f_z - div_f * div_f;

            // full: (div X)^2 - Ric(X) + div(Z) - tr((grad X)^2)
            double ric_full = curv * (d.xr * d.xr + w * w * d.xth * d.xth);
            double tr_sq = d.xr_r * d.xr_r + a_thth * a_thth + 2.0 * a_rth * a_thr;
            out.d2j_full(j, i) = div_m * div_m - ric_full + div_m_z - tr_sq;
        }
    });
    return out;
}

FlowCheckResult jacobian_flow_check(const GridChart& chart, const GeneralField& x,
                                    double t_step, int rk_steps, int eval_nr,
                                    int eval_nth) {
    if (chart.mode != ChartMode::surface)
        throw std::invalid_argument("jacobian_flow_check: surface-mode chart required");
    const WarpProfile& prof = chart.profile;
    double len = prof.base_length();
    FlowCheckResult res;
    for (int j = 0; j < eval_nr; ++j) {
        if (chart.periodic_r())
            res.r_nodes.push_back(prof.a + j * len / eval_nr);
        else
            res.r_nodes.push_back(prof.a + (0.1 + 0.8 * j / (eval_nr - 1)) * len);
    }
    for (int i = 0; i < eval_nth; ++i)
        res.th_nodes.push_back(i * chart.theta_len / eval_nth);
    res.analytic_leaf = ScalarField(eval_nr, eval_nth);
    res.fd_leaf = ScalarField(eval_nr, eval_nth);
    res.analytic_full = ScalarField(eval_nr, eval_nth);
    res.fd_full = ScalarField(eval_nr, eval_nth);

    double hr = 1e-3 * len, hth = 1e-3 * chart.theta_len;
    double dlr = 1e-3 * len, dlth = 1e-3 * chart.theta_len;  // stencil spacings
    auto flow_point = [&](double r, double th, double time, double* ro, double* tho) {
        double h = time / rk_steps;
        for (int s = 0; s < rk_steps; ++s) {
            double k1r = x.xr(r, th), k1t = x.xth(r, th);
            double k2r = x.xr(r + 0.5 * h * k1r, th + 0.5 * h * k1t);
            double k2t = x.xth(r + 0.5 * h * k1r, th + 0.5 * h * k1t);
            double k3r = x.xr(r + 0.5 * h * k2r, th + 0.5 * h * k2t);
            double k3t = x.xth(r + 0.5 * h * k2r, th + 0.5 * h * k2t);
            double k4r = x.xr(r + h * k3r, th + h * k3t);
            double k4t = x.xth(r + h * k3r, th + h * k3t);
            r += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
            th += h / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t);
        }
        *ro = r;
        *tho = th;
    };
    // Jacobians of the time-s flow at (r, th), by 4th-order differences of the
    // flowed stencil.
    auto jacobians = [&](double r, double th, double s, double* j_leaf, double* j_full) {
        double offs[4] = {-2.0, -1.0, 1.0, 2.0};
        double rr[4], rt[4], tr[4], tt[4];
        for (int k = 0; k < 4; ++k) {
            flow_point(r + offs[k] * dlr, th, s, &rr[k], &tr[k]);
            flow_point(r, th + offs[k] * dlth, s, &rt[k], &tt[k]);
        }
        double rc, tc;
        flow_point(r, th, s, &rc, &tc);
        double R_r = stencil_deriv(rr, dlr), T_r = stencil_deriv(tr, dlr);
        double R_th = stencil_deriv(rt, dlth), T_th = stencil_deriv(tt, dlth);
        double w0 = prof.eval_w(r), wc = prof.eval_w(rc);
        *j_leaf = std::sqrt(R_th * R_th + wc * wc * T_th * T_th) / w0;
        *j_full = (R_r * T_th - R_th * T_r) * wc / w0;
    };

    parallel_for(eval_nr, [&](std::ptrdiff_t jj) {
        int j = static_cast<int>(jj);
        double r = res.r_nodes[j];
        for (int i = 0; i < eval_nth; ++i) {
            double th = res.th_nodes[i];
            double lp, fp, lm, fm, l0, f0;
            jacobians(r, th, t_step, &lp, &fp);
            jacobians(r, th, -t_step, &lm, &fm);
            jacobians(r, th, 0.0, &l0, &f0);
            res.fd_leaf(j, i) = (lp - 2.0 * l0 + lm) / (t_step * t_step);
            res.fd_full(j, i) = (fp - 2.0 * f0 + fm) / (t_step * t_step);

            // analytic values at the same node
            XDeriv d = eval_xderiv(x, r, th, hr, hth);
            double w = prof.eval_w(r), dw = prof.eval_dw(r), ddw = prof.eval_ddw(r);
            double curv = -ddw / w;
            double div_f = d.xth_th + (dw / w) * d.xr;
            double div_m = d.xr_r + div_f;
            double zfr[4], zfth[4], zr_c, zth_c;
            double offs[4] = {-2.0, -1.0, 1.0, 2.0};
            for (int s = 0; s < 4; ++s) {
                double zr, zth;
                eval_z(x, prof, r + offs[s] * hr, th, hr, hth, &zr, &zth);
                zfr[s] = zr;
                eval_z(x, prof, r, th + offs[s] * hth, hr, hth, &zr, &zth);
                zfth[s] = zth;
            }
            eval_z(x, prof, r, th, hr, hth, &zr_c, &zth_c);
            double zr_r = stencil_deriv(zfr, hr), zth_th = stencil_deriv(zfth, hth);
            double a_rth = d.xr_th - w * dw * d.xth;
            double a_thr = d.xth_r + (dw / w) * d.xth;
            double a_thth = d.xth_th + (dw / w) * d.xr;
            res.analytic_leaf(j, i) =
                (a_rth * a_rth) / (w * w) + a_thth * a_thth - curv * d.xr * d.xr +
                zth_th + (dw / w) * zr_c - div_f * div_f;
            res.analytic_full(j, i) =
                div_m * div_m - curv * (d.xr * d.xr + w * w * d.xth * d.xth) +
                zr_r + zth_th + (dw / w) * zr_c -
                (d.xr_r * d.xr_r + a_thth * a_thth + 2.0 * a_rth * a_thr);
        }
    });
    for (int j = 0; j < eval_nr; ++j)
        for (int i = 0; i < eval_nth; ++i) {
            double al = res.analytic_leaf(j, i), af = res.analytic_full(j, i);
            res.max_rel_leaf = std::max(
                res.max_rel_leaf,
                std::abs(res.fd_leaf(j, i) - al) / std::max(1.0, std::abs(al)));
            res.max_rel_full = std::max(
                res.max_rel_full,
                std::abs(res.fd_full(j, i) - af) / std::max(1.0, std::abs(af)));
        }
    return res;
}

double first_variation(const GraphFoliation& fol, const ModulusParams& params,
                       const NormalField& f) {
    validate_compact_support(*fol.chart, f);
    ExtremalFunction ext = extremal_function(fol, params);
    ScalarField nf0 = normal_derivative(fol, ext.f0);
    NormalFieldOnLeaves s = sample_normal_field(fol, f);
    ScalarField integrand(ext.f0.nr, ext.f0.nth);
    for (std::size_t i = 0; i < integrand.v.size(); ++i) {
        double f0 = ext.f0.v[i];
        integrand.v[i] = -params.p * std::pow(f0, params.p - 1.0) * s.f.v[i] *
                         (nf0.v[i] - f0 * fol.frame.mean_curv.v[i]);
    }
    return foliation_volume_integral(fol, integrand);
}

ScalarField critical_residual(const GraphFoliation& fol, const ModulusParams& params) {
    ExtremalFunction ext = extremal_function(fol, params);
    ScalarField logf0(ext.f0.nr, ext.f0.nth);
    for (std::size_t i = 0; i < logf0.v.size(); ++i) logf0.v[i] = std::log(ext.f0.v[i]);
    ScalarField nlog = normal_derivative(fol, logf0);
    ScalarField out(ext.f0.nr, ext.f0.nth);
    for (std::size_t i = 0; i < out.v.size(); ++i)
        out.v[i] = params.p * (nlog.v[i] - fol.frame.mean_curv.v[i]);
    return out;
}

SecondVariationReport second_variation(const GraphFoliation& fol,
                                       const ModulusParams& params,
                                       const NormalField& f, bool fd_check,
                                       double fd_h, int flow_steps) {
    if (params.p < 2.0)
        throw std::domain_error("second_variation: requires p >= 2");
    validate_compact_support(*fol.chart, f);
    ExtremalFunction ext = extremal_function(fol, params);
    ScalarField f0p = f0_power_p(ext, params.p);
    NormalFieldOnLeaves s = sample_normal_field(fol, f);
    const FoliationFrame& fr = fol.frame;
    double p = params.p, q = params.q;

    int nt = f0p.nr, nth = f0p.nth;
    ScalarField a_int(nt, nth), psi(nt, nth), scale_int(nt, nth);
    for (std::size_t i = 0; i < a_int.v.size(); ++i) {
        double fv = s.f.v[i], nf = s.nf.v[i], tf = s.tf.v[i];
        double nnn = fr.nnn.v[i];
        a_int.v[i] = f0p.v[i] *
                     (-p * tf * tf - q * nf * nf +
                      fv * fv * (p * fr.pi_sq.v[i] + q * nnn * nnn + p * fr.ric_n.v[i]));
        psi.v[i] = ext.f0.v[i] * (std::sqrt(p - 1.0) * fv * fr.mean_curv.v[i] +
                                  std::sqrt(q - 1.0) * nf);
        scale_int.v[i] = f0p.v[i] * (fv * fv + p * tf * tf + q * nf * nf);
    }
    std::vector<double> hpsi = hat_leafwise(fol, psi);
    ScalarField b_int(nt, nth);
    for (int j = 0; j < nt; ++j)
        for (int i = 0; i < nth; ++i)
            b_int(j, i) = p * f0p(j, i) * hpsi[j] * hpsi[j];

    SecondVariationReport rep;
    rep.field_id = f.id;
    rep.a_part = foliation_volume_integral(fol, a_int);
    rep.b_part = foliation_volume_integral(fol, b_int);
    rep.total = rep.a_part + rep.b_part;
    rep.scale = foliation_volume_integral(fol, scale_int);
    rep.critical_residual_max = critical_residual(fol, params).max_abs();
    rep.critical = rep.critical_residual_max < kCriticalTol;

    if (fd_check) {
        double m0 = p_modulus(fol, params).value;
        auto mod_at = [&](double time) {
            return p_modulus(flow_normal_field(fol, f, time, flow_steps), params).value;
        };
        double m1p = mod_at(fd_h), m1m = mod_at(-fd_h);
        double m2p = mod_at(2.0 * fd_h), m2m = mod_at(-2.0 * fd_h);
        rep.fd_checked = true;
        rep.fd_value = (-m2p + 16.0 * m1p - 30.0 * m0 + 16.0 * m1m - m2m) /
                       (12.0 * fd_h * fd_h);
        rep.fd_discrepancy = std::abs(rep.fd_value - rep.total);
    }
    return rep;
}

StabilityReport stability_scan(const GraphFoliation& fol, const ModulusParams& params,
                               const std::vector<NormalField>& family) {
    StabilityReport rep;
    rep.stable = true;
    bool first = true;
    for (const NormalField& f : family) {
        SecondVariationReport r = second_variation(fol, params, f);
        double tol = 1e-8 * std::max(1.0, r.scale);
        if (r.total > tol) rep.stable = false;
        if (first || r.total > rep.max_total) {
            rep.max_total = r.total;
            rep.worst_index = static_cast<int>(rep.records.size());
            first = false;
        }
        rep.records.push_back(std::move(r));
    }
    return rep;
}

HardyReport hardy_report(const GraphFoliation& fol, const ModulusParams& params,
                         const NormalField& f) {
    validate_compact_support(*fol.chart, f);
    ExtremalFunction ext = extremal_function(fol, params);
    ScalarField f0p = f0_power_p(ext, params.p);
    NormalFieldOnLeaves s = sample_normal_field(fol, f);
    const FoliationFrame& fr = fol.frame;
    double p = params.p, q = params.q;
    ScalarField lhs_int(f0p.nr, f0p.nth), rhs_int(f0p.nr, f0p.nth);
    for (std::size_t i = 0; i < lhs_int.v.size(); ++i) {
        double fv = s.f.v[i], nf = s.nf.v[i], tf = s.tf.v[i];
        double nnn = fr.nnn.v[i];
        double rho = p * fr.pi_sq.v[i] + p * fr.ric_n.v[i] + q * nnn * nnn;
        lhs_int.v[i] = f0p.v[i] * fv * fv * rho;
        rhs_int.v[i] = f0p.v[i] * (p * tf * tf + q * nf * nf);
    }
    HardyReport rep;
    rep.lhs = foliation_volume_integral(fol, lhs_int);
    rep.rhs = foliation_volume_integral(fol, rhs_int);
    rep.residual = rep.rhs - rep.lhs;
    return rep;
}

double hardy_residual(const GraphFoliation& fol, const ModulusParams& params,
                      const NormalField& f) {
    return hardy_report(fol, params, f).residual;
}

Alpha0Report alpha0_sufficient_check(const GraphFoliation& fol,
                                     const ModulusParams& params,
                                     const NormalField& f) {
    validate_compact_support(*fol.chart, f);
    ExtremalFunction ext = extremal_function(fol, params);
    ScalarField f0p = f0_power_p(ext, params.p);
    ScalarField f0sq(ext.f0.nr, ext.f0.nth);
    for (std::size_t i = 0; i < f0sq.v.size(); ++i)
        f0sq.v[i] = ext.f0.v[i] * ext.f0.v[i];
    std::vector<double> hat_sq = hat_leafwise(fol, f0sq);
    ScalarField alpha(ext.f0.nr, ext.f0.nth);
    for (int j = 0; j < alpha.nr; ++j)
        for (int i = 0; i < alpha.nth; ++i) alpha(j, i) = hat_sq[j] / ext.f0(j, i);
    ScalarField nalpha = normal_derivative(fol, alpha);
    NormalFieldOnLeaves s = sample_normal_field(fol, f);
    const FoliationFrame& fr = fol.frame;
    double p = params.p, q = params.q;
    Alpha0Report rep;
    ScalarField integrand(f0p.nr, f0p.nth);
    for (std::size_t i = 0; i < integrand.v.size(); ++i) {
        double fv = s.f.v[i], nf = s.nf.v[i], tf = s.tf.v[i];
        double al = alpha.v[i], nnn = fr.nnn.v[i];
        integrand.v[i] =
            f0p.v[i] * (-p * tf * tf - q * (1.0 - al) * nf * nf +
                        p * fv * fv * (1.0 - al) * (fr.ric_n.v[i] + fr.pi_sq.v[i]) +
                        q * fv * fv * nnn * nnn -
                        p * nalpha.v[i] * fv * fv * fr.mean_curv.v[i] +
                        p * al * fv * fv * fr.div_nnn.v[i]);
        rep.alpha0_max_dev = std::max(rep.alpha0_max_dev, std::abs(al - 1.0));
    }
    rep.value = foliation_volume_integral(fol, integrand);
    return rep;
}

Sigma2Report sigma2f0_residual(const GraphFoliation& fol, const ModulusParams& params,
                               GradTermExponent grad_term) {
    ExtremalFunction ext = extremal_function(fol, params);
    double p = params.p, q = params.q;
    ScalarField k0(ext.f0.nr, ext.f0.nth);
    for (std::size_t i = 0; i < k0.v.size(); ++i)
        k0.v[i] = p * std::log(ext.f0.v[i]);
    ScalarField nk0 = normal_derivative(fol, k0);
    ScalarField n2k0 = normal_derivative(fol, nk0);
    ScalarField tk0 = tangential_derivative(fol, k0);
    ScalarField lapk0 = tangential_derivative(fol, tk0);  // leaf-intrinsic Laplacian

    Sigma2Report rep;
    rep.critical_residual_max = critical_residual(fol, params).max_abs();
    rep.critical = rep.critical_residual_max < kCriticalTol;
    const FoliationFrame& fr = fol.frame;
    int nt = k0.nr, nth = k0.nth;
    // Nested one-sided stencils degrade near the t-ends of an interval base;
    // compare on a trimmed range there.
    int j0 = fol.chart->periodic_r() ? 0 : 4;
    int j1 = fol.chart->periodic_r() ? nt : nt - 4;
    for (int j = j0; j < j1; ++j)
        for (int i = 0; i < nth; ++i) {
            double nnn = fr.nnn(j, i);
            double lhs = p * fr.pi_sq(j, i) + q * nnn * nnn + p * fr.ric_n(j, i);
            double g = grad_term == GradTermExponent::squared
                           ? tk0(j, i) * tk0(j, i)
                           : std::abs(tk0(j, i));
            double rhs = (p - 1.0) * lapk0(j, i) + (2.0 - p) * g + n2k0(j, i);
            rep.residual = std::max(rep.residual, std::abs(lhs - rhs));
        }
    return rep;
}

}  // namespace folmod
