#include "folmod/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "folmod/errors.hpp"
#include "folmod/kernels.hpp"

namespace folmod {

namespace {

// Cubic Lagrange interpolation on a uniform table.
struct UniformTable {
    double x0 = 0.0, h = 1.0;
    std::vector<double> vals;

    double eval(double x) const {
        int n = static_cast<int>(vals.size());
        double s = (x - x0) / h;
        int i = static_cast<int>(std::floor(s));
        i = std::clamp(i, 1, n - 3);
        double u = s - i;
        double fm = vals[i - 1], f0 = vals[i], f1 = vals[i + 1], f2 = vals[i + 2];
        return fm * (-u * (u - 1.0) * (u - 2.0) / 6.0) +
               f0 * ((u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0) +
               f1 * (-(u + 1.0) * u * (u - 2.0) / 2.0) +
               f2 * ((u + 1.0) * u * (u - 1.0) / 6.0);
    }
};

// Cumulative integral of uniformly sampled values, integrating the local
// cubic interpolant per cell (O(h^4)).
std::vector<double> cumulative4(const std::vector<double>& f, double h) {
    int n = static_cast<int>(f.size());
    std::vector<double> c(n, 0.0);
    if (n < 4) throw std::invalid_argument("cumulative4: too few samples");
    auto cell = [&](int j) {
        if (j == 0)
            return h * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]) / 24.0;
        if (j == n - 2)
            return h * (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]) / 24.0;
        return h * (-f[j - 1] + 13.0 * f[j] + 13.0 * f[j + 1] - f[j + 2]) / 24.0;
    };
    for (int j = 0; j + 1 < n; ++j) c[j + 1] = c[j] + cell(j);
    return c;
}

ScalarField d_dt(const GridChart& chart, const ScalarField& f, double dt) {
    ScalarField out(f.nr, f.nth);
    parallel_for(f.nth, [&](std::ptrdiff_t i) {
        deriv4(f.v.data() + i, out.v.data() + i, f.nr, dt, chart.periodic_r(), f.nth);
    });
    return out;
}

ScalarField d_dth(const GridChart& chart, const ScalarField& f) {
    ScalarField out(f.nr, f.nth);
    parallel_for(f.nr, [&](std::ptrdiff_t j) {
        deriv4(f.v.data() + j * f.nth, out.v.data() + j * f.nth, f.nth, chart.dth, true, 1);
    });
    return out;
}

// Divergence in foliation coordinates of a vector field with chart components
// (vr, vth) sampled along leaves. Volume density is wv * rho_t.
ScalarField divergence_impl(const GridChart& chart, const FoliationFrame& fr,
                            const ScalarField& vr, const ScalarField& vth, double dt) {
    int nt = vr.nr, nth = vr.nth;
    ScalarField g1(nt, nth), g2(nt, nth);
    for (int j = 0; j < nt; ++j)
        for (int i = 0; i < nth; ++i) {
            double dens = fr.wv(j, i) * fr.rho_t(j, i);
            double vt = (vr(j, i) - vth(j, i) * fr.rho_th(j, i)) / fr.rho_t(j, i);
            g1(j, i) = dens * vt;
            g2(j, i) = dens * vth(j, i);
        }
    ScalarField dg1 = d_dt(chart, g1, dt);
    ScalarField dg2 = d_dth(chart, g2);
    ScalarField out(nt, nth);
    for (int j = 0; j < nt; ++j)
        for (int i = 0; i < nth; ++i)
            out(j, i) = (dg1(j, i) + dg2(j, i)) / (fr.wv(j, i) * fr.rho_t(j, i));
    return out;
}

void build_frame(GraphFoliation& fol) {
    const GridChart& chart = *fol.chart;
    const WarpProfile& p = chart.profile;
    FoliationFrame& fr = fol.frame;
    int nt = fol.rho.nr, nth = fol.rho.nth;

    if (chart.periodic_r()) {
        // rho is only quasi-periodic in t (rho(t + L) = rho(t) + L); the
        // deviation rho - t is periodic and safe to differentiate across the
        // wrap.
        ScalarField dev = fol.rho;
        for (int j = 0; j < nt; ++j)
            for (int i = 0; i < nth; ++i) dev(j, i) -= fol.t[j];
        fr.rho_t = d_dt(chart, dev, fol.dt);
        for (double& x : fr.rho_t.v) x += 1.0;
    } else {
        fr.rho_t = d_dt(chart, fol.rho, fol.dt);
    }
    for (int j = 0; j < nt; ++j)
        for (int i = 0; i < nth; ++i)
            if (fr.rho_t(j, i) < kMonotoneEps)
                throw FlowDegeneracyError("foliation: leaves are not monotone graphs", j);

    fr.radial_leaves = true;
    for (int j = 0; j < nt && fr.radial_leaves; ++j)
        for (int i = 0; i < nth; ++i)
            if (std::abs(fol.rho(j, i) - fol.rho(j, 0)) > 1e-13) {
                fr.radial_leaves = false;
                break;
            }

    fr.wv = ScalarField(nt, nth);
    fr.dwv = ScalarField(nt, nth);
    fr.jphi = ScalarField(nt, nth);
    fr.leaf_m = ScalarField(nt, nth);
    fr.vol = ScalarField(nt, nth);
    fr.mean_curv = ScalarField(nt, nth);
    fr.pi_sq = ScalarField(nt, nth);
    fr.ric_n = ScalarField(nt, nth);
    fr.nnn = ScalarField(nt, nth, 0.0);
    fr.div_nnn = ScalarField(nt, nth, 0.0);

    const double k = static_cast<double>(p.fiber_dim);

    if (chart.mode == ChartMode::radial) {
        fr.rho_th = ScalarField(nt, 1, 0.0);
        for (int j = 0; j < nt; ++j) {
            double r = fol.rho(j);
            double w = p.eval_w(r), dw = p.eval_dw(r), ddw = p.eval_ddw(r);
            fr.wv(j) = w;
            fr.dwv(j) = dw;
            fr.jphi(j) = 1.0 / fr.rho_t(j);
            fr.leaf_m(j) = p.fiber_volume * std::pow(w, p.fiber_dim);  // sigma(rho)
            fr.vol(j) = fr.leaf_m(j) * fr.rho_t(j);
            fr.mean_curv(j) = -k * dw / w;
            fr.pi_sq(j) = k * (dw / w) * (dw / w);
            fr.ric_n(j) = -k * ddw / w;
        }
        return;
    }

    fr.rho_th = d_dth(chart, fol.rho);
    for (int j = 0; j < nt; ++j)
        for (int i = 0; i < nth; ++i) {
            double r = fol.rho(j, i);
            double w = p.eval_w(r);
            double rt = fr.rho_t(j, i), rth = fr.rho_th(j, i);
            fr.wv(j, i) = w;
            fr.dwv(j, i) = p.eval_dw(r);
            fr.jphi(j, i) = std::sqrt(1.0 + rth * rth / (w * w)) / rt;
            fr.leaf_m(j, i) = std::sqrt(rth * rth + w * w);
            fr.vol(j, i) = w * rt;
        }

    if (fr.radial_leaves) {
        for (int j = 0; j < nt; ++j)
            for (int i = 0; i < nth; ++i) {
                double r = fol.rho(j, i);
                double w = fr.wv(j, i), dw = fr.dwv(j, i), ddw = p.eval_ddw(r);
                fr.mean_curv(j, i) = -dw / w;
                fr.pi_sq(j, i) = (dw / w) * (dw / w);
                fr.ric_n(j, i) = -ddw / w;
            }
        return;
    }

    // Non-radial leaves: N and the leaf tangent T from the graph data, mean
    // curvature h = -div N, |grad_N N| = |div T| (curve leaves in a surface).
    ScalarField n_r(nt, nth), n_th(nt, nth), t_r(nt, nth), t_th(nt, nth);
    for (int j = 0; j < nt; ++j)
        for (int i = 0; i < nth; ++i) {
            double w = fr.wv(j, i), rt = fr.rho_t(j, i), rth = fr.rho_th(j, i);
            double jp = fr.jphi(j, i), m = fr.leaf_m(j, i);
            double phir = 1.0 / rt, phith = -rth / rt;
            n_r(j, i) = phir / jp;
            n_th(j, i) = phith / (w * w * jp);
            t_r(j, i) = rth / m;
            t_th(j, i) = 1.0 / m;
        }
    ScalarField div_n = divergence_impl(chart, fr, n_r, n_th, fol.dt);
    ScalarField div_t = divergence_impl(chart, fr, t_r, t_th, fol.dt);
    ScalarField z_r(nt, nth), z_th(nt, nth);
    for (int j = 0; j < nt; ++j)
        for (int i = 0; i < nth; ++i) {
            fr.mean_curv(j, i) = -div_n(j, i);
            fr.pi_sq(j, i) = div_n(j, i) * div_n(j, i);
            fr.ric_n(j, i) = -chart.profile.eval_ddw(fol.rho(j, i)) / fr.wv(j, i);
            fr.nnn(j, i) = std::abs(div_t(j, i));
            z_r(j, i) = -div_t(j, i) * t_r(j, i);
            z_th(j, i) = -div_t(j, i) * t_th(j, i);
        }
    fr.div_nnn = divergence_impl(chart, fr, z_r, z_th, fol.dt);
}

void check_leaves_in_base(const GraphFoliation& fol) {
    const GridChart& chart = *fol.chart;
    if (chart.periodic_r()) return;  // circle base: leaves wrap
    double lo = chart.profile.a - 1e-9, hi = chart.profile.b + 1e-9;
    for (int j = 0; j < fol.rho.nr; ++j)
        for (int i = 0; i < fol.rho.nth; ++i)
            if (fol.rho(j, i) < lo || fol.rho(j, i) > hi)
                throw std::domain_error("foliation: leaf leaves the base interval");
}

void setup_labels(GraphFoliation& fol, double t0, double t1, int nt, bool periodic) {
    fol.t0 = t0;
    fol.t1 = t1;
    fol.t.resize(nt);
    if (periodic) {
        fol.dt = (t1 - t0) / nt;
        for (int j = 0; j < nt; ++j) fol.t[j] = t0 + j * fol.dt;
        fol.tw = periodic_weights(nt, fol.dt);
    } else {
        fol.dt = (t1 - t0) / (nt - 1);
        for (int j = 0; j < nt; ++j) fol.t[j] = t0 + j * fol.dt;
        fol.tw = gregory_weights(nt, fol.dt);
    }
}

}  // namespace

GraphFoliation GraphFoliation::radial(const GridChart& chart) {
    GraphFoliation fol;
    fol.chart = &chart;
    setup_labels(fol, chart.profile.a, chart.periodic_r() ? chart.profile.b : chart.profile.b,
                 chart.nr, chart.periodic_r());
    fol.rho = ScalarField(chart.nr, chart.nth);
    for (int j = 0; j < chart.nr; ++j)
        for (int i = 0; i < chart.nth; ++i) fol.rho(j, i) = fol.t[j];
    build_frame(fol);
    return fol;
}

GraphFoliation GraphFoliation::shear(const GridChart& chart,
                                     const std::function<double(double)>& s, double eps) {
    if (!chart.periodic_r())
        throw std::invalid_argument("shear foliation requires a circle base");
    GraphFoliation fol;
    fol.chart = &chart;
    setup_labels(fol, chart.profile.a, chart.profile.b, chart.nr, true);
    fol.rho = ScalarField(chart.nr, chart.nth);
    for (int j = 0; j < chart.nr; ++j)
        for (int i = 0; i < chart.nth; ++i) fol.rho(j, i) = fol.t[j] + eps * s(chart.th[i]);
    build_frame(fol);
    return fol;
}

GraphFoliation GraphFoliation::from_samples(const GridChart& chart, ScalarField rho) {
    if (rho.nr != chart.nr || rho.nth != chart.nth)
        throw std::invalid_argument("from_samples: rho shape mismatch");
    GraphFoliation fol;
    fol.chart = &chart;
    setup_labels(fol, chart.profile.a, chart.profile.b, chart.nr, chart.periodic_r());
    fol.rho = std::move(rho);
    check_leaves_in_base(fol);
    build_frame(fol);
    return fol;
}

GraphFoliation GraphFoliation::from_level_function(const GridChart& chart,
                                                   const LevelSetFunction& u) {
    GraphFoliation fol;
    fol.chart = &chart;
    setup_labels(fol, u.tmin, u.tmax, chart.nr, chart.periodic_r());
    fol.rho = ScalarField(chart.nr, chart.nth);
    parallel_for(chart.nr, [&](std::ptrdiff_t j) {
        for (int i = 0; i < chart.nth; ++i)
            fol.rho(static_cast<int>(j), i) = u.leaf_radius(
                chart, fol.t[j], chart.mode == ChartMode::surface ? chart.th[i] : 0.0);
    });
    build_frame(fol);
    return fol;
}

ScalarField GraphFoliation::sample(const FieldFn& f) const {
    ScalarField out(rho.nr, rho.nth);
    parallel_for(rho.nr, [&](std::ptrdiff_t j) {
        for (int i = 0; i < rho.nth; ++i)
            out(static_cast<int>(j), i) =
                f(rho(static_cast<int>(j), i),
                  chart->mode == ChartMode::surface ? chart->th[i] : 0.0);
    });
    return out;
}

std::vector<double> hat_leafwise(const GraphFoliation& fol, const ScalarField& field) {
    if (field.nr != fol.rho.nr || field.nth != fol.rho.nth)
        throw std::invalid_argument("hat: field shape mismatch");
    int nt = field.nr;
    std::vector<double> out(static_cast<std::size_t>(nt));
    if (fol.chart->mode == ChartMode::radial) {
        parallel_for(nt, [&](std::ptrdiff_t j) { out[j] = field(static_cast<int>(j)) * fol.frame.leaf_m(static_cast<int>(j)); });
        return out;
    }
    double dth = fol.chart->dth;
    parallel_for(nt, [&](std::ptrdiff_t j) {
        double s = 0.0;
        for (int i = 0; i < field.nth; ++i)
            s += field(static_cast<int>(j), i) * fol.frame.leaf_m(static_cast<int>(j), i);
        out[j] = s * dth;
    });
    return out;
}

double hat(const GraphFoliation& fol, int leaf, const ScalarField& field) {
    if (leaf < 0 || leaf >= fol.n_leaves())
        throw std::domain_error("hat: leaf label out of range");
    if (fol.chart->mode == ChartMode::radial)
        return field(leaf) * fol.frame.leaf_m(leaf);
    double s = 0.0;
    for (int i = 0; i < field.nth; ++i) s += field(leaf, i) * fol.frame.leaf_m(leaf, i);
    return s * fol.chart->dth;
}

double hat(const GraphFoliation& fol, int leaf, const FieldFn& f) {
    if (leaf < 0 || leaf >= fol.n_leaves())
        throw std::domain_error("hat: leaf label out of range");
    if (fol.chart->mode == ChartMode::radial)
        return f(fol.rho(leaf), 0.0) * fol.frame.leaf_m(leaf);
    double s = 0.0;
    for (int i = 0; i < fol.rho.nth; ++i)
        s += f(fol.rho(leaf, i), fol.chart->th[i]) * fol.frame.leaf_m(leaf, i);
    return s * fol.chart->dth;
}

ScalarField gradient_norm(const GraphFoliation& fol) { return fol.frame.jphi; }

ScalarField gradient_norm(const GridChart& chart, const LevelSetFunction& u) {
    ScalarField out(chart.nr, chart.nth);
    for (int j = 0; j < chart.nr; ++j)
        for (int i = 0; i < chart.nth; ++i) {
            double r = chart.r[j];
            double th = chart.mode == ChartMode::surface ? chart.th[i] : 0.0;
            double gr = u.ur(r, th);
            if (chart.mode == ChartMode::surface) {
                double gt = u.uth(r, th) / chart.profile.eval_w(r);
                out(j, i) = std::sqrt(gr * gr + gt * gt);
            } else {
                out(j, i) = std::abs(gr);
            }
        }
    return out;
}

ScalarField normal_derivative(const GraphFoliation& fol, const ScalarField& f) {
    const GridChart& chart = *fol.chart;
    ScalarField ft = d_dt(chart, f, fol.dt);
    if (chart.mode == ChartMode::radial) {
        ScalarField out(f.nr, 1);
        for (int j = 0; j < f.nr; ++j) out(j) = ft(j) * fol.frame.jphi(j);
        return out;
    }
    ScalarField fth = d_dth(chart, f);
    ScalarField out(f.nr, f.nth);
    for (int j = 0; j < f.nr; ++j)
        for (int i = 0; i < f.nth; ++i) {
            double w = fol.frame.wv(j, i), jp = fol.frame.jphi(j, i);
            double phith = -fol.frame.rho_th(j, i) / fol.frame.rho_t(j, i);
            out(j, i) = ft(j, i) * jp + fth(j, i) * phith / (w * w * jp);
        }
    return out;
}

ScalarField tangential_derivative(const GraphFoliation& fol, const ScalarField& f) {
    if (fol.chart->mode == ChartMode::radial) return ScalarField(f.nr, 1, 0.0);
    ScalarField fth = d_dth(*fol.chart, f);
    ScalarField out(f.nr, f.nth);
    for (int j = 0; j < f.nr; ++j)
        for (int i = 0; i < f.nth; ++i) out(j, i) = fth(j, i) / fol.frame.leaf_m(j, i);
    return out;
}

ScalarField leaf_divergence(const GraphFoliation& fol, const ScalarField& vr,
                            const ScalarField& vth) {
    return divergence_impl(*fol.chart, fol.frame, vr, vth, fol.dt);
}

NormalFieldOnLeaves sample_normal_field(const GraphFoliation& fol, const NormalField& nf) {
    const GridChart& chart = *fol.chart;
    int nt = fol.rho.nr, nth = fol.rho.nth;
    NormalFieldOnLeaves out;
    out.f = ScalarField(nt, nth);
    out.nf = ScalarField(nt, nth);
    out.tf = ScalarField(nt, nth);
    parallel_for(nt, [&](std::ptrdiff_t jj) {
        int j = static_cast<int>(jj);
        for (int i = 0; i < nth; ++i) {
            double r = fol.rho(j, i);
            double th = chart.mode == ChartMode::surface ? chart.th[i] : 0.0;
            out.f(j, i) = nf.f(r, th);
            if (chart.mode == ChartMode::radial) {
                out.nf(j, i) = nf.fr(r, th);
                out.tf(j, i) = 0.0;
            } else {
                double w = fol.frame.wv(j, i), jp = fol.frame.jphi(j, i);
                double m = fol.frame.leaf_m(j, i);
                double rt = fol.frame.rho_t(j, i), rth = fol.frame.rho_th(j, i);
                double phir = 1.0 / rt, phith = -rth / rt;
                double fr = nf.fr(r, th), fth = nf.fth(r, th);
                out.nf(j, i) = (fr * phir + fth * phith / (w * w)) / jp;
                out.tf(j, i) = (fth + rth * fr) / m;
            }
        }
    });
    return out;
}

void validate_compact_support(const GridChart& chart, const NormalField& f) {
    if (chart.periodic_r()) return;
    for (int i = 0; i < chart.nth; ++i) {
        double th = chart.mode == ChartMode::surface ? chart.th[i] : 0.0;
        if (std::abs(f.f(chart.profile.a, th)) > 1e-12 ||
            std::abs(f.f(chart.profile.b, th)) > 1e-12)
            throw std::invalid_argument(
                "test field is not compactly supported in the base interval");
    }
}

GraphFoliation flow_normal_field(const GraphFoliation& fol, const NormalField& f,
                                 double time, int steps) {
    if (steps < 1) throw std::invalid_argument("flow: steps must be >= 1");
    validate_compact_support(*fol.chart, f);
    const GridChart& chart = *fol.chart;
    double h = time / steps;
    ScalarField out(fol.rho.nr, fol.rho.nth);
    parallel_for(fol.rho.nr, [&](std::ptrdiff_t jj) {
        int j = static_cast<int>(jj);
        for (int i = 0; i < fol.rho.nth; ++i) {
            double th = chart.mode == ChartMode::surface ? chart.th[i] : 0.0;
            double r = fol.rho(j, i);
            for (int s = 0; s < steps; ++s) {
                double k1 = f.f(r, th);
                double k2 = f.f(r + 0.5 * h * k1, th);
                double k3 = f.f(r + 0.5 * h * k2, th);
                double k4 = f.f(r + h * k3, th);
                r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            out(j, i) = r;
        }
    });
    return GraphFoliation::from_samples(chart, std::move(out));
}

double LevelSetFunction::leaf_radius(const GridChart& chart, double t, double theta) const {
    const WarpProfile& p = chart.profile;
    double r;
    if (chart.periodic_r()) {
        r = t;  // u is quasi-linear in r on a circle base
        for (int it = 0; it < 100; ++it) {
            double g = u(r, theta) - t;
            double dg = ur(r, theta);
            double step = g / dg;
            r -= step;
            if (std::abs(step) < 1e-13 * std::max(1.0, std::abs(r))) return r;
        }
        throw NumericError("leaf_radius: Newton iteration failed to converge");
    }
    double lo = p.a, hi = p.b;
    double flo = u(lo, theta) - t, fhi = u(hi, theta) - t;
    if (flo > 1e-12 || fhi < -1e-12)
        throw std::domain_error("leaf_radius: level outside range");
    // Bisect to a rough bracket, then Newton.
    for (int it = 0; it < 30; ++it) {
        double mid = 0.5 * (lo + hi);
        if (u(mid, theta) - t <= 0.0) lo = mid; else hi = mid;
    }
    r = 0.5 * (lo + hi);
    for (int it = 0; it < 60; ++it) {
        double g = u(r, theta) - t;
        double step = g / ur(r, theta);
        r -= step;
        r = std::clamp(r, p.a, p.b);
        if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(r))) break;
    }
    return r;
}

LevelSetFunction LevelSetFunction::from_chart(const GridChart& chart, FieldFn u,
                                              FieldFn ur, FieldFn uth, std::string id) {
    LevelSetFunction out;
    out.u = std::move(u);
    out.ur = std::move(ur);
    out.uth = std::move(uth);
    out.id = std::move(id);
    out.radial = false;
    const WarpProfile& p = chart.profile;
    if (chart.periodic_r()) {
        out.tmin = out.u(p.a, 0.0);
        out.tmax = out.tmin + (out.u(p.b, 0.0) - out.u(p.a, 0.0));
    } else {
        double lo = -1e300, hi = 1e300;
        int ns = std::max(chart.nth, 64);
        for (int i = 0; i < ns; ++i) {
            double th = chart.mode == ChartMode::surface ? chart.theta_len * i / ns : 0.0;
            lo = std::max(lo, out.u(p.a, th));
            hi = std::min(hi, out.u(p.b, th));
            if (chart.mode != ChartMode::surface) break;
        }
        out.tmin = lo;
        out.tmax = hi;
    }
    if (!(out.tmax > out.tmin))
        throw std::domain_error("level function: empty level range");
    return out;
}

LevelSetFunction LevelSetFunction::from_radial(const GridChart& chart, RadialFn u,
                                               RadialFn du, std::string id) {
    auto uf = [u](double r, double) { return u(r); };
    auto durf = [du](double r, double) { return du(r); };
    auto zero = [](double, double) { return 0.0; };
    LevelSetFunction out = from_chart(chart, uf, durf, zero, std::move(id));
    out.radial = true;
    return out;
}

double level_leaf_integral(const GridChart& chart, const LevelSetFunction& u, double t,
                           const FieldFn& integrand) {
    if (chart.mode == ChartMode::radial) {
        double r = u.leaf_radius(chart, t, 0.0);
        return integrand(r, 0.0) * chart.profile.leaf_volume(r);
    }
    double s = 0.0;
    for (int i = 0; i < chart.nth; ++i) {
        double th = chart.th[i];
        double r = u.leaf_radius(chart, t, th);
        double rho_th = -u.uth(r, th) / u.ur(r, th);
        double w = chart.profile.eval_w(r);
        s += integrand(r, th) * std::sqrt(rho_th * rho_th + w * w);
    }
    return s * chart.dth;
}

LevelSetFunction normalize_levelset(const GridChart& chart, const LevelSetFunction& u,
                                    double p) {
    if (!(p > 1.0)) throw std::domain_error("normalize_levelset: p must be > 1");
    double q = p / (p - 1.0);
    int nlev = std::max(chart.nr, 64);
    double hlev = (u.tmax - u.tmin) / (nlev - 1);
    auto weight = [&](double r, double th) {
        double gr = u.ur(r, th);
        double gt = chart.mode == ChartMode::surface
                        ? u.uth(r, th) / chart.profile.eval_w(r)
                        : 0.0;
        return std::pow(std::sqrt(gr * gr + gt * gt), q - 1.0);
    };
    std::vector<double> nu(static_cast<std::size_t>(nlev)), lamd(static_cast<std::size_t>(nlev));
    for (int i = 0; i < nlev; ++i) {
        double t = u.tmin + i * hlev;
        nu[i] = level_leaf_integral(chart, u, t, weight);
        if (!(nu[i] > 0.0))
            throw NumericError("normalize_levelset: nonpositive leaf weight");
        lamd[i] = std::pow(nu[i], 1.0 - p);
    }
    auto nu_table = std::make_shared<UniformTable>(UniformTable{u.tmin, hlev, std::move(nu)});
    auto lam_table = std::make_shared<UniformTable>(
        UniformTable{u.tmin, hlev, cumulative4(lamd, hlev)});

    LevelSetFunction v;
    double pm1 = p - 1.0;
    LevelSetFunction base = u;
    v.u = [base, lam_table](double r, double th) { return lam_table->eval(base.u(r, th)); };
    v.ur = [base, nu_table, pm1](double r, double th) {
        return std::pow(nu_table->eval(base.u(r, th)), -pm1) * base.ur(r, th);
    };
    v.uth = [base, nu_table, pm1](double r, double th) {
        return std::pow(nu_table->eval(base.u(r, th)), -pm1) * base.uth(r, th);
    };
    v.radial = u.radial;
    v.id = u.id.empty() ? "normalized" : "normalized(" + u.id + ")";
    v.tmin = 0.0;
    v.tmax = lam_table->eval(u.tmax);
    return v;
}

}  // namespace folmod
