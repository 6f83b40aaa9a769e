#include "folmod/geometry.hpp"

#include <cmath>

namespace folmod {

double leaf_volume(const WarpProfile& profile, double r) {
    return profile.leaf_volume(r);
}

GeometryQuantities curvature_quantities(const GridChart& chart) {
    const auto& p = chart.profile;
    const int n = chart.nr;
    const double k = static_cast<double>(p.fiber_dim);
    GeometryQuantities g;
    g.sigma.resize(n);
    g.mean_curv.resize(n);
    g.pi_sq.resize(n);
    g.ric_n.resize(n);
    g.nnn.assign(n, 0.0);
    g.div_nnn.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double r = chart.r[j];
        double w = p.eval_w(r), dw = p.eval_dw(r), ddw = p.eval_ddw(r);
        g.sigma[j] = p.fiber_volume * std::pow(w, p.fiber_dim);
        g.mean_curv[j] = -k * dw / w;
        g.pi_sq[j] = k * (dw / w) * (dw / w);
        g.ric_n[j] = -k * ddw / w;
    }
    g.bko_residual = bko_residual(chart);
    return g;
}

double bko_residual(const GridChart& chart) {
    const auto& p = chart.profile;
    const int n = chart.nr;
    const double k = static_cast<double>(p.fiber_dim);
    std::vector<double> h(n), dh(n);
    for (int j = 0; j < n; ++j)
        h[j] = -k * p.eval_dw(chart.r[j]) / p.eval_w(chart.r[j]);
    deriv4(h.data(), dh.data(), n, chart.dr, chart.periodic_r());
    double res = 0.0;
    int lo = chart.periodic_r() ? 0 : 2;
    int hi = chart.periodic_r() ? n : n - 2;
    for (int j = lo; j < hi; ++j) {
        double r = chart.r[j];
        double w = p.eval_w(r), dw = p.eval_dw(r), ddw = p.eval_ddw(r);
        double pi_sq = k * (dw / w) * (dw / w);
        double ric = -k * ddw / w;
        res = std::max(res, std::abs(dh[j] - pi_sq - ric));
    }
    return res;
}

}  // namespace folmod
