#include "folmod/capacity.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "folmod/kernels.hpp"

namespace folmod {

namespace {

// Composite 5-point Gauss-Legendre integral of g over [a, x]; with smooth
// integrands the panels below are accurate to machine precision.
double gauss_integral(const std::function<double(double)>& g, double a, double x,
                      int panels) {
    static const double nodes[5] = {-0.906179845938663993, -0.538469310105683091, 0.0,
                                    0.538469310105683091, 0.906179845938663993};
    static const double weights[5] = {0.236926885056189088, 0.478628670499366468,
                                      0.568888888888888889, 0.478628670499366468,
                                      0.236926885056189088};
    double h = (x - a) / panels, total = 0.0;
    for (int k = 0; k < panels; ++k) {
        double mid = a + (k + 0.5) * h, half = 0.5 * h;
        double s = 0.0;
        for (int n = 0; n < 5; ++n) s += weights[n] * g(mid + half * nodes[n]);
        total += s * half;
    }
    return total;
}

}  // namespace

QHarmonicRadial q_harmonic_radial(const GridChart& chart, const ModulusParams& params) {
    if (chart.periodic_r())
        throw std::invalid_argument("q_harmonic_radial: interval base required");
    const WarpProfile prof = chart.profile;
    double p = params.p;
    auto density = [prof, p](double r) {
        double sigma = prof.fiber_volume * std::pow(prof.eval_w(r), prof.fiber_dim);
        return std::pow(sigma, 1.0 - p);
    };
    // cumulative density integral cached on a uniform fine grid; evaluations
    // then only integrate the local subinterval (one Gauss-5 panel, which is
    // already at machine precision for these spacings)
    int cache_n = 1024;
    double step = (prof.b - prof.a) / cache_n;
    std::vector<double> cum(static_cast<std::size_t>(cache_n) + 1, 0.0);
    for (int k = 0; k < cache_n; ++k)
        cum[static_cast<std::size_t>(k) + 1] =
            cum[static_cast<std::size_t>(k)] +
            gauss_integral(density, prof.a + k * step, prof.a + (k + 1) * step, 1);
    double total = cum.back();
    QHarmonicRadial out;
    out.c = 1.0 / total;
    double c = out.c, a = prof.a;
    out.u.u = [density, c, a, step, cache_n, cum](double r, double) {
        int k = static_cast<int>((r - a) / step);
        if (k < 0) k = 0;
        if (k > cache_n) k = cache_n;
        double base = a + k * step;
        return c * (cum[static_cast<std::size_t>(k)] +
                    gauss_integral(density, base, r, 1));
    };
    out.u.ur = [density, c](double r, double) { return c * density(r); };
    out.u.uth = [](double, double) { return 0.0; };
    out.u.tmin = 0.0;
    out.u.tmax = 1.0;
    out.u.radial = true;
    out.u.id = "q-harmonic";
    return out;
}

CapacityReport capacity_report(const GridChart& chart, const ModulusParams& params) {
    if (chart.mode != ChartMode::radial)
        throw std::invalid_argument("capacity_report: radial-mode chart required");
    QHarmonicRadial qh = q_harmonic_radial(chart, params);
    CapacityReport rep;
    rep.p = params.p;
    rep.q = params.q;
    rep.capacity_closed = std::pow(qh.c, params.q - 1.0);

    // energy integral of the potential against the volume measure
    ScalarField energy(chart.nr, 1);
    for (int j = 0; j < chart.nr; ++j)
        energy(j) = std::pow(std::abs(qh.u.ur(chart.r[j], 0.0)), params.q);
    rep.capacity = chart.volume_integral(energy);

    rep.modulus = modulus_from_levels(chart, qh.u, params);
    rep.relation_residual =
        std::abs(rep.modulus - std::pow(rep.capacity, 1.0 - params.p));

    rep.harmonic_residual = q_laplacian(chart, qh.u, params.q).max_abs();

    double nu_max = 0.0;
    double h = 1.0 / (chart.nr - 1);
    for (int j = 0; j < chart.nr; ++j) {
        double nu = nu_q(chart, qh.u, params.q, j * h);
        nu_max = std::max(nu_max, std::abs(nu - rep.capacity_closed));
    }
    rep.nu_constancy = nu_max;
    return rep;
}

}  // namespace folmod
