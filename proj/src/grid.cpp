#include "folmod/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "folmod/kernels.hpp"

namespace folmod {

double unit_sphere_volume(int k) {
    // vol(S^k) = 2 pi^{(k+1)/2} / Gamma((k+1)/2)
    double kk = (k + 1) / 2.0;
    return 2.0 * std::pow(std::numbers::pi, kk) / std::tgamma(kk);
}

double WarpProfile::eval_w(double r) const {
    if (periodic_base) {
        double len = b - a;
        r = a + std::fmod(std::fmod(r - a, len) + len, len);
    }
    return w(r);
}

double WarpProfile::eval_dw(double r) const {
    if (periodic_base) {
        double len = b - a;
        r = a + std::fmod(std::fmod(r - a, len) + len, len);
    }
    return dw(r);
}

double WarpProfile::eval_ddw(double r) const {
    if (periodic_base) {
        double len = b - a;
        r = a + std::fmod(std::fmod(r - a, len) + len, len);
    }
    return ddw(r);
}

double WarpProfile::leaf_volume(double r) const {
    if (!periodic_base && (r < a - 1e-12 || r > b + 1e-12))
        throw std::domain_error("leaf_volume: r outside the base interval");
    return fiber_volume * std::pow(eval_w(r), fiber_dim);
}

void WarpProfile::validate(int sample_count) const {
    if (!(b > a)) throw std::domain_error("warp profile: empty base interval");
    if (fiber_dim < 1) throw std::domain_error("warp profile: fiber_dim must be >= 1");
    if (!(fiber_volume > 0.0)) throw std::domain_error("warp profile: fiber_volume must be > 0");
    if (!w || !dw || !ddw) throw std::domain_error("warp profile: missing warp evaluators");

    double len = b - a;
    double h = len * 1e-5;
    for (int j = 0; j < sample_count; ++j) {
        double r = a + len * j / (sample_count - 1);
        double wv = w(r);
        if (!(wv > 0.0))
            throw std::domain_error("warp profile: w must be positive on the base");
        // Central-difference consistency of the supplied derivatives.
        double d1 = (w(r + h) - w(r - h)) / (2.0 * h);
        double d2 = (w(r + h) - 2.0 * wv + w(r - h)) / (h * h);
        double s1 = std::max(1.0, std::abs(dw(r)));
        double s2 = std::max(1.0, std::abs(ddw(r)));
        if (std::abs(d1 - dw(r)) > 1e-6 * s1 || std::abs(d2 - ddw(r)) > 1e-4 * s2)
            throw std::domain_error("warp profile: supplied derivatives disagree with w");
    }
}

static WarpProfile make_profile(WarpFamily fam, double a, double b, RadialFn w,
                                RadialFn dw, RadialFn ddw, int k, double vol,
                                bool periodic) {
    WarpProfile p;
    p.family = fam;
    p.a = a;
    p.b = b;
    p.periodic_base = periodic;
    p.fiber_dim = k;
    p.fiber_volume = vol > 0.0 ? vol : unit_sphere_volume(k);
    p.w = std::move(w);
    p.dw = std::move(dw);
    p.ddw = std::move(ddw);
    return p;
}

WarpProfile WarpProfile::cylinder(double a, double b, double c, int k, double vol) {
    return make_profile(WarpFamily::cylinder, a, b,
                        [c](double) { return c; }, [](double) { return 0.0; },
                        [](double) { return 0.0; }, k, vol, false);
}

WarpProfile WarpProfile::torus(double circumference, double c, double vol) {
    return make_profile(WarpFamily::cylinder, 0.0, circumference,
                        [c](double) { return c; }, [](double) { return 0.0; },
                        [](double) { return 0.0; }, 1, vol, true);
}

WarpProfile WarpProfile::euclidean(double a, double b, int k, double vol) {
    return make_profile(WarpFamily::euclidean, a, b,
                        [](double r) { return r; }, [](double) { return 1.0; },
                        [](double) { return 0.0; }, k, vol, false);
}

WarpProfile WarpProfile::hyperbolic(double a, double b, int k, double vol) {
    return make_profile(WarpFamily::hyperbolic, a, b,
                        [](double r) { return std::sinh(r); },
                        [](double r) { return std::cosh(r); },
                        [](double r) { return std::sinh(r); }, k, vol, false);
}

WarpProfile WarpProfile::spherical(double a, double b, int k, double vol) {
    return make_profile(WarpFamily::spherical, a, b,
                        [](double r) { return std::sin(r); },
                        [](double r) { return std::cos(r); },
                        [](double r) { return -std::sin(r); }, k, vol, false);
}

WarpProfile WarpProfile::custom_poly(double a, double b, std::vector<double> coeffs,
                                     int k, double vol, bool periodic) {
    auto horner = [](const std::vector<double>& c, double r) {
        double s = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * r + *it;
        return s;
    };
    std::vector<double> d1, d2;
    for (std::size_t j = 1; j < coeffs.size(); ++j) d1.push_back(coeffs[j] * j);
    for (std::size_t j = 1; j < d1.size(); ++j) d2.push_back(d1[j] * j);
    return make_profile(WarpFamily::custom, a, b,
                        [coeffs, horner](double r) { return horner(coeffs, r); },
                        [d1, horner](double r) { return horner(d1, r); },
                        [d2, horner](double r) { return horner(d2, r); }, k, vol,
                        periodic);
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> gregory_weights(int n, double h) {
    if (n < 8) throw std::invalid_argument("gregory_weights: need at least 8 nodes");
    std::vector<double> w(static_cast<std::size_t>(n), h);
    w[0] = w[n - 1] = 3.0 / 8.0 * h;
    w[1] = w[n - 2] = 7.0 / 6.0 * h;
    w[2] = w[n - 3] = 23.0 / 24.0 * h;
    return w;
}

std::vector<double> periodic_weights(int n, double h) {
    return std::vector<double>(static_cast<std::size_t>(n), h);
}

void deriv4(const double* f, double* out, int n, double h, bool periodic, int stride) {
    auto at = [&](int i) { return f[static_cast<std::ptrdiff_t>(i) * stride]; };
    auto put = [&](int i, double x) { out[static_cast<std::ptrdiff_t>(i) * stride] = x; };
    const double inv12h = 1.0 / (12.0 * h);
    if (periodic) {
        for (int i = 0; i < n; ++i) {
            int m2 = (i - 2 + 2 * n) % n, m1 = (i - 1 + n) % n;
            int p1 = (i + 1) % n, p2 = (i + 2) % n;
            put(i, (at(m2) - 8.0 * at(m1) + 8.0 * at(p1) - at(p2)) * inv12h);
        }
        return;
    }
    if (n < 5) throw std::invalid_argument("deriv4: need at least 5 nodes");
    put(0, (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)) * inv12h);
    put(1, (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) + at(4)) * inv12h);
    for (int i = 2; i < n - 2; ++i)
        put(i, (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) * inv12h);
    put(n - 2, (3.0 * at(n - 1) + 10.0 * at(n - 2) - 18.0 * at(n - 3) + 6.0 * at(n - 4) -
                at(n - 5)) * inv12h);
    put(n - 1, (25.0 * at(n - 1) - 48.0 * at(n - 2) + 36.0 * at(n - 3) - 16.0 * at(n - 4) +
                3.0 * at(n - 5)) * inv12h);
}

double fd_deriv(const std::function<double(double)>& f, double x, double h) {
    return (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
}

double fd_deriv2(const std::function<double(double)>& f, double x, double h) {
    return (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) -
            f(x + 2.0 * h)) / (12.0 * h * h);
}

GridChart::GridChart(WarpProfile prof, ChartMode m, int nr_, int nth_)
    : profile(std::move(prof)), mode(m), nr(nr_), nth(m == ChartMode::surface ? nth_ : 1) {
    profile.validate();
    if (mode == ChartMode::surface && profile.fiber_dim != 1)
        throw std::invalid_argument("surface mode requires fiber_dim = 1");
    if (mode == ChartMode::surface && nth < 8)
        throw std::invalid_argument("surface mode requires n_theta >= 8");
    if (nr < 8) throw std::invalid_argument("chart requires n_r >= 8");

    double len = profile.base_length();
    if (profile.periodic_base) {
        dr = len / nr;
        r.resize(nr);
        for (int j = 0; j < nr; ++j) r[j] = profile.a + j * dr;
        rw = periodic_weights(nr, dr);
    } else {
        dr = len / (nr - 1);
        r.resize(nr);
        for (int j = 0; j < nr; ++j) r[j] = profile.a + j * dr;
        rw = gregory_weights(nr, dr);
    }
    if (mode == ChartMode::surface) {
        theta_len = profile.fiber_volume;  // circumference of the fiber circle
        dth = theta_len / nth;
        th.resize(nth);
        for (int i = 0; i < nth; ++i) th[i] = i * dth;
    }
}

double GridChart::volume_integral(const ScalarField& f) const {
    if (f.nr != nr || f.nth != nth)
        throw std::invalid_argument("volume_integral: field shape mismatch");
    if (mode == ChartMode::radial) {
        return parallel_sum(nr, [&](std::ptrdiff_t j) {
            return f(static_cast<int>(j)) * profile.leaf_volume(r[j]) * rw[j];
        });
    }
    return parallel_sum(nr, [&](std::ptrdiff_t j) {
        double row = 0.0;
        for (int i = 0; i < nth; ++i) row += f(static_cast<int>(j), i);
        return row * profile.eval_w(r[j]) * rw[j] * dth;
    });
}

ScalarField GridChart::d_dr(const ScalarField& f) const {
    if (f.nr != nr || f.nth != nth)
        throw std::invalid_argument("d_dr: field shape mismatch");
    ScalarField out(nr, nth);
    parallel_for(nth, [&](std::ptrdiff_t i) {
        deriv4(f.v.data() + i, out.v.data() + i, nr, dr, profile.periodic_base, nth);
    });
    return out;
}

ScalarField GridChart::d_dtheta(const ScalarField& f) const {
    if (mode != ChartMode::surface)
        throw std::invalid_argument("d_dtheta: requires surface mode");
    if (f.nr != nr || f.nth != nth)
        throw std::invalid_argument("d_dtheta: field shape mismatch");
    ScalarField out(nr, nth);
    parallel_for(nr, [&](std::ptrdiff_t j) {
        deriv4(f.v.data() + j * nth, out.v.data() + j * nth, nth, dth, true, 1);
    });
    return out;
}

ScalarField GridChart::sample(const FieldFn& f) const {
    ScalarField out(nr, nth);
    parallel_for(nr, [&](std::ptrdiff_t j) {
        for (int i = 0; i < nth; ++i)
            out(static_cast<int>(j), i) = f(r[j], mode == ChartMode::surface ? th[i] : 0.0);
    });
    return out;
}

}  // namespace folmod
