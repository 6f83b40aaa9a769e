#pragma once

// Warped-product manifolds dr^2 + w(r)^2 g_fiber and their (r, theta) chart
// discretization. Interval bases use a 4th-order end-corrected trapezoid rule
// (Gregory weights); circle bases and the fiber circle use the plain periodic
// trapezoid rule. Derivatives are 4th-order finite differences, one-sided at
// interval boundaries.

#include <functional>
#include <string>
#include <vector>

namespace folmod {

using RadialFn = std::function<double(double)>;
// Point field on the chart, (r, theta) -> value.
using FieldFn = std::function<double(double, double)>;

enum class WarpFamily { cylinder, euclidean, hyperbolic, spherical, custom };

enum class ChartMode { radial, surface };

struct WarpProfile {
    WarpFamily family = WarpFamily::custom;
    double a = 0.0, b = 1.0;     // base interval [a,b], or [0,L) when periodic
    bool periodic_base = false;  // circle base of circumference b-a
    int fiber_dim = 1;           // k; leaves have dimension k, dim M = k+1
    double fiber_volume = 0.0;   // V_k, volume of the unit fiber
    RadialFn w, dw, ddw;

    double base_length() const { return b - a; }
    // Wraps r into the base for circle bases before evaluating the warp.
    double eval_w(double r) const;
    double eval_dw(double r) const;
    double eval_ddw(double r) const;
    // sigma(r) = V_k w(r)^k, the volume of the leaf {r = const}.
    double leaf_volume(double r) const;

    // Throws std::domain_error on invalid data (w <= 0 on the base, or
    // supplied derivatives inconsistent with central differences of w).
    void validate(int sample_count = 257) const;

    static WarpProfile cylinder(double a, double b, double c = 1.0, int k = 1,
                                double fiber_volume = 0.0);
    // Flat torus: circle base [0, circumference), constant warp.
    static WarpProfile torus(double circumference, double c = 1.0,
                             double fiber_volume = 0.0);
    static WarpProfile euclidean(double a, double b, int k = 1,
                                 double fiber_volume = 0.0);
    static WarpProfile hyperbolic(double a, double b, int k = 1,
                                  double fiber_volume = 0.0);
    static WarpProfile spherical(double a, double b, int k = 1,
                                 double fiber_volume = 0.0);
    static WarpProfile custom_poly(double a, double b, std::vector<double> coeffs,
                                   int k = 1, double fiber_volume = 0.0,
                                   bool periodic = false);
};

// Default fiber volume for a unit k-sphere fiber (2*pi for k = 1).
double unit_sphere_volume(int k);

struct GridChart;

// Grid samples, row-major (r index j, theta index i). In radial mode nth = 1.
struct ScalarField {
    int nr = 0, nth = 1;
    std::vector<double> v;

    ScalarField() = default;
    ScalarField(int nr_, int nth_, double fill = 0.0)
        : nr(nr_), nth(nth_), v(static_cast<std::size_t>(nr_) * nth_, fill) {}

    double& operator()(int j, int i) { return v[static_cast<std::size_t>(j) * nth + i]; }
    double operator()(int j, int i) const { return v[static_cast<std::size_t>(j) * nth + i]; }
    double& operator()(int j) { return v[static_cast<std::size_t>(j) * nth]; }
    double operator()(int j) const { return v[static_cast<std::size_t>(j) * nth]; }

    double max_abs() const;
};

struct GridChart {
    WarpProfile profile;
    ChartMode mode = ChartMode::radial;
    int nr = 0;
    int nth = 1;
    double dr = 0.0, dth = 0.0;
    double theta_len = 0.0;  // circumference of the fiber circle (surface mode)
    std::vector<double> r;   // nr nodes
    std::vector<double> rw;  // r quadrature weights
    std::vector<double> th;  // nth nodes (surface mode)

    GridChart() = default;
    GridChart(WarpProfile profile, ChartMode mode, int nr, int nth = 1);

    bool periodic_r() const { return profile.periodic_base; }

    // Integral over M of a sampled field against d(mu-bar).
    double volume_integral(const ScalarField& f) const;

    ScalarField d_dr(const ScalarField& f) const;
    ScalarField d_dtheta(const ScalarField& f) const;

    ScalarField sample(const FieldFn& f) const;
    ScalarField constant(double c) const { return ScalarField(nr, nth, c); }
};

// Composite quadrature weights on n uniform nodes spaced h apart.
std::vector<double> gregory_weights(int n, double h);     // interval, O(h^4)
std::vector<double> periodic_weights(int n, double h);    // trapezoid on a circle

// 4th-order first derivative of n samples spaced h apart (arbitrary stride).
void deriv4(const double* f, double* out, int n, double h, bool periodic,
            int stride = 1);

// 4th-order central difference of a callable at x with step h.
double fd_deriv(const std::function<double(double)>& f, double x, double h);
double fd_deriv2(const std::function<double(double)>& f, double x, double h);

}  // namespace folmod
