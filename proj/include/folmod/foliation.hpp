#pragma once

// Codimension-one foliations with graph leaves r = rho(t, theta), the leaf
// integral (hat) operator, normal/tangential derivatives along leaves, flows
// of normal fields, and level-set functions with leaf extraction.
//
// Computations on a foliation run in foliation coordinates (t, theta): the map
// (t, theta) -> (rho(t, theta), theta) is a diffeomorphism of the chart, the
// volume element pulls back to w(rho) rho_t dt dtheta (surface mode) and the
// leaf measure to sqrt(rho_theta^2 + w(rho)^2) dtheta.

#include <functional>
#include <string>
#include <vector>

#include "folmod/grid.hpp"

namespace folmod {

inline constexpr double kMonotoneEps = 1e-8;

// Test field f in the normal variation X = f N, with analytic derivatives.
struct NormalField {
    FieldFn f, fr, fth;
    bool compact_support = false;  // vanishes on boundary leaves (interval base)
    std::string id;
};

// General vector field (X^r, X^theta) on the chart.
struct GeneralField {
    FieldFn xr, xth;
    std::string id;
};

// C^2 level function u(r, theta) with du/dr > 0 and analytic first derivatives.
struct LevelSetFunction {
    FieldFn u, ur, uth;
    double tmin = 0.0, tmax = 0.0;  // level range with complete leaves
    bool radial = false;
    std::string id;

    // Solves u(r, theta) = t for r (Newton with analytic ur).
    double leaf_radius(const GridChart& chart, double t, double theta) const;

    static LevelSetFunction from_radial(const GridChart& chart, RadialFn u,
                                        RadialFn du, std::string id = "");
    static LevelSetFunction from_chart(const GridChart& chart, FieldFn u, FieldFn ur,
                                       FieldFn uth, std::string id = "");
};

// Per-node geometric data of a foliation, on the (t, theta) grid.
struct FoliationFrame {
    bool radial_leaves = true;  // rho independent of theta: closed-form geometry
    ScalarField rho_t, rho_th;
    ScalarField wv, dwv;      // w(rho), w'(rho)
    ScalarField jphi;         // |grad Phi| of the defining submersion
    ScalarField leaf_m;       // leaf measure density d(mu_L)/dtheta (surface mode)
    ScalarField vol;          // volume density d(mu-bar)/(dt dtheta)
    ScalarField mean_curv;    // h of the leaves along N
    ScalarField pi_sq;        // |Pi|^2
    ScalarField ric_n;        // Ric(N)
    ScalarField nnn;          // |grad_N N|
    ScalarField div_nnn;      // div(grad_N N)
};

struct GraphFoliation {
    const GridChart* chart = nullptr;
    double t0 = 0.0, t1 = 0.0;
    std::vector<double> t;   // leaf labels, same resolution as the r grid
    std::vector<double> tw;  // label-integration weights
    double dt = 0.0;
    ScalarField rho;  // leaf positions, (label j, theta i)
    FoliationFrame frame;

    int n_leaves() const { return static_cast<int>(t.size()); }
    int nth() const { return rho.nth; }

    // Field values along leaves: out(j, i) = f(rho(t_j, theta_i), theta_i).
    ScalarField sample(const FieldFn& f) const;

    static GraphFoliation radial(const GridChart& chart);
    // rho(t, theta) = t + eps * s(theta) on a circle base.
    static GraphFoliation shear(const GridChart& chart,
                                const std::function<double(double)>& s, double eps);
    static GraphFoliation from_samples(const GridChart& chart, ScalarField rho);
    // Leaves of u at n_r uniformly spaced levels.
    static GraphFoliation from_level_function(const GridChart& chart,
                                              const LevelSetFunction& u);
};

// Leaf integrals H(j) = int_{L_j} field d(mu_L).
std::vector<double> hat_leafwise(const GraphFoliation& fol, const ScalarField& field);
double hat(const GraphFoliation& fol, int leaf, const ScalarField& field);
double hat(const GraphFoliation& fol, int leaf, const FieldFn& f);

// |grad Phi| along leaves for the submersion defining the foliation.
ScalarField gradient_norm(const GraphFoliation& fol);
// |grad u| sampled on the chart grid.
ScalarField gradient_norm(const GridChart& chart, const LevelSetFunction& u);

// N- and leafwise-tangential derivatives of a grid function on (t, theta).
ScalarField normal_derivative(const GraphFoliation& fol, const ScalarField& f);
ScalarField tangential_derivative(const GraphFoliation& fol, const ScalarField& f);

// Divergence of a vector field given by chart components sampled along leaves.
ScalarField leaf_divergence(const GraphFoliation& fol, const ScalarField& vr,
                            const ScalarField& vth);

// Values, N f and unit-tangential T f of a test field along leaves.
struct NormalFieldOnLeaves {
    ScalarField f, nf, tf;
};
NormalFieldOnLeaves sample_normal_field(const GraphFoliation& fol,
                                        const NormalField& nf);

// Throws std::invalid_argument if an interval-base test field does not vanish
// on the boundary leaves.
void validate_compact_support(const GridChart& chart, const NormalField& f);

// Flow of X = f * d/dr by classical RK4 with fixed step time/steps.
GraphFoliation flow_normal_field(const GraphFoliation& fol, const NormalField& f,
                                 double time, int steps);

// Integral over the leaf u = t of integrand(r, theta) d(mu_L).
double level_leaf_integral(const GridChart& chart, const LevelSetFunction& u,
                           double t, const FieldFn& integrand);

// Reparametrizes u so that the leafwise integral of |grad v|^{q-1} is 1 on
// every leaf, where q is the exponent conjugate to p.
LevelSetFunction normalize_levelset(const GridChart& chart, const LevelSetFunction& u,
                                    double p);

}  // namespace folmod
