#pragma once

// Admissibility, extremal functions and the p-modulus of a foliation, the
// co-area style integral identities, level-set weights nu, and the
// q-Laplacian.

#include <utility>
#include <vector>

#include "folmod/foliation.hpp"

namespace folmod {

double conjugate_exponent(double p);  // q = p / (p - 1)

struct ModulusParams {
    double p = 2.0;
    double q = 2.0;
    static ModulusParams from_p(double p);
};

struct ExtremalFunction {
    ScalarField f0;             // on the foliation (t, theta) grid
    std::vector<double> hat_j;  // leafwise integral of (J Phi)^{q-1}
    double normalization_residual = 0.0;  // max |hat f0 - 1|
    double min_value = 0.0;               // positivity margin
};

struct ModulusReport {
    double p = 0.0, q = 0.0;
    double value = 0.0;
    double normalization_residual = 0.0;
    double admissibility_margin = 0.0;
    double cross_check = 0.0;  // integral of f0^p, equals value
    int n_r = 0, n_theta = 0;
};

// Integral over M of a field sampled on the foliation grid.
double foliation_volume_integral(const GraphFoliation& fol, const ScalarField& f);

// min over leaves of (leaf integral of f) - 1; f must be >= -1e-12 pointwise.
double admissibility_margin(const GraphFoliation& fol, const ScalarField& f);
double admissibility_margin(const GraphFoliation& fol, const FieldFn& f);

ExtremalFunction extremal_function(const GraphFoliation& fol, const ModulusParams& params);

ModulusReport p_modulus(const GraphFoliation& fol, const ModulusParams& params);

// res1 = |int f0^{p-1} phi hat(psi) - int f0^{p-1} hat(phi) psi|,
// res2 = |int f0^{p-1} phi - int f0^p hat(phi)|.
std::pair<double, double> fubini_residuals(const GraphFoliation& fol,
                                           const ModulusParams& params,
                                           const FieldFn& phi, const FieldFn& psi);

// Level-set weight: integral of |grad u|^{q-1} over the leaf u = t.
double nu_q(const GridChart& chart, const LevelSetFunction& u, double q, double t);

// modulus of the foliation by level sets of u via the nu route.
double modulus_from_levels(const GridChart& chart, const LevelSetFunction& u,
                           const ModulusParams& params);

// div(|grad u|^{q-2} grad u) at a point, by finite differences of the fluxes
// (flux form); h = 0 picks a default step.
double q_laplacian_at(const GridChart& chart, const LevelSetFunction& u, double q,
                      double r, double theta, double h = 0.0);
ScalarField q_laplacian(const GridChart& chart, const LevelSetFunction& u, double q);

// |central difference d(nu)/dt - leaf integral of q_laplacian(u)/|grad u||.
double nu_derivative_residual(const GridChart& chart, const LevelSetFunction& u,
                              const ModulusParams& params, double s, double h);

// Residual field of q_laplacian(u) = f0 |grad u| * hat(q_laplacian(u)/|grad u|),
// sampled on the leaves of u; zero iff the foliation by level sets of u is a
// critical point of the p-modulus functional.
ScalarField criticality_residual_u(const GridChart& chart, const LevelSetFunction& u,
                                   const ModulusParams& params);

}  // namespace folmod
