#pragma once

// First and second variation of the p-modulus under normal flows, Jacobian
// derivative formulas with a flow-based finite-difference cross-check,
// criticality and stability verdicts, and the weighted Hardy-type inequality.

#include <string>
#include <utility>
#include <vector>

#include "folmod/modulus.hpp"

namespace folmod {

// For X = f N: (div_F X, div_{F-perp} X) = (-f h, N f) along leaves.
std::pair<ScalarField, ScalarField> leafwise_divergences(const GraphFoliation& fol,
                                                         const NormalField& f);

struct JacobianDerivatives {
    ScalarField div_leaf;  // leafwise divergence of X
    ScalarField d2j_leaf;  // second t-derivative of the leafwise Jacobian at t=0
    ScalarField div_full;  // divergence of X
    ScalarField d2j_full;  // second t-derivative of the full Jacobian at t=0
};

// Evaluates the Jacobian-derivative formulas on the chart grid (surface mode)
// using the warped-product Christoffel symbols.
JacobianDerivatives jacobian_derivatives(const GridChart& chart, const GeneralField& x);

struct FlowCheckResult {
    std::vector<double> r_nodes, th_nodes;      // evaluation grid
    ScalarField analytic_leaf, fd_leaf;         // d2 J-leaf
    ScalarField analytic_full, fd_full;         // d2 J-full
    double max_rel_leaf = 0.0, max_rel_full = 0.0;
};

// Finite second differences of numerically flowed Jacobians vs the analytic
// formulas; the numerical oracle that pins the curvature sign conventions.
FlowCheckResult jacobian_flow_check(const GridChart& chart, const GeneralField& x,
                                    double t_step = 1e-3, int rk_steps = 16,
                                    int eval_nr = 12, int eval_nth = 12);

// d/dt mod_p(F_t) at t = 0 for the flow of X = f N.
double first_variation(const GraphFoliation& fol, const ModulusParams& params,
                       const NormalField& f);

// Residual field N(log f0^p) - p h; vanishes iff the foliation is a critical
// point of the p-modulus functional.
ScalarField critical_residual(const GraphFoliation& fol, const ModulusParams& params);

struct SecondVariationReport {
    double a_part = 0.0;  // curvature/gradient integral
    double b_part = 0.0;  // nonnegative hat-squared integral
    double total = 0.0;
    double scale = 0.0;  // magnitude reference for relative verdicts
    std::string field_id;
    bool critical = false;
    double critical_residual_max = 0.0;
    bool fd_checked = false;
    double fd_value = 0.0;       // flow-based second difference of the modulus
    double fd_discrepancy = 0.0;
};

// Requires p >= 2. If the foliation is not critical the report is still
// produced, flagged by `critical = false`.
SecondVariationReport second_variation(const GraphFoliation& fol,
                                       const ModulusParams& params,
                                       const NormalField& f, bool fd_check = false,
                                       double fd_h = 1e-2, int flow_steps = 32);

struct StabilityReport {
    bool stable = false;
    double max_total = 0.0;
    int worst_index = -1;
    std::vector<SecondVariationReport> records;
};

StabilityReport stability_scan(const GraphFoliation& fol, const ModulusParams& params,
                               const std::vector<NormalField>& family);

// Hardy-type inequality lhs = int f^2 rho_p f0^p, rhs = int |grad_{p,q} f|^2
// f0^p with rho_p = p |Pi|^2 + p Ric(N) + q |grad_N N|^2; the residual
// rhs - lhs is nonnegative on stable foliations.
struct HardyReport {
    double lhs = 0.0, rhs = 0.0, residual = 0.0;
};

HardyReport hardy_report(const GraphFoliation& fol, const ModulusParams& params,
                         const NormalField& f);
double hardy_residual(const GraphFoliation& fol, const ModulusParams& params,
                      const NormalField& f);

struct Alpha0Report {
    double value = 0.0;           // left side of the sufficient condition
    double alpha0_max_dev = 0.0;  // max |alpha0 - 1|
};

// alpha0 = hat(f0^2) / f0; the sufficient stability condition holds when the
// returned value is <= 0 for all test fields.
Alpha0Report alpha0_sufficient_check(const GraphFoliation& fol,
                                     const ModulusParams& params,
                                     const NormalField& f);

// Exponent of the tangential-gradient term in the critical-point identity for
// log f0^p; both variants are available (the term vanishes identically on
// radial critical foliations).
enum class GradTermExponent { linear, squared };

struct Sigma2Report {
    double residual = 0.0;
    bool critical = false;
    double critical_residual_max = 0.0;
};

Sigma2Report sigma2f0_residual(const GraphFoliation& fol, const ModulusParams& params,
                               GradTermExponent grad_term = GradTermExponent::squared);

}  // namespace folmod
