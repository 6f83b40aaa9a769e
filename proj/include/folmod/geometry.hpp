#pragma once

// Curvature quantities of the foliation by warp slices {r = const}. The unit
// normal is N = d/dr (increasing r); the scalar mean curvature carries the
// sign h = -k w'/w so that the radial criticality condition holds.

#include <vector>

#include "folmod/grid.hpp"

namespace folmod {

struct GeometryQuantities {
    std::vector<double> sigma;      // leaf volume V_k w^k
    std::vector<double> mean_curv;  // h = -k w'/w
    std::vector<double> pi_sq;      // |second fundamental form|^2 = k (w'/w)^2
    std::vector<double> ric_n;      // Ricci curvature along N = -k w''/w
    std::vector<double> nnn;        // |grad_N N|, identically 0 for warped products
    std::vector<double> div_nnn;    // div(grad_N N), identically 0
    double bko_residual = 0.0;      // max | N(h) - |Pi|^2 - Ric(N) | at interior nodes
};

double leaf_volume(const WarpProfile& profile, double r);

GeometryQuantities curvature_quantities(const GridChart& chart);

// Residual of the identity N(h) = |Pi|^2 + Ric(N) - div(grad_N N), with N(h)
// taken by finite differences of the sampled mean curvature (the divergence
// term vanishes identically on warp slices). Interior nodes only (central
// difference stencils).
double bko_residual(const GridChart& chart);

}  // namespace folmod
