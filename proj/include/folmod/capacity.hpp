#pragma once

// q-capacity of the condenser bounded by the two boundary leaves of an
// interval-base warped product, the q-harmonic potential, and the exact
// relation mod_p = cap_q^{1-p} between the modulus of the radial foliation
// and the capacity.

#include "folmod/modulus.hpp"

namespace folmod {

struct QHarmonicRadial {
    LevelSetFunction u;  // potential, u = 0 at r = a and u = 1 at r = b
    double c = 0.0;      // u'(r) = c * sigma(r)^{1-p}
};

// The unique radial q-harmonic function with boundary values 0 and 1.
QHarmonicRadial q_harmonic_radial(const GridChart& chart, const ModulusParams& params);

struct CapacityReport {
    double p = 0.0, q = 0.0;
    double capacity = 0.0;           // quadrature of |u'|^q d(mu-bar)
    double capacity_closed = 0.0;    // c^{q-1}
    double modulus = 0.0;            // modulus of the radial foliation, nu route
    double relation_residual = 0.0;  // |modulus - capacity^{1-p}|
    double harmonic_residual = 0.0;  // max |q-Laplacian of u| on the grid
    double nu_constancy = 0.0;       // max |nu_q(u, t) - c^{q-1}| over levels
};

CapacityReport capacity_report(const GridChart& chart, const ModulusParams& params);

}  // namespace folmod
