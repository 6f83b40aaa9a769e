#pragma once

// Deterministic families of smooth test fields with analytic derivatives.
// Random fields are trigonometric sums drawn from a fixed-seed generator whose
// output sequence is identical across platforms; interval-base normal fields
// are multiplied by a window vanishing to second order at the boundary leaves.

#include <cstdint>
#include <random>

#include "folmod/foliation.hpp"

namespace folmod {

// Fixed-seed RNG with a portable mapping to doubles (std::mt19937 output is
// specified by the standard; the distribution adapters are not).
class PortableRng {
  public:
    explicit PortableRng(std::uint32_t seed) : gen_(seed) {}
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (gen_() * (1.0 / 4294967296.0));
    }
    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(gen_() % static_cast<std::uint32_t>(hi - lo + 1));
    }

  private:
    std::mt19937 gen_;
};

// f = sin(theta) scaled to the fiber circle of the profile.
NormalField sin_theta_field(const WarpProfile& prof);

// Random normal test field; compactly supported in r on interval bases.
NormalField random_normal_field(const WarpProfile& prof, std::uint32_t seed,
                                int modes = 3);

// Random general vector field on the chart (not windowed).
GeneralField random_general_field(const WarpProfile& prof, std::uint32_t seed,
                                  int modes = 2);

// Named fields for the Jacobian worked examples.
GeneralField radial_scaling_field();                         // r d/dr
GeneralField rotation_field();                               // d/theta
GeneralField sin_theta_radial_field(const WarpProfile& prof);  // sin(theta) d/dr

}  // namespace folmod
