#pragma once

#include <vector>

#include "henon/periodic.hpp"

namespace henon {

/// Green values along a periodic orbit, computed in 113-bit arithmetic.
///
/// Near a saddle the Green functions are only Holder continuous, so the ~1e-16
/// offset of a double-precision periodic point already yields values of order
/// 1e-4 for G-. The orbit is first polished by mixed-precision Newton (residual in
/// quad, correction from the double Jacobian) and then iterated in quad.
struct OrbitGreenValues {
  std::vector<double> plus;
  std::vector<double> minus;
  double polished_residual = 0.0;

  double max() const;
};

OrbitGreenValues orbit_green_values(const HenonMap& map, const PeriodicOrbit& orbit, int max_iter = kGreenMaxIter,
                                    int polish_steps = 3);

}  // namespace henon
