#pragma once

#include <vector>

#include "henon/lyapunov.hpp"
#include "henon/periodic.hpp"

namespace henon {

struct Atom {
  ComplexPoint point;
  double weight = 0.0;
};

/// Weighted point cloud d^-n sum of Dirac masses over a chosen set of periodic points.
struct EmpiricalMeasure {
  std::vector<Atom> atoms;
  double total = 0.0;
  double half_width = 0.0;  // atoms lie in the bidisk max(|x|, |y|) <= half_width
};

EmpiricalMeasure empirical_measure(const PeriodSpectrum& spectrum, PointSet which);

/// Cell side giving `cells` cells across the box [-half_width, half_width].
inline double cell_side_for(double half_width, int cells = 32) { return 2.0 * half_width / cells; }

/// Binned total variation: both measures are binned on the lattice of cubes of side
/// `cell_side` in R^4 (centred on the origin) and half the l1 mass difference returned.
double discrepancy(const EmpiricalMeasure& m1, const EmpiricalMeasure& m2, double cell_side);

struct MomentIndex {
  int j = 0;  // power of x
  int k = 0;  // power of y
};

/// Ordering used by moments(): by total degree, then by descending power of x.
std::vector<MomentIndex> moment_indices(int max_order);

/// sum_i w_i x_i^j y_i^k for every (j, k) of moment_indices(max_order).
std::vector<Complex> moments(const EmpiricalMeasure& m, int max_order);

}  // namespace henon
