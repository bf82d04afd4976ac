#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Core>

#include "henon/periodic.hpp"

namespace henon {

/// Which periodic points of a Fix_n spectrum an estimator or measure runs over.
///   fix  - all of Fix_n
///   per  - points of exact period n
///   sper - saddle points of Fix_n (includes saddles of lower exact period)
enum class PointSet { fix, per, sper };

std::string_view to_string(PointSet which);
PointSet parse_point_set(std::string_view text);
bool selects(PointSet which, const PeriodicOrbit& orbit, int n);

struct UnstableDirection {
  ComplexPoint base;
  Eigen::Vector2cd dir;  // unit Euclidean norm
};

/// Eigenvector for lambda_u of the monodromy based at orbit point `index`.
/// Throws std::domain_error unless the orbit is a saddle.
UnstableDirection unstable_direction(const HenonMap& map, const PeriodicOrbit& orbit, int index);

/// Same eigenvector for any orbit whose two multipliers are distinct, so sinks and
/// sources contribute to the psi-sum as well.
UnstableDirection dominant_direction(const HenonMap& map, const PeriodicOrbit& orbit, int index);

/// log |Df(base) dir|.
double psi(const HenonMap& map, const UnstableDirection& u);

struct LyapunovEstimate {
  int n = 0;
  PointSet which = PointSet::sper;
  std::uint64_t point_count = 0;
  double lambda_n = 0.0;       // equals chi_sum_form
  double chi_sum_form = 0.0;   // d^-n sum of chi(p)
  double psi_sum_form = 0.0;   // d^-n sum of psi(p) along dominant directions
  double agreement_gap = 0.0;
  bool deficient = false;      // spectrum incomplete: still normalised by d^n

  bool empty() const { return point_count == 0; }
};

/// Finite-n average of the per-point exponents, normalised by d^n.
LyapunovEstimate lambda_estimate(const HenonMap& map, const PeriodSpectrum& spectrum, PointSet which);
inline LyapunovEstimate lambda_estimate(const PeriodSpectrum& spectrum, PointSet which) {
  return lambda_estimate(spectrum.map, spectrum, which);
}

}  // namespace henon
