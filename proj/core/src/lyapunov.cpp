#include "henon/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace henon {

namespace {

// Deterministic summation: fixed order independent of how the terms were produced.
double ordered_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

}  // namespace

std::string_view to_string(PointSet which) {
  switch (which) {
    case PointSet::fix: return "fix";
    case PointSet::per: return "per";
    case PointSet::sper: return "sper";
  }
  return "fix";
}

PointSet parse_point_set(std::string_view text) {
  if (text == "fix") return PointSet::fix;
  if (text == "per") return PointSet::per;
  if (text == "sper") return PointSet::sper;
  throw std::invalid_argument("unknown point set: " + std::string(text));
}

bool selects(PointSet which, const PeriodicOrbit& orbit, int n) {
  switch (which) {
    case PointSet::fix: return true;
    case PointSet::per: return orbit.period == n;
    case PointSet::sper: return orbit.kind == OrbitKind::saddle;
  }
  return false;
}

UnstableDirection dominant_direction(const HenonMap& map, const PeriodicOrbit& orbit, int index) {
  const Monodromy m = monodromy(map, orbit.xs, index);
  const Complex trace = m.scaled.trace();
  const Complex det = std::exp(static_cast<double>(orbit.period) * std::log(map.jacobian_determinant()) -
                               2.0 * m.log_scale);
  const Complex disc = std::sqrt(trace * trace - 4.0 * det);
  const Complex r1 = 0.5 * (trace + disc);
  const Complex r2 = 0.5 * (trace - disc);
  // Pick the root matching lambda_u so equal-modulus pairs stay on one eigenline.
  const Complex target = std::exp(orbit.log_abs_lambda_u - m.log_scale) * std::polar(1.0, std::arg(orbit.lambda_u));
  const Complex mu = std::abs(r1 - target) <= std::abs(r2 - target) ? r1 : r2;
  if (std::abs(r1 - r2) <= 1e-12 * std::max(std::abs(r1), 1e-300)) {
    throw std::domain_error("repeated multiplier: eigenline undefined");
  }

  const Matrix2c& s = m.scaled;
  Eigen::Vector2cd v1(s(0, 1), mu - s(0, 0));
  Eigen::Vector2cd v2(mu - s(1, 1), s(1, 0));
  Eigen::Vector2cd v = v1.norm() >= v2.norm() ? v1 : v2;
  const double norm = v.norm();
  if (!(norm > 0.0)) throw std::domain_error("degenerate monodromy eigenvector");
  return {orbit.xs.point(index), v / norm};
}

UnstableDirection unstable_direction(const HenonMap& map, const PeriodicOrbit& orbit, int index) {
  if (orbit.kind != OrbitKind::saddle) throw std::domain_error("unstable direction requested for a non-saddle orbit");
  return dominant_direction(map, orbit, index);
}

double psi(const HenonMap& map, const UnstableDirection& u) { return std::log((jacobian(map, u.base) * u.dir).norm()); }

LyapunovEstimate lambda_estimate(const HenonMap& map, const PeriodSpectrum& spectrum, PointSet which) {
  LyapunovEstimate est;
  est.n = spectrum.n;
  est.which = which;
  est.deficient = !spectrum.complete;
  std::vector<double> chi_terms;
  std::vector<double> psi_terms;
  bool psi_defined = true;
  for (const auto& orbit : spectrum.orbits) {
    if (!selects(which, orbit, spectrum.n)) continue;
    for (int j = 0; j < orbit.period; ++j) {
      chi_terms.push_back(orbit.chi);
      if (!psi_defined) continue;
      try {
        psi_terms.push_back(psi(map, dominant_direction(map, orbit, j)));
      } catch (const std::domain_error&) {
        psi_defined = false;
      }
    }
  }
  est.point_count = chi_terms.size();
  const double norm = static_cast<double>(spectrum.capacity());
  est.chi_sum_form = ordered_sum(std::move(chi_terms)) / norm;
  est.psi_sum_form = psi_defined ? ordered_sum(std::move(psi_terms)) / norm : std::numeric_limits<double>::quiet_NaN();
  est.lambda_n = est.chi_sum_form;
  est.agreement_gap = std::abs(est.chi_sum_form - est.psi_sum_form);
  return est;
}

}  // namespace henon
