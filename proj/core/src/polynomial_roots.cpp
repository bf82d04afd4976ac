#include "henon/polynomial_roots.hpp"

#include <cmath>
#include <numbers>

namespace henon {

namespace {

using C = std::complex<double>;

// Value and derivative by Horner, leading coefficient 1.
void horner(std::span<const C> coeffs, C z, C& value, C& deriv) {
  value = C(1.0);
  deriv = C(0.0);
  for (std::size_t j = coeffs.size(); j-- > 0;) {
    deriv = deriv * z + value;
    value = value * z + coeffs[j];
  }
}

}  // namespace

std::vector<C> monic_roots(std::span<const C> coeffs, int max_iter, double tol) {
  const std::size_t d = coeffs.size();
  if (d == 0) return {};
  if (d == 1) return {-coeffs[0]};
  if (d == 2) {
    const C half_b = 0.5 * coeffs[1];
    const C disc = std::sqrt(half_b * half_b - coeffs[0]);
    // Pick the branch that avoids cancellation, recover the other from the product.
    const C big = std::abs(-half_b + disc) >= std::abs(-half_b - disc) ? -half_b + disc : -half_b - disc;
    if (big == C(0.0)) return {C(0.0), C(0.0)};
    return {big, coeffs[0] / big};
  }

  // Cauchy bound for the initial circle.
  double bound = 0.0;
  for (const auto& c : coeffs) bound = std::max(bound, std::abs(c));
  bound = 1.0 + bound;
  const C centre = -coeffs[d - 1] / static_cast<double>(d);
  std::vector<C> z(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double theta = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.25) / static_cast<double>(d);
    z[k] = centre + 0.5 * bound * C(std::cos(theta), std::sin(theta));
  }

  for (int it = 0; it < max_iter; ++it) {
    double max_step = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      C value, deriv;
      horner(coeffs, z[k], value, deriv);
      if (value == C(0.0)) continue;
      const C ratio = value / deriv;
      C repulsion(0.0);
      for (std::size_t j = 0; j < d; ++j) {
        if (j != k) repulsion += 1.0 / (z[k] - z[j]);
      }
      const C step = ratio / (1.0 - ratio * repulsion);
      z[k] -= step;
      max_step = std::max(max_step, std::abs(step) / (1.0 + std::abs(z[k])));
    }
    if (max_step < tol) break;
  }
  return z;
}

}  // namespace henon
