#include "henon/henon_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace henon {

bool is_finite(const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

bool is_finite(const ComplexPoint& pt) { return is_finite(pt.x) && is_finite(pt.y); }

double distance(const ComplexPoint& a, const ComplexPoint& b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

HenonMap::HenonMap(std::vector<Complex> coeffs, Complex a) : coeffs_(std::move(coeffs)), a_(a) {
  if (coeffs_.size() < 2) {
    throw std::invalid_argument("Henon map needs a polynomial of degree >= 2");
  }
  if (a_ == Complex(0.0)) {
    throw std::invalid_argument("Henon map needs a nonzero Jacobian determinant");
  }
  if (!is_finite(a_) || !std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) { return is_finite(c); })) {
    throw std::invalid_argument("Henon map coefficients must be finite");
  }
}

HenonMap HenonMap::quadratic(Complex c, Complex a) { return HenonMap({c, Complex(0.0)}, a); }

bool HenonMap::has_real_coefficients() const {
  return a_.imag() == 0.0 &&
         std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) { return c.imag() == 0.0; });
}

HenonMap HenonMap::with_coefficient(std::size_t slot, Complex value) const {
  if (slot >= coeffs_.size()) {
    throw std::out_of_range("coefficient slot beyond the non-leading terms");
  }
  auto coeffs = coeffs_;
  coeffs[slot] = value;
  return HenonMap(std::move(coeffs), a_);
}

Complex HenonMap::poly(Complex x) const { return poly_as(x); }

Complex HenonMap::poly_derivative(Complex x) const {
  const std::size_t d = coeffs_.size();
  Complex acc(static_cast<double>(d));
  for (std::size_t j = d - 1; j >= 1; --j) {
    acc = acc * x + static_cast<double>(j) * coeffs_[j];
  }
  return acc;
}

double HenonMap::second_derivative_bound(double radius) const {
  const std::size_t d = coeffs_.size();
  double acc = static_cast<double>(d * (d - 1));
  for (std::size_t j = d - 1; j >= 2; --j) {
    acc = acc * radius + static_cast<double>(j * (j - 1)) * std::abs(coeffs_[j]);
  }
  return acc;
}

ComplexPoint evaluate(const HenonMap& map, const ComplexPoint& pt) {
  ComplexPoint out{map.poly(pt.x) - map.jacobian_determinant() * pt.y, pt.x};
  if (!is_finite(out)) {
    throw OrbitEscaped("forward iterate overflowed");
  }
  return out;
}

ComplexPoint inverse(const HenonMap& map, const ComplexPoint& pt) {
  ComplexPoint out{pt.y, (map.poly(pt.y) - pt.x) / map.jacobian_determinant()};
  if (!is_finite(out)) {
    throw OrbitEscaped("backward iterate overflowed");
  }
  return out;
}

Matrix2c jacobian(const HenonMap& map, const ComplexPoint& pt) {
  Matrix2c m;
  m << map.poly_derivative(pt.x), -map.jacobian_determinant(), Complex(1.0), Complex(0.0);
  return m;
}

FiltrationRadius filtration_radius(const HenonMap& map) {
  const auto coeffs = map.coeffs();
  const int d = map.degree();
  const double abs_a = std::abs(map.jacobian_determinant());
  auto excess = [&](double r) {
    double lower = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 0;) {
      lower = lower * r + std::abs(coeffs[j]);
    }
    return std::pow(r, d) - lower - (1.0 + abs_a) * r;
  };
  double lo = 0.0;
  double hi = 2.0 + abs_a;
  for (const auto& c : coeffs) hi += std::abs(c);
  // One sign change: negative on (0, R), positive beyond.
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {hi};
}

double green_plus(const HenonMap& map, const ComplexPoint& pt, int max_iter) {
  const double d = map.degree();
  ComplexPoint cur = pt;
  double scale = 1.0;
  for (int n = 0;; ++n) {
    const double r = std::abs(cur.x);
    if (r > kEscapeThreshold) return scale * std::log(r);
    if (n == max_iter) return 0.0;
    try {
      cur = evaluate(map, cur);
    } catch (const OrbitEscaped&) {
      return scale / d * std::log(std::numeric_limits<double>::max());
    }
    scale /= d;
  }
}

double green_minus(const HenonMap& map, const ComplexPoint& pt, int max_iter) {
  const double d = map.degree();
  ComplexPoint cur = pt;
  double scale = 1.0;
  for (int n = 0;; ++n) {
    const double r = std::abs(cur.y);
    if (r > kEscapeThreshold) return scale * std::log(r);
    if (n == max_iter) return 0.0;
    try {
      cur = inverse(map, cur);
    } catch (const OrbitEscaped&) {
      return scale / d * std::log(std::numeric_limits<double>::max());
    }
    scale /= d;
  }
}

}  // namespace henon
