#include "henon/precise.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

namespace henon {

namespace {

using Quad = boost::multiprecision::cpp_bin_float_quad;
using ComplexQuad = boost::multiprecision::cpp_complex_quad;

ComplexQuad to_quad(const Complex& z) { return ComplexQuad(z.real(), z.imag()); }

Complex to_double(const ComplexQuad& z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

std::vector<ComplexQuad> residual(const HenonMap& map, const std::vector<ComplexQuad>& xs) {
  const std::size_t n = xs.size();
  const ComplexQuad a = to_quad(map.jacobian_determinant());
  std::vector<ComplexQuad> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = map.poly_as(xs[k]) - a * xs[(k + n - 1) % n] - xs[(k + 1) % n];
  }
  return out;
}

double green(const HenonMap& map, ComplexQuad x, ComplexQuad y, int max_iter, bool forward) {
  const ComplexQuad a = to_quad(map.jacobian_determinant());
  const Quad threshold(kEscapeThreshold);
  const double d = map.degree();
  double scale = 1.0;
  for (int n = 0;; ++n) {
    const Quad r = abs(forward ? x : y);
    if (r > threshold) return scale * std::log(static_cast<double>(r));
    if (n == max_iter) return 0.0;
    if (forward) {
      ComplexQuad next = map.poly_as(x) - a * y;
      y = x;
      x = next;
    } else {
      ComplexQuad prev = (map.poly_as(y) - x) / a;
      x = y;
      y = prev;
    }
    scale /= d;
  }
}

}  // namespace

double OrbitGreenValues::max() const {
  double m = 0.0;
  for (double v : plus) m = std::max(m, v);
  for (double v : minus) m = std::max(m, v);
  return m;
}

OrbitGreenValues orbit_green_values(const HenonMap& map, const PeriodicOrbit& orbit, int max_iter, int polish_steps) {
  const int n = orbit.period;
  std::vector<ComplexQuad> xs;
  xs.reserve(n);
  for (const auto& z : orbit.xs.xs) xs.push_back(to_quad(z));

  Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    j(k, k) += map.poly_derivative(orbit.xs.xs[k]);
    j(k, (k + n - 1) % n) -= map.jacobian_determinant();
    j(k, (k + 1) % n) -= 1.0;
  }
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(j);
  for (int step = 0; step < polish_steps; ++step) {
    const auto r = residual(map, xs);
    Eigen::VectorXcd rhs(n);
    for (int k = 0; k < n; ++k) rhs(k) = -to_double(r[k]);
    const Eigen::VectorXcd delta = lu.solve(rhs);
    for (int k = 0; k < n; ++k) xs[k] += to_quad(delta(k));
  }

  OrbitGreenValues out;
  for (const auto& z : residual(map, xs)) out.polished_residual = std::max(out.polished_residual, static_cast<double>(abs(z)));
  for (int k = 0; k < n; ++k) {
    const ComplexQuad& x = xs[k];
    const ComplexQuad& y = xs[(k + n - 1) % n];
    out.plus.push_back(green(map, x, y, max_iter, true));
    out.minus.push_back(green(map, x, y, max_iter, false));
  }
  return out;
}

}  // namespace henon
