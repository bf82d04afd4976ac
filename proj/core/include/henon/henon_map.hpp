#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace henon {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;

/// A point of C^2.
struct ComplexPoint {
  Complex x;
  Complex y;

  bool operator==(const ComplexPoint&) const = default;
};

bool is_finite(const Complex& z);
bool is_finite(const ComplexPoint& pt);

/// Sup-norm distance on C^2.
double distance(const ComplexPoint& a, const ComplexPoint& b);

/// Raised when an iterate overflows; callers treat the orbit as escaped.
class OrbitEscaped : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Generalized Henon map f(x, y) = (p(x) - a*y, x) with p monic of degree d >= 2.
///
/// The polynomial is stored by its non-leading coefficients in ascending order, so
/// `coeffs.size()` is the degree. A non-monic p can always be brought to this form by
/// an affine change of coordinates.
class HenonMap {
 public:
  HenonMap(std::vector<Complex> coeffs, Complex a);

  /// p(x) = x^2 + c.
  static HenonMap quadratic(Complex c, Complex a);

  int degree() const { return static_cast<int>(coeffs_.size()); }
  Complex jacobian_determinant() const { return a_; }
  std::span<const Complex> coeffs() const { return coeffs_; }

  /// True when every coefficient and a are real.
  bool has_real_coefficients() const;

  /// Copy with coefficient `slot` (ascending index, below the leading term) replaced.
  HenonMap with_coefficient(std::size_t slot, Complex value) const;

  Complex poly(Complex x) const;
  Complex poly_derivative(Complex x) const;

  /// Upper bound of |p''| over the closed disk |z| <= radius.
  double second_derivative_bound(double radius) const;

  /// Generic Horner evaluation for other complex scalar types.
  template <typename C>
  C poly_as(const C& x) const {
    C acc(1);
    for (std::size_t j = coeffs_.size(); j-- > 0;) {
      acc = acc * x + C(coeffs_[j].real(), coeffs_[j].imag());
    }
    return acc;
  }

  bool operator==(const HenonMap&) const = default;

 private:
  std::vector<Complex> coeffs_;
  Complex a_;
};

/// Radius R with |x| >= max(|y|, R) implying escape to infinity.
struct FiltrationRadius {
  double value = 0.0;
};

ComplexPoint evaluate(const HenonMap& map, const ComplexPoint& pt);
ComplexPoint inverse(const HenonMap& map, const ComplexPoint& pt);
Matrix2c jacobian(const HenonMap& map, const ComplexPoint& pt);

/// Largest positive root of r^d = (1 + |a|) r + sum_j |c_j| r^j.
FiltrationRadius filtration_radius(const HenonMap& map);

inline constexpr double kEscapeThreshold = 1e8;
inline constexpr int kGreenMaxIter = 100;

/// Escape-rate estimate d^-n log|x_n| of the forward Green function. Zero if the
/// first coordinate never passes the escape threshold within `max_iter` steps.
double green_plus(const HenonMap& map, const ComplexPoint& pt, int max_iter = kGreenMaxIter);

/// Backward counterpart, iterating the inverse and watching the second coordinate.
double green_minus(const HenonMap& map, const ComplexPoint& pt, int max_iter = kGreenMaxIter);

}  // namespace henon
