#pragma once

#include <complex>
#include <span>
#include <vector>

namespace henon {

/// All roots of the monic polynomial z^d + c_{d-1} z^{d-1} + ... + c_0, coefficients
/// given ascending without the leading 1. Simultaneous Aberth-Ehrlich iteration.
std::vector<std::complex<double>> monic_roots(std::span<const std::complex<double>> coeffs,
                                              int max_iter = 200, double tol = 1e-14);

}  // namespace henon
