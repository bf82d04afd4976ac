#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "henon/io.hpp"
#include "henon/periodic.hpp"

namespace henon::testing {

inline HenonMap horseshoe() { return HenonMap::quadratic(-6.0, 0.3); }
inline HenonMap mixed() { return HenonMap::quadratic(0.0, 0.5); }

/// Spectra are expensive enough to share between test cases of one binary.
inline const PeriodSpectrum& cached_spectrum(const HenonMap& map, int n) {
  static std::map<std::string, PeriodSpectrum> cache;
  const std::string key = io::map_to_json(map).dump() + "/" + std::to_string(n);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, enumerate_fix(map, n)).first;
  return it->second;
}

inline Complex random_in_disk(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = radius * std::sqrt(u(rng));
  const double t = 2.0 * std::numbers::pi * u(rng);
  return {r * std::cos(t), r * std::sin(t)};
}

inline ComplexPoint random_point(std::mt19937_64& rng, double radius) {
  return {random_in_disk(rng, radius), random_in_disk(rng, radius)};
}

}  // namespace henon::testing
