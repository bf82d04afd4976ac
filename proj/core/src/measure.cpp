#include "henon/measure.hpp"

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

namespace henon {

namespace {

using Cell = std::array<long long, 4>;

std::map<Cell, double> bin(const EmpiricalMeasure& m, double side) {
  std::map<Cell, double> cells;
  auto index = [side](double v) { return static_cast<long long>(std::floor(v / side + 0.5)); };
  for (const auto& atom : m.atoms) {
    const Cell c{index(atom.point.x.real()), index(atom.point.x.imag()), index(atom.point.y.real()),
                 index(atom.point.y.imag())};
    cells[c] += atom.weight;
  }
  return cells;
}

}  // namespace

EmpiricalMeasure empirical_measure(const PeriodSpectrum& spectrum, PointSet which) {
  EmpiricalMeasure m;
  m.half_width = filtration_radius(spectrum.map).value;
  const double weight = 1.0 / static_cast<double>(spectrum.capacity());
  for (const auto& orbit : spectrum.orbits) {
    if (!selects(which, orbit, spectrum.n)) continue;
    for (int j = 0; j < orbit.period; ++j) m.atoms.push_back({orbit.xs.point(j), weight});
  }
  m.total = weight * static_cast<double>(m.atoms.size());
  return m;
}

double discrepancy(const EmpiricalMeasure& m1, const EmpiricalMeasure& m2, double cell_side) {
  if (!(cell_side > 0.0)) throw std::invalid_argument("cell side must be positive");
  const auto b1 = bin(m1, cell_side);
  const auto b2 = bin(m2, cell_side);
  // Walk the union of cells in key order so the sum does not depend on argument order.
  double tv = 0.0;
  auto i1 = b1.begin();
  auto i2 = b2.begin();
  while (i1 != b1.end() || i2 != b2.end()) {
    if (i2 == b2.end() || (i1 != b1.end() && i1->first < i2->first)) {
      tv += std::abs(i1->second);
      ++i1;
    } else if (i1 == b1.end() || i2->first < i1->first) {
      tv += std::abs(i2->second);
      ++i2;
    } else {
      tv += std::abs(i1->second - i2->second);
      ++i1;
      ++i2;
    }
  }
  return 0.5 * tv;
}

std::vector<MomentIndex> moment_indices(int max_order) {
  if (max_order < 0) throw std::invalid_argument("moment order must be nonnegative");
  std::vector<MomentIndex> out;
  for (int total = 0; total <= max_order; ++total) {
    for (int j = total; j >= 0; --j) out.push_back({j, total - j});
  }
  return out;
}

std::vector<Complex> moments(const EmpiricalMeasure& m, int max_order) {
  const auto indices = moment_indices(max_order);
  std::vector<Complex> out(indices.size());
  for (const auto& atom : m.atoms) {
    for (std::size_t i = 0; i < indices.size(); ++i) {
      out[i] += atom.weight * std::pow(atom.point.x, indices[i].j) * std::pow(atom.point.y, indices[i].k);
    }
  }
  return out;
}

}  // namespace henon
