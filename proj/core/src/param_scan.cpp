#include "henon/param_scan.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "henon/lyapunov.hpp"
#include "henon/parallel.hpp"

namespace henon {

void FamilySpec::validate() const {
  if (grid_size < 5 || grid_size % 2 == 0) throw std::invalid_argument("grid size must be odd and >= 5");
  if (!(radius > 0.0)) throw std::invalid_argument("scan radius must be positive");
  if (slot >= base.coeffs().size()) throw std::invalid_argument("coefficient slot out of range");
}

Complex FamilySpec::parameter(int row, int col) const {
  const double h = step();
  return center + Complex(-radius + col * h, -radius + row * h);
}

double ScanField::max_defect() const {
  double m = 0.0;
  for (const auto& c : cells) {
    if (c.laplacian_defect) m = std::max(m, *c.laplacian_defect);
  }
  return m;
}

namespace {

ScanCell scan_cell(const FamilySpec& family, int n, int row, int col, const ScanOptions& options) {
  ScanCell cell;
  cell.row = row;
  cell.col = col;
  cell.c = family.parameter(row, col);
  cell.lambda_prev_n = std::numeric_limits<double>::quiet_NaN();
  if (family.disk_mask && std::abs(cell.c - family.center) > family.radius * (1.0 + 1e-12)) {
    cell.skipped = true;
    return cell;
  }

  const HenonMap map = family.map_at(cell.c);
  EnumerationOptions enumeration = options.enumeration;
  enumeration.threads = 1;
  const bool area_preserving = std::abs(std::abs(map.jacobian_determinant()) - 1.0) <= options.elliptic_eps;
  const double band = std::log1p(enumeration.tol.eps_hyp);

  cell.complete = true;
  for (int k = 1; k <= n; ++k) {
    const PeriodSpectrum spectrum = enumerate_fix(map, k, enumeration);
    cell.complete = cell.complete && spectrum.complete;
    for (const auto& orbit : spectrum.orbits) {
      if (orbit.period != k) continue;
      if (orbit.kind == OrbitKind::sink) ++cell.n_sinks;
      if (area_preserving && std::abs(orbit.log_abs_lambda_s) <= band && std::abs(orbit.log_abs_lambda_u) <= band) {
        ++cell.n_elliptic;
      }
    }
    if (k == n) cell.lambda_n = lambda_estimate(map, spectrum, PointSet::sper).lambda_n;
    if (k == n - 1) cell.lambda_prev_n = lambda_estimate(map, spectrum, PointSet::sper).lambda_n;
  }
  return cell;
}

}  // namespace

ScanField scan(const FamilySpec& family, int n, const ScanOptions& options) {
  family.validate();
  if (n < 1) throw std::invalid_argument("period must be >= 1");
  ScanField field{family, n, {}};
  const int g = family.grid_size;
  const auto total = static_cast<std::size_t>(g * g);
  field.cells.resize(total);
  std::atomic<std::size_t> done{0};
  parallel_for(total, options.threads, [&](std::size_t i) {
    const int row = static_cast<int>(i) / g;
    const int col = static_cast<int>(i) % g;
    field.cells[i] = scan_cell(family, n, row, col, options);
    const std::size_t finished = ++done;
    if (options.progress) options.progress(finished, total);
  });
  return laplacian_defect(std::move(field));
}

ScanField laplacian_defect(ScanField field) {
  const int g = field.family.grid_size;
  const double h = field.family.step();
  auto usable = [&](int r, int c) {
    const ScanCell& cell = field.at(r, c);
    return !cell.skipped && cell.complete;
  };
  for (auto& cell : field.cells) cell.laplacian_defect.reset();
  for (int r = 1; r + 1 < g; ++r) {
    for (int c = 1; c + 1 < g; ++c) {
      if (!usable(r, c) || !usable(r - 1, c) || !usable(r + 1, c) || !usable(r, c - 1) || !usable(r, c + 1)) continue;
      const double sum = field.at(r, c + 1).lambda_n + field.at(r, c - 1).lambda_n + field.at(r + 1, c).lambda_n +
                         field.at(r - 1, c).lambda_n - 4.0 * field.at(r, c).lambda_n;
      field.at(r, c).laplacian_defect = std::abs(sum) / (h * h);
    }
  }
  return field;
}

ScanField synthetic_field(const FamilySpec& family, const std::function<double(Complex)>& fn) {
  family.validate();
  ScanField field{family, 0, {}};
  const int g = family.grid_size;
  for (int r = 0; r < g; ++r) {
    for (int c = 0; c < g; ++c) {
      ScanCell cell;
      cell.row = r;
      cell.col = c;
      cell.c = family.parameter(r, c);
      cell.complete = true;
      cell.lambda_n = fn(cell.c);
      cell.lambda_prev_n = std::numeric_limits<double>::quiet_NaN();
      field.cells.push_back(cell);
    }
  }
  return laplacian_defect(std::move(field));
}

}  // namespace henon
