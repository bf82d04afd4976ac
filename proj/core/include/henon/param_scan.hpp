#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "henon/periodic.hpp"

namespace henon {

/// Holomorphic one-parameter family c -> f_c obtained by writing c into one
/// coefficient slot of a base map, sampled on a square grid around `center`.
struct FamilySpec {
  HenonMap base;
  std::size_t slot = 0;  // default: the constant term of p
  Complex center;
  double radius = 0.25;
  int grid_size = 11;     // odd, >= 5, so the centre is a sample
  bool disk_mask = false;  // skip cells farther than radius from the centre

  void validate() const;
  double step() const { return 2.0 * radius / (grid_size - 1); }
  /// Row index runs along the imaginary axis, column along the real axis.
  Complex parameter(int row, int col) const;
  HenonMap map_at(Complex c) const { return base.with_coefficient(slot, c); }
};

struct ScanCell {
  Complex c;
  int row = 0;
  int col = 0;
  bool skipped = false;  // outside the disk mask
  bool complete = false;
  double lambda_n = 0.0;
  double lambda_prev_n = 0.0;  // NaN for n = 1
  int n_sinks = 0;
  int n_elliptic = 0;
  std::optional<double> laplacian_defect;
};

struct ScanField {
  FamilySpec family;
  int n = 0;
  std::vector<ScanCell> cells;  // row-major

  const ScanCell& at(int row, int col) const { return cells[static_cast<std::size_t>(row * family.grid_size + col)]; }
  ScanCell& at(int row, int col) { return cells[static_cast<std::size_t>(row * family.grid_size + col)]; }
  /// Largest defect over cells where it is set; 0 if none.
  double max_defect() const;
};

struct ScanOptions {
  EnumerationOptions enumeration;  // its thread count is ignored; cells run in parallel
  int threads = 1;
  double elliptic_eps = 1e-6;  // tolerance on | |a| - 1 |
  std::function<void(std::size_t done, std::size_t total)> progress;  // invoked from worker threads
};

/// Per cell: Fix_1 .. Fix_n, Lambda_n over saddles, sinks and elliptic orbits of
/// exact period <= n.
ScanField scan(const FamilySpec& family, int n, const ScanOptions& options = {});

/// Fills the five-point |Laplacian| / h^2 on interior cells whose four neighbours
/// and the cell itself are complete.
ScanField laplacian_defect(ScanField field);

/// Field whose lambda_n is fn(c) on every cell, all cells complete.
ScanField synthetic_field(const FamilySpec& family, const std::function<double(Complex)>& fn);

}  // namespace henon
