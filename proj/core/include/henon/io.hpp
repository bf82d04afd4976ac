#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "henon/lyapunov.hpp"
#include "henon/measure.hpp"
#include "henon/param_scan.hpp"
#include "henon/periodic.hpp"

namespace henon::io {

using nlohmann::json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// { "a": [re, im], "p": [[re, im], ...] }, p ascending without the monic leading 1.
json map_to_json(const HenonMap& map);
HenonMap map_from_json(const json& j);

json spectrum_to_json(const PeriodSpectrum& spectrum);
PeriodSpectrum spectrum_from_json(const json& j);

/// Two-space indented dump with a trailing newline.
std::string dump(const json& j);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Shortest round-trip decimal; empty for NaN or infinity.
std::string format_double(double v);

void write_measure_csv(std::ostream& out, const EmpiricalMeasure& m);

struct DiscrepancyRow {
  int n1 = 0;
  int n2 = 0;
  double resolution = 0.0;
  double discrepancy = 0.0;
  std::string note;  // non-empty for rows that could not be computed
};
void write_discrepancy_csv(std::ostream& out, const std::vector<DiscrepancyRow>& rows);

struct MomentRow {
  int n = 0;
  MomentIndex index;
  Complex value;
};
void write_moments_csv(std::ostream& out, const std::vector<MomentRow>& rows);

void write_estimates_csv(std::ostream& out, const std::vector<LyapunovEstimate>& rows);

void write_scan_csv(std::ostream& out, const ScanField& field);

}  // namespace henon::io
