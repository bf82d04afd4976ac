#include "henon/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace henon::io {

namespace {

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw FormatError("expected a complex number as [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json vector_to_json(const std::vector<Complex>& v) {
  json out = json::array();
  for (const auto& z : v) out.push_back(complex_to_json(z));
  return out;
}

std::vector<Complex> vector_from_json(const json& j) {
  if (!j.is_array()) throw FormatError("expected an array of complex numbers");
  std::vector<Complex> out;
  for (const auto& e : j) out.push_back(complex_from_json(e));
  return out;
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number_or_nan(const json& j) { return j.is_number() ? j.get<double>() : std::nan(""); }

}  // namespace

json map_to_json(const HenonMap& map) {
  return json{{"a", complex_to_json(map.jacobian_determinant())},
              {"p", vector_to_json({map.coeffs().begin(), map.coeffs().end()})}};
}

HenonMap map_from_json(const json& j) {
  try {
    return HenonMap(vector_from_json(field(j, "p")), complex_from_json(field(j, "a")));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid map: ") + e.what());
  }
}

json spectrum_to_json(const PeriodSpectrum& s) {
  json per = json::object();
  for (const auto& [k, count] : s.per_counts()) per[std::to_string(k)] = count;
  json orbits = json::array();
  for (const auto& o : s.orbits) {
    orbits.push_back(json{{"period", o.period},
                          {"xs", vector_to_json(o.xs.xs)},
                          {"lambda_s", complex_to_json(o.lambda_s)},
                          {"lambda_u", complex_to_json(o.lambda_u)},
                          {"log_abs_lambda_s", o.log_abs_lambda_s},
                          {"log_abs_lambda_u", o.log_abs_lambda_u},
                          {"chi", o.chi},
                          {"kind", std::string(to_string(o.kind))},
                          {"residual", o.residual},
                          {"certified", o.certified},
                          {"radius", o.radius}});
  }
  json unresolved = json::array();
  for (const auto& u : s.unresolved) unresolved.push_back(vector_to_json(u.xs));
  return json{{"map", map_to_json(s.map)},
              {"n", s.n},
              {"complete", s.complete},
              {"counts", {{"fix", s.fix_count()}, {"per", per}, {"sper", s.sper_count()}}},
              {"orbits", orbits},
              {"unresolved", unresolved},
              {"seeds_used", s.seeds_used}};
}

PeriodSpectrum spectrum_from_json(const json& j) {
  PeriodSpectrum s{map_from_json(field(j, "map")), field(j, "n").get<int>(), {}, {}, false, 0};
  if (s.n < 1) throw FormatError("spectrum period must be >= 1");
  s.complete = field(j, "complete").get<bool>();
  if (j.contains("seeds_used")) s.seeds_used = j.at("seeds_used").get<std::int64_t>();
  for (const auto& e : field(j, "orbits")) {
    PeriodicOrbit o;
    o.period = field(e, "period").get<int>();
    o.xs.xs = vector_from_json(field(e, "xs"));
    if (o.period != o.xs.period() || o.period < 1 || s.n % o.period != 0) {
      throw FormatError("orbit period inconsistent with its xs or with n");
    }
    o.lambda_s = complex_from_json(field(e, "lambda_s"));
    o.lambda_u = complex_from_json(field(e, "lambda_u"));
    o.log_abs_lambda_s = e.contains("log_abs_lambda_s") ? number_or_nan(e.at("log_abs_lambda_s"))
                                                        : std::log(std::abs(o.lambda_s));
    o.log_abs_lambda_u = e.contains("log_abs_lambda_u") ? number_or_nan(e.at("log_abs_lambda_u"))
                                                        : std::log(std::abs(o.lambda_u));
    o.chi = number_or_nan(field(e, "chi"));
    o.kind = parse_orbit_kind(field(e, "kind").get<std::string>());
    o.residual = number_or_nan(field(e, "residual"));
    o.certified = field(e, "certified").get<bool>();
    o.radius = number_or_nan(field(e, "radius"));
    s.orbits.push_back(std::move(o));
  }
  if (j.contains("unresolved")) {
    for (const auto& u : j.at("unresolved")) s.unresolved.push_back({vector_from_json(u)});
  }
  return s;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string format_double(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_measure_csv(std::ostream& out, const EmpiricalMeasure& m) {
  out << "re_x,im_x,re_y,im_y,weight\n";
  for (const auto& a : m.atoms) {
    out << format_double(a.point.x.real()) << ',' << format_double(a.point.x.imag()) << ','
        << format_double(a.point.y.real()) << ',' << format_double(a.point.y.imag()) << ',' << format_double(a.weight)
        << '\n';
  }
}

void write_discrepancy_csv(std::ostream& out, const std::vector<DiscrepancyRow>& rows) {
  out << "n1,n2,resolution,discrepancy,note\n";
  for (const auto& r : rows) {
    out << r.n1 << ',' << r.n2 << ',' << format_double(r.resolution) << ','
        << (r.note.empty() ? format_double(r.discrepancy) : "") << ',' << r.note << '\n';
  }
}

void write_moments_csv(std::ostream& out, const std::vector<MomentRow>& rows) {
  out << "n,j,k,re,im\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.index.j << ',' << r.index.k << ',' << format_double(r.value.real()) << ','
        << format_double(r.value.imag()) << '\n';
  }
}

void write_estimates_csv(std::ostream& out, const std::vector<LyapunovEstimate>& rows) {
  out << "n,which,point_count,lambda_n,chi_sum_form,psi_sum_form,agreement_gap\n";
  for (const auto& e : rows) {
    out << e.n << ',' << to_string(e.which) << ',' << e.point_count << ',';
    if (e.empty()) {
      out << ",,,\n";
      continue;
    }
    out << format_double(e.lambda_n) << ',' << format_double(e.chi_sum_form) << ',' << format_double(e.psi_sum_form)
        << ',' << format_double(e.agreement_gap) << '\n';
  }
}

void write_scan_csv(std::ostream& out, const ScanField& field) {
  out << "re_c,im_c,complete,lambda_n,lambda_prev_n,n_sinks,n_elliptic,laplacian_defect\n";
  for (const auto& c : field.cells) {
    out << format_double(c.c.real()) << ',' << format_double(c.c.imag()) << ',' << (c.complete ? 1 : 0) << ',';
    if (c.skipped) {
      out << ",,,,\n";
      continue;
    }
    out << format_double(c.lambda_n) << ',' << format_double(c.lambda_prev_n) << ',' << c.n_sinks << ','
        << c.n_elliptic << ',' << (c.laplacian_defect ? format_double(*c.laplacian_defect) : "") << '\n';
  }
}

}  // namespace henon::io
