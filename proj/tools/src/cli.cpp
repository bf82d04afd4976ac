#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "henon/io.hpp"
#include "henon/lyapunov.hpp"
#include "henon/measure.hpp"
#include "henon/param_scan.hpp"

namespace henon::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

constexpr int kCacheFormat = 1;

int parse_int(std::string_view text) {
  int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw UsageError("not an integer: '" + std::string(text) + "'");
  }
  return v;
}

double parse_real(std::string_view text) {
  const std::string s(text.begin(), text.end());
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Output goes to --out when given, else to the command's standard output.
void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    io::write_text_file(path, text);
  }
}

// Options shared by every command that may run the enumerator.
struct EnumerationFlags {
  std::int64_t budget = 0;
  std::uint64_t seed = kDefaultSeed;
  SolverTolerances tol;
  std::string cache_dir;
  int threads = 1;

  void add_to(CLI::App& sub) {
    sub.add_option("--budget", budget, "seed orbits per period (0: 1000 d^n)");
    sub.add_option("--seed", seed, "random seed")->capture_default_str();
    sub.add_option("--tol-newton", tol.newton, "Newton residual tolerance")->capture_default_str();
    sub.add_option("--tol-dedup", tol.dedup, "orbit identification tolerance")->capture_default_str();
    sub.add_option("--eps-hyp", tol.eps_hyp, "half-width of the |lambda| = 1 band")->capture_default_str();
    sub.add_option("--tol-cert", tol.certification, "largest certifiable residual")->capture_default_str();
    sub.add_option("--cache-dir", cache_dir, "spectrum cache directory");
    sub.add_option("--threads", threads, "worker threads")->capture_default_str();
  }

  RunConfig config(const std::string& map_spec, std::vector<int> ns, const std::string& out) const {
    RunConfig c;
    c.map_spec = map_spec;
    c.ns = std::move(ns);
    c.budget = budget;
    c.seed = seed;
    c.tol = tol;
    c.out = out;
    c.cache_dir = cache_dir;
    c.threads = threads;
    return c;
  }
};

std::vector<int> periods(const std::optional<int>& n, const std::string& range) {
  if (n && !range.empty()) throw UsageError("--n and --n-range are exclusive");
  if (n) return {*n};
  if (!range.empty()) return parse_n_range(range);
  return {};
}

void check_budget(const RunConfig& config, const HenonMap& map) {
  for (int n : config.ns) {
    if (config.budget != 0 && static_cast<std::uint64_t>(config.budget) < point_capacity(map.degree(), n)) {
      throw UsageError("--budget must be at least d^n = " + std::to_string(point_capacity(map.degree(), n)));
    }
  }
}

struct LoadedSpectrum {
  std::string source;
  std::optional<PeriodSpectrum> spectrum;
  std::string problem;  // why spectrum is missing
};

// Spectra come either from files or from the enumerator (through the cache).
std::vector<LoadedSpectrum> load_spectra(const std::vector<std::string>& files, const RunConfig& config) {
  std::vector<LoadedSpectrum> out;
  for (const auto& f : files) {
    LoadedSpectrum l{f, std::nullopt, {}};
    if (!fs::exists(f)) {
      l.problem = "missing";
    } else {
      try {
        l.spectrum = io::spectrum_from_json(io::read_json_file(f));
      } catch (const io::FormatError&) {
        l.problem = "unreadable";
      } catch (const json::exception&) {
        l.problem = "unreadable";
      }
    }
    out.push_back(std::move(l));
  }
  if (!config.map_spec.empty()) {
    const HenonMap map = load_map(config.map_spec);
    check_budget(config, map);
    for (int n : config.ns) {
      const auto bytes = spectrum_bytes(map, n, config.enumeration(), config.cache_dir);
      out.push_back({"n=" + std::to_string(n), io::spectrum_from_json(json::parse(bytes)), {}});
    }
  }
  return out;
}

PointSet point_set_flag(const std::string& text) {
  try {
    return parse_point_set(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void require_same_map(const std::vector<LoadedSpectrum>& spectra) {
  const PeriodSpectrum* first = nullptr;
  for (const auto& l : spectra) {
    if (!l.spectrum) continue;
    if (first == nullptr) {
      first = &*l.spectrum;
    } else if (!(first->map == l.spectrum->map)) {
      throw std::runtime_error("spectra belong to different maps (" + l.source + ")");
    }
  }
}

int cmd_enumerate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const HenonMap map = load_map(config.map_spec);
  check_budget(config, map);
  const auto options = config.enumeration();
  if (config.ns.size() > 1) {
    if (config.out.empty()) throw UsageError("--n-range needs --out naming a directory");
    fs::create_directories(config.out);
  }
  for (int n : config.ns) {
    const auto bytes = spectrum_bytes(map, n, options, config.cache_dir);
    const std::string path =
        config.ns.size() > 1 ? (fs::path(config.out) / ("fix" + std::to_string(n) + ".json")).string() : config.out;
    emit(bytes, path, out);
    if (!path.empty()) {
      const auto s = io::spectrum_from_json(json::parse(bytes));
      err << "n=" << n << " fix=" << s.fix_count() << "/" << s.capacity() << (s.complete ? "" : " incomplete")
          << " -> " << path << "\n";
    }
  }
  return kExitOk;
}

int cmd_classify(const std::string& spectrum_path, double eps_hyp, const std::string& out_path, std::ostream& out) {
  if (!(eps_hyp > 0)) throw UsageError("--eps-hyp must be positive");
  auto s = io::spectrum_from_json(io::read_json_file(spectrum_path));
  for (auto& o : s.orbits) {
    auto fresh = classify(s.map, o.xs, eps_hyp);
    fresh.certified = o.certified;
    fresh.radius = o.radius;
    o = std::move(fresh);
  }
  emit(io::dump(io::spectrum_to_json(s)), out_path, out);
  return kExitOk;
}

int cmd_measure(const std::vector<LoadedSpectrum>& spectra, PointSet which, int cells, int max_order,
                const std::string& out_path, const std::string& moments_path, std::ostream& out) {
  require_same_map(spectra);
  const PeriodSpectrum* reference = nullptr;
  for (const auto& l : spectra) {
    if (l.spectrum && l.spectrum->complete && (reference == nullptr || l.spectrum->n > reference->n)) {
      reference = &*l.spectrum;
    }
  }
  std::vector<io::DiscrepancyRow> rows;
  std::vector<io::MomentRow> moment_rows;
  const EmpiricalMeasure ref_measure = reference ? empirical_measure(*reference, which) : EmpiricalMeasure{};
  const double side = reference ? cell_side_for(ref_measure.half_width, cells) : 0.0;
  for (const auto& l : spectra) {
    io::DiscrepancyRow row;
    row.n2 = reference ? reference->n : 0;
    row.resolution = side;
    if (!l.spectrum) {
      row.note = l.problem + " " + l.source;
    } else {
      row.n1 = l.spectrum->n;
      if (!l.spectrum->complete) {
        row.note = "incomplete";
      } else if (reference == nullptr) {
        row.note = "no complete reference";
      } else {
        const auto m = empirical_measure(*l.spectrum, which);
        row.discrepancy = discrepancy(m, ref_measure, side);
        const auto idx = moment_indices(max_order);
        const auto values = moments(m, max_order);
        for (std::size_t i = 0; i < idx.size(); ++i) moment_rows.push_back({l.spectrum->n, idx[i], values[i]});
      }
    }
    rows.push_back(std::move(row));
  }
  std::ostringstream table;
  io::write_discrepancy_csv(table, rows);
  emit(table.str(), out_path, out);
  if (!moments_path.empty()) {
    std::ostringstream mt;
    io::write_moments_csv(mt, moment_rows);
    io::write_text_file(moments_path, mt.str());
  }
  return kExitOk;
}

int cmd_lyapunov(const std::vector<LoadedSpectrum>& spectra, const std::vector<PointSet>& which,
                 const std::string& out_path, std::ostream& out, std::ostream& err) {
  require_same_map(spectra);
  std::vector<LyapunovEstimate> rows;
  for (const auto& l : spectra) {
    if (!l.spectrum) {
      err << "skipping " << l.source << ": " << l.problem << "\n";
      continue;
    }
    for (PointSet w : which) rows.push_back(lambda_estimate(*l.spectrum, w));
  }
  std::ostringstream table;
  io::write_estimates_csv(table, rows);
  emit(table.str(), out_path, out);
  return kExitOk;
}

int cmd_scan(const FamilySpec& family, const RunConfig& config, bool validate_stencil, std::ostream& out,
             std::ostream& err) {
  try {
    family.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (validate_stencil) {
    const auto field = laplacian_defect(synthetic_field(family, [](Complex c) { return (c * c).real(); }));
    constexpr double kLimit = 1e-9;
    const double worst = field.max_defect();
    std::ostringstream report;
    report << "stencil validation on Re(c^2): max defect " << std::setprecision(6) << worst << " (limit " << kLimit
           << ") " << (worst < kLimit ? "ok" : "FAILED") << "\n";
    out << report.str();
    if (!config.out.empty()) {
      std::ostringstream table;
      io::write_scan_csv(table, field);
      io::write_text_file(config.out, table.str());
    }
    return worst < kLimit ? kExitOk : kExitRuntime;
  }
  if (config.ns.size() != 1) throw UsageError("scan needs a single --n");
  ScanOptions options;
  options.enumeration = config.enumeration();
  options.threads = config.threads;
  const auto field = laplacian_defect(scan(family, config.ns.front(), options));
  std::ostringstream table;
  io::write_scan_csv(table, field);
  emit(table.str(), config.out, out);
  std::size_t complete = 0;
  int sinks = 0;
  for (const auto& c : field.cells) {
    complete += c.complete ? 1 : 0;
    sinks += c.n_sinks;
  }
  if (!config.out.empty()) {
    err << field.cells.size() << " cells, " << complete << " complete, " << sinks << " sinks, max defect "
        << field.max_defect() << "\n";
  }
  return kExitOk;
}

int cmd_report(const std::string& cache_dir, const std::string& out_path, std::ostream& out) {
  if (!fs::is_directory(cache_dir)) throw std::runtime_error("no cache directory " + cache_dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(cache_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::ostringstream table;
  table << "key,degree,re_a,im_a,n,complete,fix,capacity,per_n,sper,saddle_fraction,lambda_sper\n";
  for (const auto& f : files) {
    PeriodSpectrum s = io::spectrum_from_json(io::read_json_file(f));
    const auto fix = s.fix_count();
    const auto est = lambda_estimate(s, PointSet::sper);
    const Complex a = s.map.jacobian_determinant();
    table << f.stem().string() << ',' << s.map.degree() << ',' << io::format_double(a.real()) << ','
          << io::format_double(a.imag()) << ',' << s.n << ',' << (s.complete ? 1 : 0) << ',' << fix << ','
          << s.capacity() << ',' << s.per_count(s.n) << ',' << s.sper_count() << ','
          << (fix ? io::format_double(static_cast<double>(s.saddle_point_count()) / static_cast<double>(fix)) : "")
          << ',' << (est.empty() ? "" : io::format_double(est.lambda_n)) << '\n';
  }
  emit(table.str(), out_path, out);
  return kExitOk;
}

}  // namespace

void RunConfig::validate() const {
  if (ns.empty()) throw UsageError("a period is required (--n or --n-range)");
  for (int n : ns) {
    if (n < 1) throw UsageError("periods must be >= 1");
  }
  if (budget < 0) throw UsageError("--budget must be nonnegative");
  if (!tol.valid()) throw UsageError("tolerances must be positive");
  if (threads < 1) throw UsageError("--threads must be >= 1");
}

EnumerationOptions RunConfig::enumeration() const {
  EnumerationOptions o;
  o.budget = budget;
  o.rng_seed = seed;
  o.tol = tol;
  o.threads = threads;
  return o;
}

std::vector<int> parse_n_range(std::string_view text) {
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) return {parse_int(text)};
  const int lo = parse_int(text.substr(0, dots));
  const int hi = parse_int(text.substr(dots + 2));
  if (hi < lo) throw UsageError("empty period range '" + std::string(text) + "'");
  std::vector<int> out;
  for (int n = lo; n <= hi; ++n) out.push_back(n);
  return out;
}

Complex parse_complex(std::string_view text) {
  if (text.size() >= 2 && text.front() == '(' && text.back() == ')') text = text.substr(1, text.size() - 2);
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) return {parse_real(text), 0.0};
  return {parse_real(text.substr(0, comma)), parse_real(text.substr(comma + 1))};
}

HenonMap load_map(const std::string& spec) {
  if (spec.empty()) throw UsageError("--map is required");
  const auto first = spec.find_first_not_of(" \t\n");
  if (first != std::string::npos && spec[first] == '{') {
    try {
      return io::map_from_json(json::parse(spec));
    } catch (const json::parse_error& e) {
      throw io::FormatError(std::string("inline map: ") + e.what());
    }
  }
  return io::map_from_json(io::read_json_file(spec));
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string cache_key(const HenonMap& map, int n, const EnumerationOptions& options) {
  const std::int64_t budget =
      options.budget != 0 ? options.budget : static_cast<std::int64_t>(1000 * point_capacity(map.degree(), n));
  const json key{{"format", kCacheFormat},
                 {"map", io::map_to_json(map)},
                 {"n", n},
                 {"budget", budget},
                 {"seed", options.rng_seed},
                 {"tol_newton", options.tol.newton},
                 {"tol_dedup", options.tol.dedup},
                 {"tol_cert", options.tol.certification},
                 {"eps_hyp", options.tol.eps_hyp},
                 {"max_newton_steps", options.max_newton_steps},
                 {"symbolic_seeds", options.symbolic_seeds},
                 {"batch_size", options.batch_size}};
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(key.dump());
  return s.str();
}

std::string spectrum_bytes(const HenonMap& map, int n, const EnumerationOptions& options, const std::string& cache_dir) {
  fs::path cached;
  if (!cache_dir.empty()) {
    cached = fs::path(cache_dir) / (cache_key(map, n, options) + ".json");
    if (fs::exists(cached)) return read_bytes(cached);
  }
  const std::string bytes = io::dump(io::spectrum_to_json(enumerate_fix(map, n, options)));
  if (!cached.empty()) {
    fs::create_directories(cached.parent_path());
    const fs::path tmp = cached.string() + ".tmp";
    io::write_text_file(tmp, bytes);
    fs::rename(tmp, cached);
  }
  return bytes;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Periodic orbits, measures and Lyapunov exponents of complex Henon maps", "henon"};
  app.require_subcommand(1);

  std::string map_spec;
  std::optional<int> n;
  std::string n_range;
  std::string out_path;
  EnumerationFlags flags;

  auto* enumerate = app.add_subcommand("enumerate", "enumerate and certify Fix_n, write spectrum JSON");
  enumerate->add_option("--map", map_spec, "map JSON file or inline JSON")->required();
  enumerate->add_option("--n", n, "period");
  enumerate->add_option("--n-range", n_range, "periods lo..hi (writes fix<n>.json under --out)");
  enumerate->add_option("--out", out_path, "output file");
  flags.add_to(*enumerate);

  std::string spectrum_path;
  double classify_eps = SolverTolerances{}.eps_hyp;
  auto* classify_cmd = app.add_subcommand("classify", "re-derive orbit classifications of a spectrum");
  classify_cmd->add_option("--spectrum", spectrum_path, "spectrum JSON")->required();
  classify_cmd->add_option("--eps-hyp", classify_eps, "half-width of the |lambda| = 1 band")->capture_default_str();
  classify_cmd->add_option("--out", out_path, "output file");

  std::vector<std::string> spectrum_files;
  std::string which_text = "fix";
  int cells = 32;
  int max_order = 3;
  std::string moments_path;
  auto* measure = app.add_subcommand("measure", "convergence table of empirical measures");
  measure->add_option("--spectrum", spectrum_files, "spectrum JSON (repeatable)");
  measure->add_option("--map", map_spec, "map to enumerate instead of reading spectra");
  measure->add_option("--n", n, "period");
  measure->add_option("--n-range", n_range, "periods lo..hi");
  measure->add_option("--which", which_text, "fix, per or sper")->capture_default_str();
  measure->add_option("--cells", cells, "cells across the bounding box")->capture_default_str();
  measure->add_option("--max-order", max_order, "largest moment order")->capture_default_str();
  measure->add_option("--out", out_path, "discrepancy CSV");
  measure->add_option("--moments-out", moments_path, "moments CSV");
  flags.add_to(*measure);

  std::vector<std::string> which_list;
  auto* lyapunov = app.add_subcommand("lyapunov", "finite-n Lyapunov exponent estimates");
  lyapunov->add_option("--spectrum", spectrum_files, "spectrum JSON (repeatable)");
  lyapunov->add_option("--map", map_spec, "map to enumerate instead of reading spectra");
  lyapunov->add_option("--n", n, "period");
  lyapunov->add_option("--n-range", n_range, "periods lo..hi");
  lyapunov->add_option("--which", which_list, "fix, per, sper (repeatable; default all three)");
  lyapunov->add_option("--out", out_path, "estimates CSV");
  flags.add_to(*lyapunov);

  std::size_t slot = 0;
  std::string center_text = "0";
  double radius = 0.25;
  int grid = 11;
  bool disk_mask = false;
  bool validate_stencil = false;
  auto* scan_cmd = app.add_subcommand("scan", "parameter grid scan of Lambda_n, sinks and Laplacian defect");
  scan_cmd->add_option("--map", map_spec, "base map JSON file or inline JSON")->required();
  scan_cmd->add_option("--slot", slot, "coefficient slot varied (0: constant term)")->capture_default_str();
  scan_cmd->add_option("--center", center_text, "grid centre re[,im]")->capture_default_str();
  scan_cmd->add_option("--radius", radius, "half side of the grid")->capture_default_str();
  scan_cmd->add_option("--grid", grid, "odd grid side")->capture_default_str();
  scan_cmd->add_option("--n", n, "period");
  scan_cmd->add_flag("--disk-mask", disk_mask, "skip cells outside the inscribed disk");
  scan_cmd->add_flag("--validate-stencil", validate_stencil, "check the stencil on Re(c^2) instead of scanning");
  scan_cmd->add_option("--out", out_path, "scan CSV");
  flags.add_to(*scan_cmd);

  std::string report_dir;
  auto* report = app.add_subcommand("report", "summary of cached spectra");
  report->add_option("--cache-dir", report_dir, "spectrum cache directory")->required();
  report->add_option("--out", out_path, "summary CSV");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (enumerate->parsed()) {
      const auto config = flags.config(map_spec, periods(n, n_range), out_path);
      config.validate();
      return cmd_enumerate(config, out, err);
    }
    if (classify_cmd->parsed()) return cmd_classify(spectrum_path, classify_eps, out_path, out);
    if (measure->parsed() || lyapunov->parsed()) {
      RunConfig config = flags.config(map_spec, periods(n, n_range), out_path);
      if (map_spec.empty()) {
        if (!config.ns.empty()) throw UsageError("--n/--n-range need --map");
        if (spectrum_files.empty()) throw UsageError("give --spectrum files or --map with periods");
        config.ns = {1};  // placeholder so the shared checks apply
      }
      config.validate();
      if (map_spec.empty()) config.ns.clear();
      const auto spectra = load_spectra(spectrum_files, config);
      if (measure->parsed()) {
        if (cells < 1 || max_order < 1) throw UsageError("--cells and --max-order must be >= 1");
        return cmd_measure(spectra, point_set_flag(which_text), cells, max_order, out_path, moments_path, out);
      }
      std::vector<PointSet> which;
      for (const auto& w : which_list) which.push_back(point_set_flag(w));
      if (which.empty()) which = {PointSet::fix, PointSet::per, PointSet::sper};
      return cmd_lyapunov(spectra, which, out_path, out, err);
    }
    if (scan_cmd->parsed()) {
      RunConfig config = flags.config(map_spec, n ? std::vector<int>{*n} : std::vector<int>{}, out_path);
      if (validate_stencil && config.ns.empty()) config.ns = {1};
      config.validate();
      FamilySpec family{load_map(map_spec), slot, parse_complex(center_text), radius, grid, disk_mask};
      return cmd_scan(family, config, validate_stencil, out, err);
    }
    if (report->parsed()) return cmd_report(report_dir, out_path, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace henon::cli
