// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include "henon/io.hpp"
#include "henon/lyapunov.hpp"
#include "henon/measure.hpp"
#include "henon/param_scan.hpp"
#include "henon/periodic.hpp"
#include "henon/precise.hpp"

using namespace henon;
namespace fs = std::filesystem;
// 100 decimal digits: |M|^2 eps must stay far below a^n even for a = 1e-4.
using ComplexWide = boost::multiprecision::cpp_complex_100;

namespace {

constexpr int kMaxPeriod = 10;
const double kLog2 = std::log(2.0);

HenonMap horseshoe() { return HenonMap::quadratic(-6.0, 0.3); }
HenonMap mixed() { return HenonMap::quadratic(0.0, 0.5); }

struct Verdict {
  bool pass = true;
  std::ostringstream details;
  std::string failures;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures += " [failed: " + what + "]";
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

using Spectra = std::map<int, PeriodSpectrum>;

Spectra enumerate_range(const HenonMap& map, int lo, int hi, int threads) {
  EnumerationOptions opt;
  opt.threads = threads;
  Spectra out;
  for (int n = lo; n <= hi; ++n) out.emplace(n, enumerate_fix(map, n, opt));
  return out;
}

FamilySpec disk(const HenonMap& base, Complex center) { return FamilySpec{base, 0, center, 0.25, 11, false}; }

ScanField run_scan(const HenonMap& base, Complex center, int threads) {
  ScanOptions opt;
  opt.threads = threads;
  return laplacian_defect(scan(disk(base, center), 6, opt));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string scan_csv(const ScanField& f) {
  std::ostringstream s;
  io::write_scan_csv(s, f);
  return s.str();
}

// Outputs of the criteria 1 and 11 runs at one thread count.
struct Run {
  Spectra horseshoe;
  ScanField scan_horseshoe;
  ScanField scan_mixed;
};

Run run_at(int threads, const fs::path& dir) {
  Run r{enumerate_range(horseshoe(), 1, kMaxPeriod, threads), run_scan(horseshoe(), -6.0, threads),
        run_scan(mixed(), 0.0, threads)};
  fs::create_directories(dir);
  for (const auto& [n, s] : r.horseshoe) {
    io::write_text_file(dir / ("fix" + std::to_string(n) + ".json"), io::dump(io::spectrum_to_json(s)));
  }
  io::write_text_file(dir / "scan_horseshoe.csv", scan_csv(r.scan_horseshoe));
  io::write_text_file(dir / "scan_mixed.csv", scan_csv(r.scan_mixed));
  return r;
}

int mobius(int n) {
  int result = 1;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    n /= p;
    if (n % p == 0) return 0;
    result = -result;
  }
  return n > 1 ? -result : result;
}

bool contains(const PeriodSpectrum& s, const std::vector<Complex>& xs, double tol) {
  const CyclicOrbitVector v{xs};
  return std::any_of(s.orbits.begin(), s.orbits.end(),
                     [&](const PeriodicOrbit& o) { return orbit_distance(o.xs, v) <= tol; });
}

std::uint64_t sink_points(const PeriodSpectrum& s) {
  std::uint64_t k = 0;
  for (const auto& o : s.orbits) {
    if (o.kind == OrbitKind::sink) k += static_cast<std::uint64_t>(o.period);
  }
  return k;
}

// Multipliers from the monodromy product in extended precision, with the
// determinant taken from the product itself rather than from a^n.
std::pair<ComplexWide, ComplexWide> wide_multipliers(const HenonMap& map, const PeriodicOrbit& orbit) {
  const int n = orbit.period;
  const auto& coeffs = map.coeffs();
  const int d = map.degree();
  const ComplexWide a(map.jacobian_determinant().real(), map.jacobian_determinant().imag());
  ComplexWide m00(1), m01(0), m10(0), m11(1);
  for (int k = 0; k < n; ++k) {
    const ComplexWide x(orbit.xs.xs[k].real(), orbit.xs.xs[k].imag());
    // p'(x) for the monic p(x) = x^d + sum_{j<d} c_j x^j.
    ComplexWide dp = ComplexWide(d);
    for (int j = d - 1; j >= 1; --j) dp = dp * x + ComplexWide(j * coeffs[j].real(), j * coeffs[j].imag());
    // Jacobian (dp, -a; 1, 0) applied on the left.
    const ComplexWide n00 = dp * m00 - a * m10;
    const ComplexWide n01 = dp * m01 - a * m11;
    m10 = m00;
    m11 = m01;
    m00 = n00;
    m01 = n01;
  }
  const ComplexWide trace = m00 + m11;
  const ComplexWide det = m00 * m11 - m01 * m10;
  const ComplexWide disc = sqrt(trace * trace - ComplexWide(4) * det);
  ComplexWide big = (trace + disc) / ComplexWide(2);
  const ComplexWide other = (trace - disc) / ComplexWide(2);
  if (abs(other) > abs(big)) big = other;
  return {det / big, big};
}

double rel(const ComplexWide& got, const ComplexWide& want) { return static_cast<double>(abs(got - want) / abs(want)); }

ComplexWide to_wide(Complex z) { return {z.real(), z.imag()}; }

double max_moment_gap(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  const auto ma = moments(a, 3);
  const auto mb = moments(b, 3);
  double gap = 0.0;
  for (std::size_t i = 0; i < ma.size(); ++i) gap = std::max(gap, std::abs(ma[i] - mb[i]));
  return gap;
}

int max_sinks_or_min(const ScanField& f, bool want_min) {
  int v = want_min ? 1 << 30 : 0;
  for (const auto& c : f.cells) v = want_min ? std::min(v, c.n_sinks) : std::max(v, c.n_sinks);
  return v;
}

bool all_complete(const ScanField& f) {
  return std::all_of(f.cells.begin(), f.cells.end(), [](const ScanCell& c) { return c.complete; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks for the henon library"};
  int threads = 8;
  std::string artifacts = "acceptance";
  app.add_option("--threads", threads, "Worker threads for the main run")->check(CLI::PositiveNumber);
  app.add_option("--artifacts", artifacts, "Directory for spectra and scan outputs");
  CLI11_PARSE(app, argc, argv);

  const auto started = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };

  // Criteria 1 and 11 outputs at every thread count needed by criterion 12.
  std::set<int> thread_counts{1, 4, 8, threads};
  std::map<int, Run> runs;
  std::map<int, double> run_seconds;
  for (int t : thread_counts) {
    const double t0 = elapsed();
    runs.emplace(t, run_at(t, fs::path(artifacts) / ("threads" + std::to_string(t))));
    run_seconds[t] = elapsed() - t0;
  }
  const Run& main_run = runs.at(threads);
  const Spectra& hs = main_run.horseshoe;

  const Spectra mx = enumerate_range(mixed(), 1, kMaxPeriod, threads);
  EnumerationOptions opt;
  opt.threads = threads;
  const PeriodSpectrum weak3 = enumerate_fix(HenonMap::quadratic(0.0, 1e-3), 8, opt);
  const PeriodSpectrum weak4 = enumerate_fix(HenonMap::quadratic(0.0, 1e-4), 8, opt);

  std::vector<Verdict> verdicts(13);

  {  // 1. counting
    Verdict& v = verdicts[1];
    double worst = 0.0;
    for (const auto& [n, s] : hs) {
      v.require(s.complete && s.fix_count() == (1ULL << n), "n=" + std::to_string(n) + " count " + std::to_string(s.fix_count()));
      for (const auto& o : s.orbits) {
        v.require(o.certified, "uncertified orbit at n=" + std::to_string(n));
        worst = std::max(worst, o.residual);
      }
    }
    v.require(worst < 1e-10, "residual");
    // Elimination: fixed points solve x^2 - (1 + a) x + c = 0; the 2-cycle has
    // x0 + x1 = -(1 + a) and x0 x1 = (1 + a)^2 + c.
    const Complex a = 0.3, c = -6.0;
    const Complex b = 1.0 + a;
    const Complex rf = std::sqrt(b * b - 4.0 * c);
    const Complex f0 = (b + rf) / 2.0, f1 = (b - rf) / 2.0;
    const Complex s2 = -b, q2 = b * b + c;
    const Complex rp = std::sqrt(s2 * s2 - 4.0 * q2);
    const Complex p0 = (s2 + rp) / 2.0, p1 = (s2 - rp) / 2.0;
    const bool distinct = std::abs(f0 - f1) > 1e-6 && std::abs(p0 - p1) > 1e-6 && std::abs(p0 - f0) > 1e-6 &&
                          std::abs(p0 - f1) > 1e-6;
    v.require(distinct, "oracle roots are not distinct");
    v.require(hs.at(1).fix_count() == 2 && contains(hs.at(1), {f0}, 1e-12) && contains(hs.at(1), {f1}, 1e-12),
              "n=1 oracle");
    v.require(hs.at(2).fix_count() == 4 && contains(hs.at(2), {f0}, 1e-12) && contains(hs.at(2), {f1}, 1e-12) &&
                  contains(hs.at(2), {p0, p1}, 1e-12),
              "n=2 oracle");
    v.details << "2^n certified points for n=1..10, max residual " << fmt(worst) << ", oracles n=1,2 matched, "
              << fmt(run_seconds.at(threads)) << " s for criteria 1 and 11 at " << threads << " threads";
  }

  {  // 2. chain and Mobius identities
    Verdict& v = verdicts[2];
    for (const auto* spectra : {&hs, &mx}) {
      for (const auto& [n, s] : *spectra) {
        std::map<int, std::uint64_t> orbits_of_period;
        for (const auto& o : s.orbits) {
          v.require(n % o.period == 0, "period does not divide n");
          ++orbits_of_period[o.period];
        }
        std::uint64_t chain = 0;
        for (const auto& [k, count] : orbits_of_period) chain += static_cast<std::uint64_t>(k) * count;
        v.require(chain == s.fix_count(), "chain sum at n=" + std::to_string(n));
        const std::uint64_t per = s.per_count(n);
        v.require(s.sper_count() <= per && per <= s.fix_count() && s.fix_count() <= (1ULL << n),
                  "inequalities at n=" + std::to_string(n));
        long long inverted = 0;
        for (int k : divisors(n)) inverted += mobius(n / k) * static_cast<long long>(spectra->at(k).fix_count());
        v.require(inverted == static_cast<long long>(per), "Mobius inversion at n=" + std::to_string(n));
      }
    }
    v.details << "sum k #Per_k = #Fix_n, #SPer_n <= #Per_n <= #Fix_n <= 2^n and Mobius inversion for n=1..10, both "
                 "parameters";
  }

  {  // 3. saddle fractions
    Verdict& v = verdicts[3];
    for (const auto& [n, s] : hs) v.require(s.saddle_point_count() == s.fix_count(), "horseshoe n=" + std::to_string(n));
    double worst_margin = 1.0;
    for (int n = 1; n <= 8; ++n) {
      const auto& s = mx.at(n);
      const double fraction = static_cast<double>(s.saddle_point_count()) / static_cast<double>(s.fix_count());
      const double bound = 1.0 - 2.0 / std::ldexp(1.0, n);
      v.require(s.complete && fraction >= bound, "mixed n=" + std::to_string(n) + " fraction " + fmt(fraction));
      v.require(sink_points(s) <= 1, "mixed n=" + std::to_string(n) + " sink points " + std::to_string(sink_points(s)));
      worst_margin = std::min(worst_margin, fraction - bound);
    }
    v.details << "horseshoe fraction 1 for n=1..10; mixed fraction >= 1 - 2/2^n for n=1..8 (smallest margin "
              << fmt(worst_margin) << ", sink points per level " << sink_points(mx.at(8)) << ")";
  }

  {  // 4. all periods occur
    Verdict& v = verdicts[4];
    std::uint64_t smallest = ~0ULL;
    for (int n = 2; n <= kMaxPeriod; ++n) {
      smallest = std::min(smallest, hs.at(n).per_count(n));
      v.require(hs.at(n).per_count(n) > 0, "Per_" + std::to_string(n) + " empty");
    }
    v.details << "Per_n nonempty for n=2..10 (smallest " << smallest << " points)";
  }

  {  // 5. equidistribution trend
    Verdict& v = verdicts[5];
    const double side = cell_side_for(filtration_radius(horseshoe()).value, 32);
    const auto nu10 = empirical_measure(hs.at(10), PointSet::fix);
    std::map<int, double> d, gap;
    for (int n : {4, 6, 8}) {
      const auto nu = empirical_measure(hs.at(n), PointSet::fix);
      d[n] = discrepancy(nu, nu10, side);
      gap[n] = max_moment_gap(nu, nu10);
    }
    v.require(d[4] > d[6] && d[6] > d[8], "discrepancy not strictly decreasing");
    v.require(gap[4] > gap[6] && gap[6] > gap[8], "moment gaps not strictly decreasing");
    v.require(gap[8] <= 0.5 * gap[4], "moment gap did not halve from n=4 to n=8");
    v.details << "discrepancy vs nu_10 at n=4,6,8: " << fmt(d[4]) << ", " << fmt(d[6]) << ", " << fmt(d[8])
              << "; moment gaps (order <= 3): " << fmt(gap[4]) << ", " << fmt(gap[6]) << ", " << fmt(gap[8]);
  }

  {  // 6. Lyapunov estimators
    Verdict& v = verdicts[6];
    double worst_gap = 0.0;
    int spectra_checked = 0;
    std::vector<const PeriodSpectrum*> all;
    for (const auto& [n, s] : hs) all.push_back(&s);
    for (const auto& [n, s] : mx) all.push_back(&s);
    all.push_back(&weak3);
    all.push_back(&weak4);
    for (const auto* s : all) {
      if (!s->complete) continue;
      ++spectra_checked;
      for (PointSet w : {PointSet::fix, PointSet::per, PointSet::sper}) {
        const auto e = lambda_estimate(*s, w);
        if (e.empty()) continue;
        worst_gap = std::max(worst_gap, e.agreement_gap);
      }
    }
    v.require(worst_gap < 1e-6, "chi/psi agreement " + fmt(worst_gap));
    double worst_set = 0.0;
    for (int n = 6; n <= kMaxPeriod; ++n) {
      const double diff =
          std::abs(lambda_estimate(hs.at(n), PointSet::fix).lambda_n - lambda_estimate(hs.at(n), PointSet::sper).lambda_n);
      worst_set = std::max(worst_set, diff);
    }
    v.require(worst_set < 1e-3, "fix vs sper " + fmt(worst_set));
    const double l10_fix = lambda_estimate(hs.at(10), PointSet::fix).lambda_n;
    const double l10_sper = lambda_estimate(hs.at(10), PointSet::sper).lambda_n;
    v.require(std::min(l10_fix, l10_sper) >= kLog2 - 0.01, "Lambda_10 below log 2 - 0.01");
    v.details << "chi/psi gap " << fmt(worst_gap) << " over " << spectra_checked << " complete spectra; max |fix - sper| "
              << fmt(worst_set) << " for n=6..10; Lambda_10 " << fmt(l10_sper);
  }

  {  // 7. one-variable limit
    Verdict& v = verdicts[7];
    v.require(weak3.complete && weak4.complete, "incomplete spectrum");
    const double l3 = lambda_estimate(weak3, PointSet::sper).lambda_n;
    const double l4 = lambda_estimate(weak4, PointSet::sper).lambda_n;
    v.require(std::abs(l3 - kLog2) <= 0.02, "Lambda_8 outside log 2 +- 0.02");
    v.require(std::abs(l4 - kLog2) < std::abs(l3 - kLog2), "a=1e-4 not closer to log 2");
    char buf[160];
    std::snprintf(buf, sizeof buf, "Lambda_8 (sper) %.17g at a=1e-3, %.17g at a=1e-4, log 2 = %.17g", l3, l4, kLog2);
    v.details << buf;
  }

  {  // 8. multiplier product
    Verdict& v = verdicts[8];
    double worst_product = 0.0, worst_match = 0.0;
    std::size_t orbits = 0;
    std::vector<const PeriodSpectrum*> all;
    for (const auto& [t, r] : runs) {
      for (const auto& [n, s] : r.horseshoe) all.push_back(&s);
    }
    for (const auto& [n, s] : mx) all.push_back(&s);
    all.push_back(&weak3);
    all.push_back(&weak4);
    for (const auto* s : all) {
      for (const auto& o : s->orbits) {
        if (!o.certified) continue;
        ++orbits;
        const ComplexWide ak = pow(to_wide(s->map.jacobian_determinant()), o.period);
        const auto [ls, lu] = wide_multipliers(s->map, o);
        // Identity for the independently computed multipliers, then for the library's.
        worst_product = std::max(worst_product, rel(ls * lu, ak));
        worst_product = std::max(worst_product, rel(to_wide(o.lambda_s) * to_wide(o.lambda_u), ak));
        worst_match = std::max({worst_match, rel(to_wide(o.lambda_u), lu), rel(to_wide(o.lambda_s), ls)});
      }
    }
    v.require(worst_product < 1e-8, "product identity " + fmt(worst_product));
    v.require(worst_match < 1e-8, "library multipliers disagree with the monodromy " + fmt(worst_match));
    v.details << "max |lambda_s lambda_u - a^k|/|a|^k " << fmt(worst_product) << " over " << orbits
              << " certified orbits; library vs extended-precision monodromy " << fmt(worst_match);
  }

  {  // 9. Green functions vanish on Fix_8
    Verdict& v = verdicts[9];
    double worst = 0.0;
    for (const PeriodSpectrum* s : {&hs.at(8), &mx.at(8)}) {
      for (const auto& o : s->orbits) worst = std::max(worst, orbit_green_values(s->map, o, 100).max());
    }
    v.require(worst < 1e-6, "max Green value " + fmt(worst));
    v.details << "max G+/G- over Fix_8 at both parameters " << fmt(worst);
  }

  {  // 10. Katok growth
    Verdict& v = verdicts[10];
    const double growth = std::log(static_cast<double>(hs.at(10).sper_count())) / 10.0;
    v.require(std::abs(growth - kLog2) < 0.05, "growth " + fmt(growth));
    v.details << "#SPer_10 = " << hs.at(10).sper_count() << ", (1/10) log #SPer_10 - log 2 = " << fmt(growth - kLog2);
  }

  {  // 11. scan dichotomy
    Verdict& v = verdicts[11];
    const ScanField& h = main_run.scan_horseshoe;
    const ScanField& m = main_run.scan_mixed;
    const double floor = laplacian_defect(synthetic_field(disk(horseshoe(), -6.0), [](Complex c) { return (c * c).real(); }))
                             .max_defect();
    const double log_field =
        laplacian_defect(synthetic_field(disk(horseshoe(), -6.0), [](Complex c) { return std::log(std::abs(c)); }))
            .max_defect();
    v.require(all_complete(h) && max_sinks_or_min(h, false) == 0, "horseshoe scan has sinks or incomplete cells");
    v.require(h.max_defect() < 10.0 * floor, "horseshoe defect " + fmt(h.max_defect()) + " >= 10x floor " + fmt(floor));
    v.require(all_complete(m) && max_sinks_or_min(m, true) >= 1, "a cell of the c=0 scan has no sink");
    v.require(m.max_defect() > 10.0 * h.max_defect(), "c=0 defect not above 10x the horseshoe defect");
    v.details << "horseshoe: sinks 0, max defect " << fmt(h.max_defect()) << ", Re(c^2) floor " << fmt(floor)
              << ", log|c| field defect " << fmt(log_field) << "; c=0: min sinks per cell " << max_sinks_or_min(m, true)
              << ", max defect " << fmt(m.max_defect());
  }

  {  // 12. determinism
    Verdict& v = verdicts[12];
    const fs::path ref = fs::path(artifacts) / "threads1";
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(ref)) {
      ++files;
      for (int t : thread_counts) {
        const fs::path other = fs::path(artifacts) / ("threads" + std::to_string(t)) / entry.path().filename();
        v.require(fs::exists(other) && slurp(other) == slurp(entry.path()),
                  entry.path().filename().string() + " differs at " + std::to_string(t) + " threads");
      }
    }
    v.require(files == kMaxPeriod + 2, "unexpected artifact count");
    v.details << files << " files byte-identical at threads";
    for (int t : thread_counts) v.details << " " << t;
  }

  int failed = 0;
  for (int i = 1; i <= 12; ++i) {
    const Verdict& v = verdicts[i];
    if (!v.pass) ++failed;
    std::cout << "criterion " << i << ": " << (v.pass ? "PASS" : "FAIL") << " " << v.details.str() << v.failures << "\n";
  }
  std::cout << (12 - failed) << "/12 criteria passed in " << fmt(elapsed()) << " s\n";
  return failed == 0 ? 0 : 1;
}
