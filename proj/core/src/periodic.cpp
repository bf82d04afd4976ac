#include "henon/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/LU>

#include "henon/parallel.hpp"
#include "henon/polynomial_roots.hpp"

namespace henon {

namespace {

constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2;
constexpr double kInfinity = std::numeric_limits<double>::infinity();

double sup_norm(const std::vector<Complex>& v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

double two_norm(const std::vector<Complex>& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

Eigen::MatrixXcd cyclic_jacobian(const HenonMap& map, const std::vector<Complex>& xs) {
  const int n = static_cast<int>(xs.size());
  const Complex a = map.jacobian_determinant();
  Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    j(k, k) += map.poly_derivative(xs[k]);
    j(k, (k + n - 1) % n) -= a;
    j(k, (k + 1) % n) -= 1.0;
  }
  return j;
}

double inf_norm(const Eigen::MatrixXcd& m) {
  double best = 0.0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) best = std::max(best, m.row(r).cwiseAbs().sum());
  return best;
}

// |p| evaluated with absolute coefficients: the scale of the rounding error of Horner.
double abs_poly(const HenonMap& map, double r) {
  double acc = 1.0;
  const auto coeffs = map.coeffs();
  for (std::size_t j = coeffs.size(); j-- > 0;) acc = acc * r + std::abs(coeffs[j]);
  return acc;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) { return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53; }

CyclicOrbitVector random_seed(int n, double radius, std::uint64_t rng_seed, std::uint64_t index) {
  std::uint64_t state = rng_seed ^ (0xD1B54A32D192ED03ull * (index + 1));
  splitmix64(state);
  CyclicOrbitVector v;
  v.xs.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double r = radius * std::sqrt(uniform01(state));
    const double theta = 2.0 * std::numbers::pi * uniform01(state);
    v.xs.emplace_back(r * std::cos(theta), r * std::sin(theta));
  }
  return v;
}

// Root number `branch` of p(x) = w. Quadratics use the principal square root and its
// negative; higher degrees order the roots by angle about their centroid.
Complex inverse_branch(const HenonMap& map, Complex w, int branch) {
  const auto coeffs = map.coeffs();
  if (coeffs.size() == 2) {
    const Complex half_b = 0.5 * coeffs[1];
    const Complex root = std::sqrt(half_b * half_b - coeffs[0] + w);
    return branch == 0 ? -half_b + root : -half_b - root;
  }
  std::vector<Complex> shifted(coeffs.begin(), coeffs.end());
  shifted[0] -= w;
  auto roots = monic_roots(shifted);
  const Complex centre = -coeffs.back() / static_cast<double>(coeffs.size());
  std::sort(roots.begin(), roots.end(),
            [&](const Complex& l, const Complex& r) { return std::arg(l - centre) < std::arg(r - centre); });
  return roots[static_cast<std::size_t>(branch)];
}

// Gauss-Seidel sweeps of x_k <- p^{-1}_{s_k}(x_{k+1} + a x_{k-1}). In hyperbolic
// regimes this contracts onto the orbit with itinerary s.
CyclicOrbitVector symbolic_seed(const HenonMap& map, int n, std::uint64_t itinerary) {
  const int d = map.degree();
  std::vector<int> symbols(n);
  for (int k = 0; k < n; ++k) {
    symbols[k] = static_cast<int>(itinerary % static_cast<std::uint64_t>(d));
    itinerary /= static_cast<std::uint64_t>(d);
  }
  const Complex a = map.jacobian_determinant();
  CyclicOrbitVector v;
  v.xs.resize(n);
  for (int k = 0; k < n; ++k) v.xs[k] = inverse_branch(map, Complex(0.0), symbols[k]);
  constexpr int kSweeps = 16;
  for (int sweep = 0; sweep < kSweeps; ++sweep) {
    for (int k = n - 1; k >= 0; --k) {
      const Complex w = v.xs[(k + 1) % n] + a * v.xs[(k + n - 1) % n];
      v.xs[k] = inverse_branch(map, w, symbols[k]);
    }
    if (!std::all_of(v.xs.begin(), v.xs.end(), [](const Complex& z) { return is_finite(z); })) break;
  }
  return v;
}

struct Candidate {
  enum class Kind { none, orbit, unresolved } kind = Kind::none;
  CyclicOrbitVector v;
  Certificate cert;
};

Candidate process_seed(const HenonMap& map, int n, CyclicOrbitVector seed, const EnumerationOptions& opt) {
  Candidate out;
  auto refined = newton_refine(map, std::move(seed), opt.tol.newton, opt.max_newton_steps);
  if (refined.status == RefineStatus::singular) {
    out.kind = Candidate::Kind::unresolved;
    out.v = minimal_rotation(refined.orbit);
    return out;
  }
  if (!refined.ok()) return out;

  CyclicOrbitVector v = std::move(refined.orbit);
  const int k = minimal_period(v, opt.tol.dedup);
  if (k < n) {
    v.xs.resize(k);
    auto again = newton_refine(map, std::move(v), opt.tol.newton, opt.max_newton_steps);
    if (!again.ok()) return out;
    v = std::move(again.orbit);
  }
  out.cert = certify(map, v, opt.tol.certification);
  if (!out.cert.certified) return out;
  out.kind = Candidate::Kind::orbit;
  out.v = minimal_rotation(v);
  return out;
}

double anchor(const CyclicOrbitVector& v) {
  double m = kInfinity;
  for (const auto& z : v.xs) m = std::min(m, z.real());
  return m;
}

// Deterministic dedup in seed order. The minimum real part over an orbit is
// 1-Lipschitz in the rotation sup-norm, so it indexes candidates for matching.
class OrbitMerger {
 public:
  explicit OrbitMerger(double tol) : tol_(tol) {}

  void add(Candidate&& c) {
    if (c.kind == Candidate::Kind::orbit) {
      add_orbit(std::move(c));
    } else if (c.kind == Candidate::Kind::unresolved) {
      add_unresolved(std::move(c.v));
    }
  }

  std::uint64_t point_count() const { return points_; }
  std::vector<Candidate>& orbits() { return orbits_; }

  std::vector<CyclicOrbitVector> unresolved() const {
    std::vector<CyclicOrbitVector> out;
    for (const auto& u : unresolved_) {
      const bool shadowed = std::any_of(orbits_.begin(), orbits_.end(), [&](const Candidate& o) {
        return orbit_distance(o.v, u) <= kClusterTol;
      });
      if (!shadowed) out.push_back(u);
    }
    return out;
  }

 private:
  static constexpr double kClusterTol = 1e-5;

  void add_orbit(Candidate&& c) {
    const double key = anchor(c.v);
    const double window = std::max(tol_, c.cert.radius + max_radius_);
    for (auto it = index_.lower_bound(key - window); it != index_.end() && it->first <= key + window; ++it) {
      const Candidate& other = orbits_[it->second];
      const double dist = orbit_distance(other.v, c.v);
      if (dist <= tol_) {
        if (dist > std::min(other.cert.uniqueness_radius, c.cert.uniqueness_radius)) {
          throw CertificateConflict("orbits within the dedup tolerance are not covered by one uniqueness ball");
        }
        return;
      }
      if (dist <= other.cert.radius + c.cert.radius) {
        throw CertificateConflict("distinct certified orbits have overlapping certificate balls");
      }
    }
    max_radius_ = std::max(max_radius_, c.cert.radius);
    points_ += static_cast<std::uint64_t>(c.v.period());
    index_.emplace(key, orbits_.size());
    orbits_.push_back(std::move(c));
  }

  void add_unresolved(CyclicOrbitVector&& v) {
    for (const auto& u : unresolved_) {
      if (orbit_distance(u, v) <= kClusterTol) return;
    }
    unresolved_.push_back(std::move(v));
  }

  double tol_;
  double max_radius_ = 0.0;
  std::uint64_t points_ = 0;
  std::vector<Candidate> orbits_;
  std::multimap<double, std::size_t> index_;
  std::vector<CyclicOrbitVector> unresolved_;
};

}  // namespace

ComplexPoint CyclicOrbitVector::point(int k) const {
  const int n = period();
  const int i = ((k % n) + n) % n;
  return {xs[i], xs[(i + n - 1) % n]};
}

std::string_view to_string(OrbitKind kind) {
  switch (kind) {
    case OrbitKind::saddle: return "saddle";
    case OrbitKind::sink: return "sink";
    case OrbitKind::source: return "source";
    case OrbitKind::marginal: return "marginal";
  }
  return "marginal";
}

OrbitKind parse_orbit_kind(std::string_view text) {
  if (text == "saddle") return OrbitKind::saddle;
  if (text == "sink") return OrbitKind::sink;
  if (text == "source") return OrbitKind::source;
  if (text == "marginal") return OrbitKind::marginal;
  throw std::invalid_argument("unknown orbit kind: " + std::string(text));
}

std::string_view to_string(RefineStatus status) {
  switch (status) {
    case RefineStatus::converged: return "converged";
    case RefineStatus::diverged: return "diverged";
    case RefineStatus::stalled: return "stalled";
    case RefineStatus::singular: return "singular";
  }
  return "stalled";
}

std::string_view to_string(ShadowFailure failure) {
  switch (failure) {
    case ShadowFailure::none: return "none";
    case ShadowFailure::not_returning: return "not_returning";
    case ShadowFailure::diverged: return "diverged";
    case ShadowFailure::stalled: return "stalled";
    case ShadowFailure::singular: return "singular";
    case ShadowFailure::not_certified: return "not_certified";
    case ShadowFailure::drifted: return "drifted";
  }
  return "none";
}

std::vector<Complex> cyclic_residual(const HenonMap& map, const CyclicOrbitVector& v) {
  const int n = v.period();
  if (n < 1) throw std::invalid_argument("cyclic orbit vector needs n >= 1");
  const Complex a = map.jacobian_determinant();
  std::vector<Complex> out(n);
  for (int k = 0; k < n; ++k) {
    out[k] = map.poly(v.xs[k]) - a * v.xs[(k + n - 1) % n] - v.xs[(k + 1) % n];
  }
  return out;
}

double residual_norm(const HenonMap& map, const CyclicOrbitVector& v) { return sup_norm(cyclic_residual(map, v)); }

namespace {

// Plain Newton contracts linearly near a multiple root. Running it on until the
// steps stop shrinking pulls every seed into a tight cluster around the root.
template <class Inside>
void settle_multiple_root(const HenonMap& map, std::vector<Complex>& xs, std::vector<Complex>& residual,
                          const Inside& inside) {
  const int n = static_cast<int>(xs.size());
  double prev_step = kInfinity;
  std::vector<Complex> trial(n);
  for (int iter = 0; iter < 80; ++iter) {
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(cyclic_jacobian(map, xs));
    if (!(lu.rcond() > 1e-14)) return;
    Eigen::VectorXcd rhs(n);
    for (int k = 0; k < n; ++k) rhs(k) = -residual[k];
    const Eigen::VectorXcd delta = lu.solve(rhs);
    const double step_norm = delta.cwiseAbs().maxCoeff();
    if (!(step_norm < prev_step)) return;
    for (int k = 0; k < n; ++k) trial[k] = xs[k] + delta(k);
    if (!inside(trial)) return;
    xs = trial;
    residual = cyclic_residual(map, CyclicOrbitVector{xs});
    if (step_norm < 1e-12) return;
    prev_step = step_norm;
  }
}

}  // namespace

RefineResult newton_refine(const HenonMap& map, CyclicOrbitVector seed, double tol, int max_steps) {
  if (!(tol > 0.0)) throw std::invalid_argument("newton tolerance must be positive");
  const int n = seed.period();
  if (n < 1) throw std::invalid_argument("cyclic orbit vector needs n >= 1");

  RefineResult out;
  out.orbit = std::move(seed);
  auto& xs = out.orbit.xs;
  const double safety = 2.0 * filtration_radius(map).value;
  auto inside = [&](const std::vector<Complex>& v) {
    return std::all_of(v.begin(), v.end(), [&](const Complex& z) { return is_finite(z) && std::abs(z) <= safety; });
  };
  if (!inside(xs)) {
    out.status = RefineStatus::diverged;
    out.residual = kInfinity;
    return out;
  }

  auto residual = cyclic_residual(map, out.orbit);
  out.residual = sup_norm(residual);
  double prev_step = kInfinity;
  int linear_steps = 0;
  std::vector<Complex> trial(n);

  while (out.residual >= tol) {
    if (out.steps == max_steps) {
      out.status = RefineStatus::stalled;
      return out;
    }
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(cyclic_jacobian(map, xs));
    if (!(lu.rcond() > 1e-14)) {
      out.status = out.residual < 1e-6 ? RefineStatus::singular : RefineStatus::stalled;
      return out;
    }
    Eigen::VectorXcd rhs(n);
    for (int k = 0; k < n; ++k) rhs(k) = -residual[k];
    const Eigen::VectorXcd delta = lu.solve(rhs);
    const double step_norm = delta.cwiseAbs().maxCoeff();

    const double merit = two_norm(residual);
    bool accepted = false;
    for (double lambda = 1.0; lambda >= 0x1.0p-10; lambda *= 0.5) {
      for (int k = 0; k < n; ++k) trial[k] = xs[k] + lambda * delta(k);
      if (!inside(trial)) continue;
      auto trial_residual = cyclic_residual(map, CyclicOrbitVector{trial});
      if (two_norm(trial_residual) < merit) {
        xs = trial;
        residual = std::move(trial_residual);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!inside(trial)) {
        out.status = RefineStatus::diverged;
      } else {
        out.status = out.residual < 1e-6 ? RefineStatus::singular : RefineStatus::stalled;
      }
      return out;
    }
    ++out.steps;
    out.residual = sup_norm(residual);

    // Newton at a simple zero contracts quadratically; persistent linear contraction
    // deep inside the basin means a multiple root.
    if (step_norm < 1e-4 && step_norm > 0.3 * prev_step) {
      if (++linear_steps >= 3) {
        settle_multiple_root(map, xs, residual, inside);
        out.residual = sup_norm(residual);
        out.status = RefineStatus::singular;
        return out;
      }
    } else {
      linear_steps = 0;
    }
    prev_step = step_norm;
  }

  // One polishing step once the tolerance is met. A seed that lands exactly on a
  // multiple root never enters the loop, so the conditioning is checked here too.
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(cyclic_jacobian(map, xs));
  if (!(lu.rcond() > 1e-14)) {
    out.status = RefineStatus::singular;
    return out;
  }
  if (out.steps > 0) {
    Eigen::VectorXcd rhs(n);
    for (int k = 0; k < n; ++k) rhs(k) = -residual[k];
    const Eigen::VectorXcd delta = lu.solve(rhs);
    for (int k = 0; k < n; ++k) trial[k] = xs[k] + delta(k);
    const double polished = residual_norm(map, CyclicOrbitVector{trial});
    if (polished <= out.residual) {
      xs = trial;
      out.residual = polished;
    }
  }
  out.status = RefineStatus::converged;
  return out;
}

Certificate certify(const HenonMap& map, const CyclicOrbitVector& v, double residual_tol) {
  Certificate cert;
  const int n = v.period();
  if (n < 1) return cert;
  const auto residual = cyclic_residual(map, v);
  const double eta_raw = sup_norm(residual);
  if (!std::isfinite(eta_raw) || eta_raw > residual_tol) return cert;

  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(cyclic_jacobian(map, v.xs));
  if (!(lu.rcond() > 1e-13)) return cert;
  // Small safety factor for the rounding in the computed inverse.
  const double beta = 1.01 * inf_norm(lu.inverse());
  if (!std::isfinite(beta)) return cert;

  const double abs_a = std::abs(map.jacobian_determinant());
  const double gamma = 4.0 * (2.0 * map.degree() + 4.0) * kUnitRoundoff;
  double rounding = 0.0;
  double scale = 0.0;
  for (int k = 0; k < n; ++k) {
    const double term = abs_poly(map, std::abs(v.xs[k])) + abs_a * std::abs(v.xs[(k + n - 1) % n]) +
                        std::abs(v.xs[(k + 1) % n]);
    rounding = std::max(rounding, gamma * term);
    scale = std::max(scale, std::abs(v.xs[k]));
  }
  const double eta = beta * (eta_raw + rounding);

  // Lipschitz constant of the Jacobian (only its diagonal varies) on the ball.
  const double ball = std::max(4.0 * eta, 1e-4 * (1.0 + scale));
  const double lipschitz = map.second_derivative_bound(scale + ball);
  const double h = beta * lipschitz * eta;
  if (!(h <= 0.5)) return cert;
  const double root = std::sqrt(1.0 - 2.0 * h);
  const double existence = 2.0 * eta / (1.0 + root);
  if (existence > ball) return cert;
  cert.certified = true;
  cert.radius = existence;
  cert.uniqueness_radius = std::min(ball, lipschitz > 0.0 ? (1.0 + root) / (beta * lipschitz) : ball);
  return cert;
}

Monodromy monodromy(const HenonMap& map, const CyclicOrbitVector& v, int start) {
  const int n = v.period();
  Monodromy m;
  m.scaled = Matrix2c::Identity();
  for (int j = 0; j < n; ++j) {
    m.scaled = (jacobian(map, v.point(start + j)) * m.scaled).eval();
    const double s = m.scaled.cwiseAbs().maxCoeff();
    m.scaled /= s;
    m.log_scale += std::log(s);
  }
  return m;
}

OrbitKind classify_multipliers(double log_abs_lambda_s, double log_abs_lambda_u, double eps_hyp) {
  const double lo = std::log1p(-eps_hyp);
  const double hi = std::log1p(eps_hyp);
  const bool s_in = log_abs_lambda_s < lo;
  const bool u_in = log_abs_lambda_u < lo;
  const bool s_out = log_abs_lambda_s > hi;
  const bool u_out = log_abs_lambda_u > hi;
  if (s_in && u_out) return OrbitKind::saddle;
  if (s_in && u_in) return OrbitKind::sink;
  if (s_out && u_out) return OrbitKind::source;
  return OrbitKind::marginal;
}

PeriodicOrbit classify(const HenonMap& map, const CyclicOrbitVector& v, double eps_hyp) {
  const int n = v.period();
  if (n < 1) throw std::invalid_argument("cannot classify an empty orbit");
  PeriodicOrbit orbit;
  orbit.period = n;
  orbit.xs = v;
  orbit.residual = residual_norm(map, v);

  const Monodromy m = monodromy(map, v);
  const Complex trace = m.scaled.trace();
  // det of each factor is exactly a.
  const Complex det = std::exp(static_cast<double>(n) * std::log(map.jacobian_determinant()) - 2.0 * m.log_scale);
  const Complex disc = std::sqrt(trace * trace - 4.0 * det);
  const Complex plus = 0.5 * (trace + disc);
  const Complex minus = 0.5 * (trace - disc);
  const Complex big = std::abs(plus) >= std::abs(minus) ? plus : minus;

  // The product of the multipliers is a^n; taking lambda_s from it in log form
  // keeps long contracting orbits from underflowing.
  const Complex a = map.jacobian_determinant();
  const double scale = std::exp(m.log_scale);
  orbit.lambda_u = big * scale;
  orbit.log_abs_lambda_u = std::log(std::abs(big)) + m.log_scale;
  orbit.log_abs_lambda_s = static_cast<double>(n) * std::log(std::abs(a)) - orbit.log_abs_lambda_u;
  orbit.lambda_s = std::polar(std::exp(orbit.log_abs_lambda_s), static_cast<double>(n) * std::arg(a) - std::arg(big));
  orbit.chi = orbit.log_abs_lambda_u / n;
  orbit.kind = classify_multipliers(orbit.log_abs_lambda_s, orbit.log_abs_lambda_u, eps_hyp);
  return orbit;
}

double orbit_distance(const CyclicOrbitVector& a, const CyclicOrbitVector& b) {
  const int n = a.period();
  if (n != b.period() || n == 0) return kInfinity;
  double best = kInfinity;
  for (int shift = 0; shift < n; ++shift) {
    double worst = 0.0;
    for (int k = 0; k < n && worst < best; ++k) worst = std::max(worst, std::abs(a.xs[k] - b.xs[(k + shift) % n]));
    best = std::min(best, worst);
  }
  return best;
}

CyclicOrbitVector minimal_rotation(const CyclicOrbitVector& v) {
  const int n = v.period();
  if (n == 0) return v;
  auto less = [](const Complex& l, const Complex& r) {
    return l.real() < r.real() || (l.real() == r.real() && l.imag() < r.imag());
  };
  int start = 0;
  for (int k = 1; k < n; ++k) {
    if (less(v.xs[k], v.xs[start])) start = k;
  }
  CyclicOrbitVector out;
  out.xs.reserve(n);
  for (int k = 0; k < n; ++k) out.xs.push_back(v.xs[(start + k) % n]);
  return out;
}

int minimal_period(const CyclicOrbitVector& v, double tol) {
  const int n = v.period();
  for (int k : divisors(n)) {
    if (k == n) break;
    bool repeats = true;
    for (int j = 0; j < n && repeats; ++j) repeats = std::abs(v.xs[j] - v.xs[(j + k) % n]) <= tol;
    if (repeats) return k;
  }
  return n;
}

bool lexicographic_less(const CyclicOrbitVector& a, const CyclicOrbitVector& b) {
  return std::lexicographical_compare(a.xs.begin(), a.xs.end(), b.xs.begin(), b.xs.end(),
                                      [](const Complex& l, const Complex& r) {
                                        return l.real() < r.real() || (l.real() == r.real() && l.imag() < r.imag());
                                      });
}

std::vector<int> divisors(int n) {
  std::vector<int> out;
  for (int k = 1; k <= n; ++k) {
    if (n % k == 0) out.push_back(k);
  }
  return out;
}

std::uint64_t point_capacity(int degree, int n) {
  std::uint64_t out = 1;
  for (int k = 0; k < n; ++k) {
    if (out > (std::uint64_t{1} << 62) / static_cast<std::uint64_t>(degree)) {
      throw std::overflow_error("d^n does not fit the point counter");
    }
    out *= static_cast<std::uint64_t>(degree);
  }
  return out;
}

std::uint64_t PeriodSpectrum::fix_count() const {
  std::uint64_t total = 0;
  for (const auto& o : orbits) total += static_cast<std::uint64_t>(o.period);
  return total;
}

std::uint64_t PeriodSpectrum::per_count(int k) const {
  std::uint64_t total = 0;
  for (const auto& o : orbits) {
    if (o.period == k) total += static_cast<std::uint64_t>(o.period);
  }
  return total;
}

std::map<int, std::uint64_t> PeriodSpectrum::per_counts() const {
  std::map<int, std::uint64_t> out;
  for (int k : divisors(n)) out[k] = per_count(k);
  return out;
}

std::uint64_t PeriodSpectrum::sper_count() const {
  std::uint64_t total = 0;
  for (const auto& o : orbits) {
    if (o.period == n && o.kind == OrbitKind::saddle) total += static_cast<std::uint64_t>(o.period);
  }
  return total;
}

std::uint64_t PeriodSpectrum::saddle_point_count() const {
  std::uint64_t total = 0;
  for (const auto& o : orbits) {
    if (o.kind == OrbitKind::saddle) total += static_cast<std::uint64_t>(o.period);
  }
  return total;
}

PeriodSpectrum enumerate_fix(const HenonMap& map, int n, const EnumerationOptions& options) {
  if (n < 1) throw std::invalid_argument("period must be >= 1");
  if (!options.tol.valid()) throw std::invalid_argument("tolerances must be positive");
  if (options.batch_size < 1) throw std::invalid_argument("batch size must be positive");
  const std::uint64_t capacity = point_capacity(map.degree(), n);
  const auto budget = options.budget > 0 ? static_cast<std::uint64_t>(options.budget) : 1000 * capacity;
  if (budget < capacity) throw std::invalid_argument("seed budget must be at least d^n");

  const double radius = filtration_radius(map).value;
  const std::uint64_t symbolic = options.symbolic_seeds ? capacity : 0;
  OrbitMerger merger(options.tol.dedup);

  PeriodSpectrum spectrum{map, n, {}, {}, false, 0};
  // Batch boundaries depend only on the options: the itinerary seeds form the first
  // batch, random seeds follow in fixed-size batches.
  const auto batch = static_cast<std::uint64_t>(options.batch_size);
  for (std::uint64_t start = 0; start < budget && merger.point_count() < capacity;) {
    const std::uint64_t count = std::min(start < symbolic ? symbolic - start : batch, budget - start);
    std::vector<Candidate> candidates(count);
    parallel_for(count, options.threads, [&](std::size_t i) {
      const std::uint64_t index = start + i;
      auto seed = index < symbolic ? symbolic_seed(map, n, index) : random_seed(n, radius, options.rng_seed, index);
      candidates[i] = process_seed(map, n, std::move(seed), options);
    });
    for (auto& c : candidates) merger.add(std::move(c));
    start += count;
    spectrum.seeds_used = static_cast<std::int64_t>(start);
  }

  if (merger.point_count() > capacity) {
    throw std::logic_error("more distinct fixed points than d^n; dedup tolerance too tight");
  }
  spectrum.complete = merger.point_count() == capacity;
  spectrum.unresolved = merger.unresolved();
  for (auto& c : merger.orbits()) {
    PeriodicOrbit orbit = classify(map, c.v, options.tol.eps_hyp);
    orbit.certified = true;
    orbit.radius = c.cert.radius;
    spectrum.orbits.push_back(std::move(orbit));
  }
  std::sort(spectrum.orbits.begin(), spectrum.orbits.end(),
            [](const PeriodicOrbit& l, const PeriodicOrbit& r) { return lexicographic_less(l.xs, r.xs); });
  return spectrum;
}

PeriodSpectrum decompose_periods(const std::map<int, PeriodSpectrum>& spectra, int n, double dedup_tol) {
  const auto top = spectra.find(n);
  if (top == spectra.end()) throw std::invalid_argument("no spectrum for the requested period");

  // Distinct orbits of the proper-divisor spectra.
  std::vector<const PeriodicOrbit*> lower;
  for (int k : divisors(n)) {
    if (k == n) continue;
    const auto it = spectra.find(k);
    if (it == spectra.end()) throw std::invalid_argument("missing spectrum for divisor " + std::to_string(k));
    if (!it->second.complete) throw std::invalid_argument("divisor spectrum " + std::to_string(k) + " is incomplete");
    if (!(it->second.map == top->second.map)) throw std::invalid_argument("divisor spectra come from different maps");
    for (const auto& o : it->second.orbits) {
      const bool seen = std::any_of(lower.begin(), lower.end(), [&](const PeriodicOrbit* q) {
        return orbit_distance(q->xs, o.xs) <= dedup_tol;
      });
      if (!seen) lower.push_back(&o);
    }
  }

  PeriodSpectrum out = top->second;
  for (auto& orbit : out.orbits) {
    const PeriodicOrbit* match = nullptr;
    for (int j = 0; j < orbit.period; ++j) {
      const ComplexPoint pt = orbit.xs.point(j);
      for (const PeriodicOrbit* q : lower) {
        for (int i = 0; i < q->period; ++i) {
          if (distance(pt, q->xs.point(i)) > dedup_tol) continue;
          if (match != nullptr && match != q) {
            throw AmbiguousPeriod("a point of Fix_" + std::to_string(n) + " matches two divisor orbits");
          }
          match = q;
        }
      }
    }
    if (match != nullptr) {
      if (match->period > orbit.period || orbit.period % match->period != 0) {
        throw AmbiguousPeriod("orbit matches a divisor orbit of incompatible period");
      }
      orbit.xs.xs.resize(match->period);
      orbit.period = match->period;
    } else if (orbit.period != n) {
      throw AmbiguousPeriod("orbit of period " + std::to_string(orbit.period) + " absent from the divisor spectra");
    }
  }
  return out;
}

std::map<int, PeriodSpectrum> enumerate_with_divisors(const HenonMap& map, int n, const EnumerationOptions& options) {
  std::map<int, PeriodSpectrum> spectra;
  for (int k : divisors(n)) spectra.emplace(k, enumerate_fix(map, k, options));
  std::map<int, PeriodSpectrum> out;
  for (int k : divisors(n)) {
    const bool divisors_complete = std::all_of(spectra.begin(), spectra.end(), [&](const auto& kv) {
      return kv.first >= k || k % kv.first != 0 || kv.second.complete;
    });
    out.emplace(k, divisors_complete ? decompose_periods(spectra, k, options.tol.dedup) : spectra.at(k));
  }
  return out;
}

ShadowResult shadow_pseudo_orbit(const HenonMap& map, const ComplexPoint& x, int n, const ShadowOptions& options) {
  if (n < 1) throw std::invalid_argument("period must be >= 1");
  ShadowResult result;
  CyclicOrbitVector seed;
  ComplexPoint cur = x;
  try {
    for (int k = 0; k < n; ++k) {
      seed.xs.push_back(cur.x);
      cur = evaluate(map, cur);
    }
  } catch (const OrbitEscaped&) {
    result.failure = ShadowFailure::not_returning;
    return result;
  }
  if (!(distance(cur, x) <= options.max_return_distance)) {
    result.failure = ShadowFailure::not_returning;
    return result;
  }

  auto refined = newton_refine(map, std::move(seed), options.tol.newton, options.max_newton_steps);
  switch (refined.status) {
    case RefineStatus::converged: break;
    case RefineStatus::diverged: result.failure = ShadowFailure::diverged; return result;
    case RefineStatus::stalled: result.failure = ShadowFailure::stalled; return result;
    case RefineStatus::singular: result.failure = ShadowFailure::singular; return result;
  }
  CyclicOrbitVector v = std::move(refined.orbit);
  const int k = minimal_period(v, options.tol.dedup);
  if (k < n) v.xs.resize(k);

  const Certificate cert = certify(map, v, options.tol.certification);
  if (!cert.certified) {
    result.failure = ShadowFailure::not_certified;
    return result;
  }
  if (distance(v.point(0), x) > options.max_shift) {
    result.failure = ShadowFailure::drifted;
    return result;
  }
  PeriodicOrbit orbit = classify(map, v, options.tol.eps_hyp);
  orbit.certified = true;
  orbit.radius = cert.radius;
  result.orbit = std::move(orbit);
  return result;
}

}  // namespace henon
