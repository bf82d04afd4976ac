#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "henon/henon_map.hpp"

namespace henon {

/// First coordinates (x_0, ..., x_{n-1}) of a candidate period-n orbit. The phase
/// point at index k is (x_k, x_{k-1 mod n}).
struct CyclicOrbitVector {
  std::vector<Complex> xs;

  int period() const { return static_cast<int>(xs.size()); }
  ComplexPoint point(int k) const;
};

enum class OrbitKind { saddle, sink, source, marginal };

std::string_view to_string(OrbitKind kind);
OrbitKind parse_orbit_kind(std::string_view text);

struct SolverTolerances {
  double newton = 1e-12;         // residual sup-norm accepted by Newton
  double dedup = 1e-8;           // rotation-minimised sup-norm identifying two orbits
  double certification = 1e-10;  // largest residual a certificate may start from
  double eps_hyp = 1e-6;         // half-width of the |lambda| = 1 band

  bool valid() const { return newton > 0 && dedup > 0 && certification > 0 && eps_hyp > 0; }
};

/// Component k is p(x_k) - a x_{k-1} - x_{k+1}, indices mod n.
std::vector<Complex> cyclic_residual(const HenonMap& map, const CyclicOrbitVector& v);
double residual_norm(const HenonMap& map, const CyclicOrbitVector& v);

enum class RefineStatus { converged, diverged, stalled, singular };
std::string_view to_string(RefineStatus status);

struct RefineResult {
  RefineStatus status = RefineStatus::stalled;
  CyclicOrbitVector orbit;
  int steps = 0;
  double residual = 0.0;

  bool ok() const { return status == RefineStatus::converged; }
};

/// Damped Newton on the cyclic system. Iterates must stay inside the filtration
/// bidisk scaled by two.
RefineResult newton_refine(const HenonMap& map, CyclicOrbitVector seed, double tol = 1e-12, int max_steps = 60);

struct Certificate {
  bool certified = false;
  double radius = 0.0;             // a true zero lies within this sup-norm distance
  double uniqueness_radius = 0.0;  // and it is the only zero within this one
};

/// Newton-Kantorovich test around v. The residual is inflated by a bound on the
/// rounding error of its own evaluation, so an exact zero still gets radius > 0.
Certificate certify(const HenonMap& map, const CyclicOrbitVector& v, double residual_tol = 1e-10);

/// Scaled monodromy Df(p_{start+n-1}) ... Df(p_start) = exp(log_scale) * scaled.
struct Monodromy {
  Matrix2c scaled;
  double log_scale = 0.0;
};

Monodromy monodromy(const HenonMap& map, const CyclicOrbitVector& v, int start = 0);

struct PeriodicOrbit {
  int period = 0;
  CyclicOrbitVector xs;
  Complex lambda_s;
  Complex lambda_u;
  double log_abs_lambda_u = 0.0;  // kept separately so long orbits never overflow
  double log_abs_lambda_s = 0.0;
  double chi = 0.0;               // log|lambda_u| / period
  OrbitKind kind = OrbitKind::marginal;
  double residual = 0.0;
  bool certified = false;
  double radius = 0.0;
};

/// Multipliers, exponent and kind of the orbit through v. The determinant of the
/// monodromy is a^n exactly, so the small eigenvalue is recovered as det / large.
PeriodicOrbit classify(const HenonMap& map, const CyclicOrbitVector& v, double eps_hyp = 1e-6);

OrbitKind classify_multipliers(double log_abs_lambda_s, double log_abs_lambda_u, double eps_hyp);

/// Smallest sup-norm distance between a and any cyclic rotation of b. Infinite when
/// the periods differ.
double orbit_distance(const CyclicOrbitVector& a, const CyclicOrbitVector& b);

/// Rotation starting at the lexicographically smallest (re, im) entry.
CyclicOrbitVector minimal_rotation(const CyclicOrbitVector& v);

/// Smallest k | n such that rotating by k moves no entry more than tol.
int minimal_period(const CyclicOrbitVector& v, double tol);

bool lexicographic_less(const CyclicOrbitVector& a, const CyclicOrbitVector& b);

std::vector<int> divisors(int n);

/// d^n, throwing when it does not fit in 62 bits.
std::uint64_t point_capacity(int degree, int n);

inline constexpr std::uint64_t kDefaultSeed = 20240611;

struct EnumerationOptions {
  std::int64_t budget = 0;  // seed orbits; 0 selects 1000 * d^n
  std::uint64_t rng_seed = kDefaultSeed;
  SolverTolerances tol;
  int max_newton_steps = 60;
  int threads = 1;
  bool symbolic_seeds = true;  // one inverse-branch seed per itinerary before random seeds
  int batch_size = 1024;       // fixed, so early exit is independent of the thread count
};

/// Catalogue of Fix_n: every orbit of exact period k | n found, certified and classified.
struct PeriodSpectrum {
  HenonMap map;
  int n = 0;
  std::vector<PeriodicOrbit> orbits;   // lexicographic order of xs (already minimal rotations)
  std::vector<CyclicOrbitVector> unresolved;  // singular-Jacobian clusters, not counted
  bool complete = false;
  std::int64_t seeds_used = 0;

  std::uint64_t capacity() const { return point_capacity(map.degree(), n); }
  std::uint64_t fix_count() const;
  std::uint64_t per_count(int k) const;  // points of exact period k
  std::map<int, std::uint64_t> per_counts() const;
  std::uint64_t sper_count() const;      // saddle points of exact period n
  std::uint64_t saddle_point_count() const;  // saddle points anywhere in Fix_n
};

class CertificateConflict : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AmbiguousPeriod : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

PeriodSpectrum enumerate_fix(const HenonMap& map, int n, const EnumerationOptions& options = {});

/// Re-derives exact periods of spectra.at(n) by matching its points against the
/// spectra of the proper divisors of n.
PeriodSpectrum decompose_periods(const std::map<int, PeriodSpectrum>& spectra, int n, double dedup_tol = 1e-8);

/// Enumerates Fix_k for every k | n and returns them decomposed, keyed by k.
std::map<int, PeriodSpectrum> enumerate_with_divisors(const HenonMap& map, int n,
                                                      const EnumerationOptions& options = {});

enum class ShadowFailure { none, not_returning, diverged, stalled, singular, not_certified, drifted };
std::string_view to_string(ShadowFailure failure);

struct ShadowResult {
  ShadowFailure failure = ShadowFailure::none;
  std::optional<PeriodicOrbit> orbit;
};

struct ShadowOptions {
  double max_return_distance = 0.1;  // dist(f^n x, x) screened by the caller
  double max_shift = 0.1;            // refined point 0 must stay this close to x
  SolverTolerances tol;
  int max_newton_steps = 60;
};

/// Refines the forward orbit of a returning point x into a nearby certified periodic orbit.
ShadowResult shadow_pseudo_orbit(const HenonMap& map, const ComplexPoint& x, int n, const ShadowOptions& options = {});

}  // namespace henon
