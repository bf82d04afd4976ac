#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "henon/periodic.hpp"

namespace henon::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Bad flags or flag values; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string map_spec;  // path to a map JSON file, or the JSON text itself
  std::vector<int> ns;
  std::int64_t budget = 0;
  std::uint64_t seed = kDefaultSeed;
  SolverTolerances tol;
  std::string out;  // empty: standard output
  std::string cache_dir;
  int threads = 1;

  void validate() const;
  EnumerationOptions enumeration() const;
};

/// "4", "4..9".
std::vector<int> parse_n_range(std::string_view text);

/// "-6", "-6,0.5", "(-6,0.5)".
Complex parse_complex(std::string_view text);

HenonMap load_map(const std::string& spec);

std::uint64_t fnv1a64(std::string_view bytes);

/// Key over the canonical map JSON, n, effective budget, seed and every tolerance.
std::string cache_key(const HenonMap& map, int n, const EnumerationOptions& options);

/// Spectrum JSON bytes for (map, n), served from the cache when present.
std::string spectrum_bytes(const HenonMap& map, int n, const EnumerationOptions& options,
                           const std::string& cache_dir);

/// Runs one invocation; argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace henon::cli
