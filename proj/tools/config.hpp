#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "nullcone/conformal.hpp"
#include "nullcone/exact.hpp"
#include "nullcone/flow.hpp"
#include "nullcone/sht.hpp"

namespace nullcone::cli {

/// A malformed or contradictory run configuration: maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Radial metric profile h(r) = sum_j coeffs[j] * r^(lowest_power + j) on a
/// working bracket: the JSON-expressible form of a class-S background
/// (covers 1 - r^2, 1 - 2M/r + Q^2/r^2, ...).
struct ProfileSpec {
  std::vector<double> coeffs;
  int lowest_power = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;

  double eval(double r) const;
  void validate() const;  // throws ConfigError
};

struct ModelSpec {
  std::string kind = "de-sitter";  // de-sitter | minkowski | anti-de-sitter | class-s
  std::optional<ProfileSpec> profile;  // required exactly when kind == class-s

  LightconeModel build() const;
};

/// Initial cross section: exactly one descriptor, plus an optional area
/// rescale applied after construction.
struct InitialSpec {
  struct Random {
    unsigned long long seed = 7;
    int lmax = 8;
    double amplitude = 0.02;
  };
  struct Ancient {
    AncientKind kind = AncientKind::KingRosenau;
    double t_hat_offset = 0.5;
    std::optional<LorentzBoost> boost;
    double t = 0.0;  // flow time the profile is sampled at
  };

  std::optional<double> constant;
  std::optional<StcmcParams> stcmc;
  std::optional<Random> random;
  std::optional<Ancient> ancient;
  std::optional<std::string> snapshot;
  std::optional<double> area;

  int descriptor_count() const;
  void clear_descriptors();
  /// Throws ConfigError unless exactly one descriptor is set and referenced
  /// files exist.
  void validate() const;
  ConformalFactor build(const Sht& sht) const;
};

struct RunConfig {
  ModelSpec model;
  int nlat = 64;
  int nlon = -1;  // -1: use 2 * nlat
  InitialSpec initial;
  FlowConfig flow;  // flow.model is overwritten by model.build() at run time
  std::string out_dir = "out";

  int resolved_nlon() const { return nlon > 0 ? nlon : 2 * nlat; }
  void validate() const;  // throws ConfigError

  /// Parse the documented JSON schema; unknown keys are errors.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_file(const std::string& path);

  /// Fully resolved round-trip (defaults filled in): the hashing and
  /// reproducibility record embedded in every artifact.
  nlohmann::json to_json() const;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(std::string_view bytes);

const char* tool_version();

}  // namespace nullcone::cli
