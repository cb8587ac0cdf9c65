#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "parachain/dynamics.hpp"
#include "parachain/model.hpp"

namespace parachain {

inline constexpr const char* tool_version = "0.1.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// All tunable numerical tolerances, overridable via --tolerance-override.
struct Tolerances {
  double tail_tolerance = 1e-12;
  double stability_tolerance = 1e-10;
  double edge_threshold = 0.1;
  double quad_tolerance = 1e-8;
  double ode_rel_tolerance = 1e-9;
  int winding_k_points = 2048;

  void apply_override(const std::string& key, double value);
  std::map<std::string, std::string> as_meta() const;
};

struct RunConfig {
  ChainParams chain;
  std::optional<PhysicalParams> physical;
  std::optional<DriveSpec> drive;
  nlohmann::json options;  // command-specific, validated by the runner
  Tolerances tolerances;
  nlohmann::json raw;  // canonical config for the provenance header
};

/// Parses and schema-validates a config document; unknown keys are rejected.
RunConfig parse_config(const nlohmann::json& doc);

/// Angle from a JSON number (radians) or a "pi/4"-style string.
double parse_angle(const nlohmann::json& v, const std::string& context);

}  // namespace parachain
