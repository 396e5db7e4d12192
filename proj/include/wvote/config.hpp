/**
 * Copyright wvote contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wvote/mwu.hpp"
#include "wvote/sim.hpp"

namespace wvote {

inline constexpr const char* kToolName = "wvote";
inline constexpr const char* kToolVersion = "0.1.0";

// Configuration problems carry field-level messages and map to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A single-validator profile-evolution experiment: a classification schedule
// drawn from the behavior mix, applied through run_trajectory.
struct TrajectoryConfig {
  double initial_profile = 0.9;
  BehaviorMix mix{0.8, 0.1};
  ScheduleKind schedule = ScheduleKind::periodic;
  UpdateParams update{};
  std::uint64_t horizon = 10000;
  std::uint64_t seed = 0;
};

enum class RunKind { consensus, trajectory };

struct RunConfig {
  RunKind kind = RunKind::consensus;
  ScenarioConfig scenario{};
  TrajectoryConfig trajectory{};
  nlohmann::json resolved;  // full config with defaults applied
};

// Defaults reproduce the 40%-blocked recovery scenario, so "{}" is a valid
// config. Unknown keys are rejected with the offending path in the message.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);
nlohmann::json default_config_json();

// Applies "dotted.path=value" overrides onto a raw config document. Values
// parse as JSON scalars when possible, else as strings.
void apply_overrides(nlohmann::json& doc, std::span<const std::string> overrides);

struct RunManifest {
  std::string tool = kToolName;
  std::string version = kToolVersion;
  std::uint64_t seed = 0;
  nlohmann::json config;
  std::string started_utc;
  std::string finished_utc;
  std::vector<std::string> outputs;
};

nlohmann::json manifest_json(const RunManifest& manifest);
std::string utc_timestamp();

}  // namespace wvote
