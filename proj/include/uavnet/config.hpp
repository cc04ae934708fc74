#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uavnet/agents.hpp"
#include "uavnet/channel.hpp"
#include "uavnet/energy.hpp"
#include "uavnet/lyapunov.hpp"
#include "uavnet/mobility.hpp"
#include "uavnet/scenario.hpp"

namespace uavnet {

struct MobilityConfig {
  /// CSV trace; when absent a platoon is generated per seed.
  std::optional<std::filesystem::path> trace;
  /// `n_vehicles` 0 means "just enough for the largest K in the sweep".
  PlatoonOptions platoon{0};
};

/// Cartesian product of these lists defines the sweep points.
struct SweepConfig {
  std::vector<int> k_links;
  std::vector<double> v_weight;
  std::vector<double> t_delay_ms;
  std::vector<int> diffusion_steps;
};

struct ExperimentConfig {
  std::string name = "experiment";
  NetworkScenario scenario;
  bool explicit_pairing = false;
  std::size_t normalizer_warmup = 1000;
  ChannelParams channel;
  PowerModelParams energy;
  LyapunovConfig lyapunov;
  std::vector<AgentKind> agents{AgentKind::d3pg};
  AgentHyperparams hyperparams;
  MobilityConfig mobility;
  SweepConfig sweep;
  std::vector<std::uint64_t> seeds{1};
  std::size_t episodes = 500;
  std::size_t eval_episodes = 1;
  std::filesystem::path output_dir = "results";
};

/// Parses JSON text. Relative trace paths resolve against `base_dir`.
/// Unknown keys and ill-typed values raise ConfigError naming the field.
ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Cross-field checks; throws ConfigError naming the field.
void validate_config(const ExperimentConfig& config);

/// Fully resolved configuration as JSON text (every default spelled out).
std::string config_to_json(const ExperimentConfig& config);

}  // namespace uavnet
