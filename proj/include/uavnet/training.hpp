#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "uavnet/agents.hpp"
#include "uavnet/env.hpp"

namespace uavnet {

struct SlotRecord {
  std::size_t episode = 0;
  std::size_t slot = 0;
  double reward = 0.0;
  double mean_v2u_rate = 0.0;  // bit/s
  double energy = 0.0;         // J
  double moving_average_energy = 0.0;
  double queue = 0.0;          // after the slot's update
  int outage_violations = 0;
  double altitude = 0.0;
  double inference_ms = 0.0;   // wall clock, not deterministic
};

using SlotSink = std::function<void(const SlotRecord&)>;

struct EpisodeSummary {
  std::size_t episode = 0;
  double total_reward = 0.0;
  double mean_v2u_rate = 0.0;
  double final_moving_average_energy = 0.0;
  double final_queue = 0.0;
  int outage_violations = 0;
};

struct RunResult {
  std::vector<EpisodeSummary> episodes;
  std::size_t updates = 0;
  std::size_t slots = 0;
  double total_inference_ms = 0.0;
};

/// Training loop: act, step, store, then one learning update per slot
/// once the agent's warm-up is met. Throws std::invalid_argument before any
/// stepping when the agent and environment disagree on dimensions.
RunResult train(Agent& agent, VehicularEnv& env, std::size_t episodes, const SlotSink& sink = {});

/// Evaluation-mode episodes: no exploration, no storage, no learning.
RunResult evaluate(Agent& agent, VehicularEnv& env, std::size_t episodes, const SlotSink& sink = {});

}  // namespace uavnet
