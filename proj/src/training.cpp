#include "uavnet/training.hpp"

#include <chrono>
#include <stdexcept>
#include <string>

namespace uavnet {

namespace {

void check_compatible(const Agent& agent, const VehicularEnv& env) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("agent/environment mismatch: " + what); };
  if (agent.state_dim() != env.state_dim()) {
    fail("state dimension " + std::to_string(agent.state_dim()) + " vs " + std::to_string(env.state_dim()));
  }
  if (agent.action_dim() != env.action_dim()) {
    fail("action dimension " + std::to_string(agent.action_dim()) + " vs " + std::to_string(env.action_dim()));
  }
  if (agent.observe_aged() != env.options().observe_aged) fail("observe_aged flag differs");
}

RunResult run(Agent& agent, VehicularEnv& env, std::size_t episodes, const SlotSink& sink, bool learning) {
  check_compatible(agent, env);
  RunResult result;
  for (std::size_t e = 0; e < episodes; ++e) {
    Observation obs = env.reset();
    EpisodeSummary summary;
    summary.episode = e;
    double rate_sum = 0.0;
    bool done = false;
    while (!done) {
      const auto t0 = std::chrono::steady_clock::now();
      const Decision decision = agent.act(obs, learning);
      const auto t1 = std::chrono::steady_clock::now();
      const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

      StepResult step = env.step(decision.action);
      if (learning) {
        agent.remember(obs, decision, step.reward.reward, step.next);
        if (agent.learn().updated) ++result.updates;
      }

      SlotRecord rec;
      rec.episode = e;
      rec.slot = step.info.slot;
      rec.reward = step.reward.reward;
      rec.mean_v2u_rate = step.reward.mean_v2u_rate;
      rec.energy = step.info.energy;
      rec.moving_average_energy = step.info.moving_average_energy;
      rec.queue = step.info.queue_after;
      rec.outage_violations = step.reward.outage_violations;
      rec.altitude = step.info.altitude;
      rec.inference_ms = ms;
      if (sink) sink(rec);

      summary.total_reward += rec.reward;
      rate_sum += rec.mean_v2u_rate;
      summary.final_moving_average_energy = rec.moving_average_energy;
      summary.final_queue = rec.queue;
      summary.outage_violations += rec.outage_violations;
      result.total_inference_ms += ms;
      ++result.slots;

      obs = std::move(step.next);
      done = step.done;
    }
    summary.mean_v2u_rate = rate_sum / static_cast<double>(env.scenario().num_slots);
    result.episodes.push_back(summary);
  }
  return result;
}

}  // namespace

RunResult train(Agent& agent, VehicularEnv& env, std::size_t episodes, const SlotSink& sink) {
  return run(agent, env, episodes, sink, true);
}

RunResult evaluate(Agent& agent, VehicularEnv& env, std::size_t episodes, const SlotSink& sink) {
  return run(agent, env, episodes, sink, false);
}

}  // namespace uavnet
