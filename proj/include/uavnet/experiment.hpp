#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "uavnet/config.hpp"
#include "uavnet/training.hpp"

namespace uavnet {

struct SweepPoint {
  int k_links = 0;
  double v_weight = 0.0;
  double t_delay_ms = 0.0;
  int diffusion_steps = 0;  // 0 for agents without a diffusion actor
};

struct RunSpec {
  std::size_t run_id = 0;
  AgentKind agent = AgentKind::d3pg;
  SweepPoint point;
  std::uint64_t seed = 0;
};

/// Agent x K x V x delay x I x seed, in that nesting order. Agents without a
/// diffusion actor run once per (K, V, delay).
std::vector<RunSpec> plan_runs(const ExperimentConfig& config);

/// Independent streams per purpose, derived from the run seed alone so that
/// agents differing only in kind see identical worlds and initial weights.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

std::shared_ptr<const MobilityTrace> build_trace(const ExperimentConfig& config, std::uint64_t seed);
/// Scenario, channel, Lyapunov and agent settings specialised to one point.
NetworkScenario scenario_for(const ExperimentConfig& config, const SweepPoint& point, const MobilityTrace& trace);
VehicularEnv build_env(const ExperimentConfig& config, const RunSpec& spec,
                       std::shared_ptr<const MobilityTrace> trace);
std::unique_ptr<Agent> build_agent(const ExperimentConfig& config, const RunSpec& spec, const NetworkScenario& scenario);

struct RunOutput {
  RunSpec spec;
  std::vector<SlotRecord> train_rows;
  std::vector<SlotRecord> eval_rows;
  RunResult train;
  RunResult eval;
};

RunOutput execute_run(const ExperimentConfig& config, const RunSpec& spec);

/// Runs every planned run on up to `jobs` worker threads and writes
/// metrics.csv, eval_metrics.csv, runs.csv, timing.csv, summary.json and
/// config.json into `config.output_dir`. Data files carry no wall-clock
/// values except timing.csv.
std::vector<RunOutput> run_experiment(const ExperimentConfig& config, std::size_t jobs = 1);

void write_outputs(const ExperimentConfig& config, const std::vector<RunOutput>& runs);

/// Mean of the last min(10, S) episode returns.
double final_reward(const RunResult& result);

}  // namespace uavnet
