#include "uavnet/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "uavnet/errors.hpp"

namespace uavnet {

namespace {

bool uses_diffusion(AgentKind k) { return k == AgentKind::d3pg || k == AgentKind::d3pg_wcsi; }

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

void write_rows(std::ostream& out, const RunOutput& r, const std::vector<SlotRecord>& rows) {
  for (const auto& s : rows) {
    out << r.spec.run_id << ',' << r.spec.seed << ',' << s.episode << ',' << s.slot << ',' << num(s.reward) << ','
        << num(s.mean_v2u_rate) << ',' << num(s.energy) << ',' << num(s.moving_average_energy) << ','
        << num(s.queue) << ',' << s.outage_violations << ',' << num(s.altitude) << '\n';
  }
}

constexpr const char* kMetricsHeader =
    "run_id,seed,episode,slot,reward,mean_v2u_rate,energy,moving_average_energy,queue,outage_violations,altitude\n";

struct RunStats {
  double final_reward = 0.0;
  double final_moving_average_energy = 0.0;
  double final_queue = 0.0;
  double eval_reward = 0.0;
  double eval_mean_v2u_rate = 0.0;
  double eval_mean_queue = 0.0;
  double eval_moving_average_energy = 0.0;
  double eval_outage_violations = 0.0;
};

RunStats stats_of(const RunOutput& r) {
  RunStats s;
  s.final_reward = final_reward(r.train);
  if (!r.train.episodes.empty()) {
    s.final_moving_average_energy = r.train.episodes.back().final_moving_average_energy;
    s.final_queue = r.train.episodes.back().final_queue;
  }
  if (!r.eval.episodes.empty()) {
    const double n = static_cast<double>(r.eval.episodes.size());
    for (const auto& e : r.eval.episodes) {
      s.eval_reward += e.total_reward / n;
      s.eval_mean_v2u_rate += e.mean_v2u_rate / n;
      s.eval_moving_average_energy += e.final_moving_average_energy / n;
      s.eval_outage_violations += e.outage_violations / n;
    }
    for (const auto& row : r.eval_rows) s.eval_mean_queue += row.queue;
    s.eval_mean_queue /= static_cast<double>(r.eval_rows.size());
  }
  return s;
}

nlohmann::ordered_json stats_json(const RunStats& s) {
  return {{"final_reward", s.final_reward},
          {"final_moving_average_energy", s.final_moving_average_energy},
          {"final_queue", s.final_queue},
          {"eval_reward", s.eval_reward},
          {"eval_mean_v2u_rate", s.eval_mean_v2u_rate},
          {"eval_mean_queue", s.eval_mean_queue},
          {"eval_moving_average_energy", s.eval_moving_average_energy},
          {"eval_outage_violations", s.eval_outage_violations}};
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finaliser over the combined word
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + (stream + 1) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<RunSpec> plan_runs(const ExperimentConfig& c) {
  std::vector<RunSpec> runs;
  for (AgentKind agent : c.agents) {
    for (int k : c.sweep.k_links) {
      for (double v : c.sweep.v_weight) {
        for (double d : c.sweep.t_delay_ms) {
          const std::vector<int> steps = uses_diffusion(agent) ? c.sweep.diffusion_steps : std::vector<int>{0};
          for (int i : steps) {
            for (std::uint64_t seed : c.seeds) {
              runs.push_back(RunSpec{runs.size(), agent, SweepPoint{k, v, d, i}, seed});
            }
          }
        }
      }
    }
  }
  return runs;
}

std::shared_ptr<const MobilityTrace> build_trace(const ExperimentConfig& c, std::uint64_t seed) {
  if (c.mobility.trace) {
    return std::make_shared<const MobilityTrace>(load_trace(*c.mobility.trace, c.scenario.slot_duration));
  }
  PlatoonOptions p = c.mobility.platoon;
  if (p.n_vehicles == 0) {
    const int max_k = *std::max_element(c.sweep.k_links.begin(), c.sweep.k_links.end());
    p.n_vehicles = 2 * max_k + c.scenario.m_links;
  }
  p.num_slots = c.scenario.num_slots;
  p.slot_duration = c.scenario.slot_duration;
  return std::make_shared<const MobilityTrace>(generate_platoon(p, derive_seed(seed, 3)));
}

NetworkScenario scenario_for(const ExperimentConfig& c, const SweepPoint& point, const MobilityTrace& trace) {
  NetworkScenario s = c.scenario;
  s.k_links = point.k_links;
  if (!c.explicit_pairing) s.pairing = default_pairing(trace.vehicle_ids(), s.m_links, s.k_links);
  return s;
}

VehicularEnv build_env(const ExperimentConfig& c, const RunSpec& spec, std::shared_ptr<const MobilityTrace> trace) {
  NetworkScenario s = scenario_for(c, spec.point, *trace);
  ChannelParams ch = c.channel;
  ch.t_delay = spec.point.t_delay_ms * 1e-3;
  LyapunovConfig ly = c.lyapunov;
  ly.v_weight = spec.point.v_weight;
  EnvOptions opt;
  opt.observe_aged = spec.agent != AgentKind::d3pg_wcsi;
  opt.normalizer_warmup = c.normalizer_warmup;
  return VehicularEnv(std::move(s), ch, c.energy, ly, std::move(trace), derive_seed(spec.seed, 2), opt);
}

std::unique_ptr<Agent> build_agent(const ExperimentConfig& c, const RunSpec& spec, const NetworkScenario& scenario) {
  AgentHyperparams hp = c.hyperparams;
  if (spec.point.diffusion_steps > 0) hp.diffusion_steps = spec.point.diffusion_steps;
  ChannelParams ch = c.channel;
  ch.t_delay = spec.point.t_delay_ms * 1e-3;
  return make_agent(spec.agent, scenario, ch, hp, derive_seed(spec.seed, 1));
}

RunOutput execute_run(const ExperimentConfig& c, const RunSpec& spec) {
  RunOutput out;
  out.spec = spec;
  auto trace = build_trace(c, spec.seed);
  VehicularEnv env = build_env(c, spec, trace);
  auto agent = build_agent(c, spec, env.scenario());
  out.train = train(*agent, env, c.episodes, [&out](const SlotRecord& r) { out.train_rows.push_back(r); });
  if (c.eval_episodes > 0) {
    out.eval = evaluate(*agent, env, c.eval_episodes, [&out](const SlotRecord& r) { out.eval_rows.push_back(r); });
  }
  return out;
}

double final_reward(const RunResult& result) {
  const auto& e = result.episodes;
  if (e.empty()) return 0.0;
  const std::size_t n = std::min<std::size_t>(10, e.size());
  double sum = 0.0;
  for (std::size_t i = e.size() - n; i < e.size(); ++i) sum += e[i].total_reward;
  return sum / static_cast<double>(n);
}

std::vector<RunOutput> run_experiment(const ExperimentConfig& c, std::size_t jobs) {
  validate_config(c);
  const std::vector<RunSpec> plan = plan_runs(c);
  std::vector<RunOutput> outputs(plan.size());
  std::vector<std::exception_ptr> errors(plan.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < plan.size(); i = next++) {
      try {
        outputs[i] = execute_run(c, plan[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(jobs, plan.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  write_outputs(c, outputs);
  return outputs;
}

void write_outputs(const ExperimentConfig& c, const std::vector<RunOutput>& runs) {
  const auto& dir = c.output_dir;
  std::filesystem::create_directories(dir);

  {
    auto out = open_out(dir / "config.json");
    out << config_to_json(c);
  }
  {
    auto out = open_out(dir / "runs.csv");
    out << "run_id,agent,k_links,v,t_delay_ms,diffusion_steps,seed,episodes,slots_per_episode\n";
    for (const auto& r : runs) {
      const auto& p = r.spec.point;
      out << r.spec.run_id << ',' << to_string(r.spec.agent) << ',' << p.k_links << ',' << num(p.v_weight) << ','
          << num(p.t_delay_ms) << ',' << p.diffusion_steps << ',' << r.spec.seed << ',' << c.episodes << ','
          << c.scenario.num_slots << '\n';
    }
  }
  {
    auto out = open_out(dir / "metrics.csv");
    out << kMetricsHeader;
    for (const auto& r : runs) write_rows(out, r, r.train_rows);
  }
  {
    auto out = open_out(dir / "eval_metrics.csv");
    out << kMetricsHeader;
    for (const auto& r : runs) write_rows(out, r, r.eval_rows);
  }
  {
    auto out = open_out(dir / "timing.csv");
    out << "run_id,agent,k_links,diffusion_steps,slots,mean_inference_ms\n";
    for (const auto& r : runs) {
      const std::size_t slots = r.train.slots + r.eval.slots;
      const double total = r.train.total_inference_ms + r.eval.total_inference_ms;
      out << r.spec.run_id << ',' << to_string(r.spec.agent) << ',' << r.spec.point.k_links << ','
          << r.spec.point.diffusion_steps << ',' << slots << ','
          << num(slots ? total / static_cast<double>(slots) : 0.0) << '\n';
    }
  }

  using Key = std::tuple<std::size_t, int, double, double, int>;  // agent position, K, V, delay, I
  std::map<Key, std::vector<std::size_t>> groups;
  nlohmann::ordered_json summary;
  summary["name"] = c.name;
  summary["runs"] = nlohmann::ordered_json::array();
  std::vector<RunStats> stats;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    const auto& p = r.spec.point;
    stats.push_back(stats_of(r));
    nlohmann::ordered_json j = {{"run_id", r.spec.run_id},       {"agent", to_string(r.spec.agent)},
                                {"k_links", p.k_links},          {"v", p.v_weight},
                                {"t_delay_ms", p.t_delay_ms},    {"diffusion_steps", p.diffusion_steps},
                                {"seed", r.spec.seed}};
    j.update(stats_json(stats.back()));
    summary["runs"].push_back(j);
    const auto agent_pos = static_cast<std::size_t>(
        std::find(c.agents.begin(), c.agents.end(), r.spec.agent) - c.agents.begin());
    groups[Key{agent_pos, p.k_links, p.v_weight, p.t_delay_ms, p.diffusion_steps}].push_back(i);
  }
  summary["groups"] = nlohmann::ordered_json::array();
  for (const auto& [key, members] : groups) {
    const auto& first = runs[members.front()].spec;
    RunStats mean;
    const double n = static_cast<double>(members.size());
    std::vector<std::uint64_t> seeds;
    // Accumulate sums first so the result is exactly sum / n.
    for (std::size_t i : members) {
      const RunStats& s = stats[i];
      mean.final_reward += s.final_reward;
      mean.final_moving_average_energy += s.final_moving_average_energy;
      mean.final_queue += s.final_queue;
      mean.eval_reward += s.eval_reward;
      mean.eval_mean_v2u_rate += s.eval_mean_v2u_rate;
      mean.eval_mean_queue += s.eval_mean_queue;
      mean.eval_moving_average_energy += s.eval_moving_average_energy;
      mean.eval_outage_violations += s.eval_outage_violations;
      seeds.push_back(runs[i].spec.seed);
    }
    for (double* f : {&mean.final_reward, &mean.final_moving_average_energy, &mean.final_queue, &mean.eval_reward,
                      &mean.eval_mean_v2u_rate, &mean.eval_mean_queue, &mean.eval_moving_average_energy,
                      &mean.eval_outage_violations}) {
      *f /= n;
    }
    nlohmann::ordered_json j = {{"agent", to_string(first.agent)},
                                {"k_links", first.point.k_links},
                                {"v", first.point.v_weight},
                                {"t_delay_ms", first.point.t_delay_ms},
                                {"diffusion_steps", first.point.diffusion_steps},
                                {"seeds", seeds}};
    j.update(stats_json(mean));
    summary["groups"].push_back(j);
  }
  auto out = open_out(dir / "summary.json");
  out << summary.dump(2) << '\n';
}

}  // namespace uavnet
