#include "uavnet/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "uavnet/errors.hpp"

namespace uavnet {

namespace {

using nlohmann::json;

// Walks one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown fields.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return node_.contains(key); }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(field(key), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(field(key), "must be finite");
    }
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (const json* v = find(key)) out = as_integer<Int>(*v, field(key));
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) throw ConfigError(field(key), "expected an array of numbers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) throw ConfigError(field(key), "expected an array of numbers");
        out.push_back(e.get<double>());
      }
    }
  }

  template <class Int>
  void integers(const std::string& key, std::vector<Int>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) throw ConfigError(field(key), "expected an array of integers");
      out.clear();
      for (const auto& e : *v) out.push_back(as_integer<Int>(e, field(key)));
    }
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown field");
    }
  }

 private:
  template <class Int>
  static Int as_integer(const json& v, const std::string& name) {
    if (v.is_number_unsigned()) {
      const auto x = v.get<std::uint64_t>();
      if (x > static_cast<std::uint64_t>(std::numeric_limits<Int>::max())) throw ConfigError(name, "out of range");
      return static_cast<Int>(x);
    }
    if (v.is_number_integer()) {
      const auto x = v.get<std::int64_t>();
      if (x < static_cast<std::int64_t>(std::numeric_limits<Int>::min())) {
        throw ConfigError(name, std::is_signed_v<Int> ? "out of range" : "must be non-negative");
      }
      return static_cast<Int>(x);
    }
    throw ConfigError(name, "expected an integer");
  }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_scenario(Reader r, ExperimentConfig& c) {
  NetworkScenario& s = c.scenario;
  r.integer("m_links", s.m_links);
  r.integer("k_links", s.k_links);
  r.integer("num_slots", s.num_slots);
  r.number("slot_duration", s.slot_duration);
  double p_dbm = 23.0;
  r.number("p_max_dbm", p_dbm);
  s.p_max = dbm_to_watts(p_dbm);
  r.number("h_min", s.altitude_bounds.min);
  r.number("h_max", s.altitude_bounds.max);
  r.number("max_delta_h", s.max_delta_h);
  double gamma_db = 10.0;
  r.number("gamma_v_th_db", gamma_db);
  s.gamma_v_th = db_to_linear(gamma_db);
  r.number("pr_v_th", s.pr_v_th);
  r.number("e_th", s.e_th);
  r.number("outage_penalty", s.outage_penalty);
  r.number("reward_rate_unit", s.reward_rate_unit);
  r.integer("outage_samples", s.outage_samples);
  r.number("initial_altitude", s.initial_altitude);
  r.number("uav_speed", s.uav_speed);
  r.integer("normalizer_warmup", c.normalizer_warmup);
  if (const json* p = r.find("pairing")) {
    Reader pr(*p, r.field("pairing"));
    pr.integers("v2u_tx", s.pairing.v2u_tx);
    pr.integers("v2v_tx", s.pairing.v2v_tx);
    pr.integers("v2v_rx", s.pairing.v2v_rx);
    pr.finish();
    c.explicit_pairing = true;
  }
  r.finish();
}

void read_channel(Reader r, ChannelParams& p) {
  r.number("carrier_frequency", p.carrier_frequency);
  r.number("bandwidth", p.bandwidth);
  double psd_dbm = -174.0;
  r.number("noise_psd_dbm_hz", psd_dbm);
  p.noise_psd = dbm_to_watts(psd_dbm);
  r.number("alpha_los_db", p.alpha_los);
  r.number("alpha_nlos_db", p.alpha_nlos);
  r.number("env_a", p.env_a);
  r.number("env_b", p.env_b);
  double delay_ms = p.t_delay * 1e3;
  r.number("t_delay_ms", delay_ms);
  p.t_delay = delay_ms * 1e-3;
  r.number("min_relative_speed", p.min_relative_speed);
  r.finish();
}

void read_energy(Reader r, PowerModelParams& p) {
  r.number("p0", p.p0_hover_blade);
  r.number("p1", p.p1_hover_induced);
  r.number("omega", p.omega);
  r.number("rotor_radius", p.rotor_radius);
  r.number("v0", p.v0_induced);
  r.number("d0", p.d0_drag_ratio);
  r.number("air_density", p.air_density);
  r.number("rotor_solidity", p.rotor_solidity);
  r.number("rotor_disc_area", p.rotor_disc_area);
  r.number("weight", p.weight);
  r.number("v_h_epsilon", p.v_h_epsilon);
  r.boolean("clamp_vertical_at_zero", p.clamp_vertical_at_zero);
  r.finish();
}

void read_agent(Reader r, ExperimentConfig& c) {
  AgentHyperparams& h = c.hyperparams;
  if (const json* k = r.find("kinds")) {
    if (!k->is_array() || k->empty()) throw ConfigError(r.field("kinds"), "expected a non-empty array of agent names");
    c.agents.clear();
    for (const auto& e : *k) {
      if (!e.is_string()) throw ConfigError(r.field("kinds"), "expected agent names");
      try {
        c.agents.push_back(agent_kind_from_string(e.get<std::string>()));
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(r.field("kinds"), ex.what());
      }
    }
  }
  r.number("lr_actor", h.lr_actor);
  r.number("lr_critic", h.lr_critic);
  r.number("discount", h.discount);
  r.number("tau", h.tau);
  r.integer("batch_size", h.batch_size);
  r.integer("buffer_capacity", h.buffer_capacity);
  r.integer("warmup", h.warmup);
  r.integer("hidden_width", h.hidden_width);
  r.integer("hidden_layers", h.hidden_layers);
  r.number("reward_scale", h.reward_scale);
  r.integer("diffusion_steps", h.diffusion_steps);
  r.number("beta_min", h.beta_min);
  r.number("beta_max", h.beta_max);
  r.number("noise_start", h.noise_start);
  r.number("noise_end", h.noise_end);
  r.integer("noise_decay_steps", h.noise_decay_steps);
  r.numbers("power_levels", h.power_levels);
  r.numbers("altitude_deltas", h.altitude_deltas);
  r.number("lr_q", h.lr_q);
  r.number("epsilon_start", h.epsilon_start);
  r.number("epsilon_end", h.epsilon_end);
  r.integer("epsilon_decay_steps", h.epsilon_decay_steps);
  r.finish();
}

void read_mobility(Reader r, MobilityConfig& m, const std::filesystem::path& base) {
  std::string trace;
  r.string("trace", trace);
  if (!trace.empty()) {
    std::filesystem::path p(trace);
    m.trace = p.is_absolute() ? p : base / p;
  }
  if (const json* p = r.find("platoon")) {
    if (m.trace) throw ConfigError(r.field("platoon"), "give either a trace or platoon parameters, not both");
    Reader pr(*p, r.field("platoon"));
    pr.integer("n_vehicles", m.platoon.n_vehicles);
    pr.number("mean_speed", m.platoon.mean_speed);
    pr.number("spacing", m.platoon.spacing);
    pr.number("position_jitter", m.platoon.position_jitter);
    pr.number("lane_offset", m.platoon.lane_offset);
    pr.finish();
  }
  r.finish();
}

void read_sweep(Reader r, SweepConfig& s) {
  r.integers("k_links", s.k_links);
  r.numbers("v", s.v_weight);
  r.numbers("t_delay_ms", s.t_delay_ms);
  r.integers("diffusion_steps", s.diffusion_steps);
  r.finish();
}

template <class T>
bool has_duplicates(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  return std::adjacent_find(v.begin(), v.end()) != v.end();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  Reader r(root, "");
  r.string("name", c.name);
  std::string out = c.output_dir.string();
  r.string("output_dir", out);
  c.output_dir = out;
  r.integers("seeds", c.seeds);
  r.integer("episodes", c.episodes);
  r.integer("eval_episodes", c.eval_episodes);
  if (const json* v = r.find("scenario")) read_scenario(Reader(*v, "scenario"), c);
  if (const json* v = r.find("channel")) read_channel(Reader(*v, "channel"), c.channel);
  if (const json* v = r.find("energy")) read_energy(Reader(*v, "energy"), c.energy);
  if (const json* v = r.find("lyapunov")) {
    Reader lr(*v, "lyapunov");
    lr.number("v", c.lyapunov.v_weight);
    lr.finish();
  }
  if (const json* v = r.find("agent")) read_agent(Reader(*v, "agent"), c);
  if (const json* v = r.find("mobility")) read_mobility(Reader(*v, "mobility"), c.mobility, base_dir);
  if (const json* v = r.find("sweep")) read_sweep(Reader(*v, "sweep"), c.sweep);
  r.finish();

  if (!root.contains("sweep") || !root["sweep"].contains("k_links")) c.sweep.k_links = {c.scenario.k_links};
  if (!root.contains("sweep") || !root["sweep"].contains("v")) c.sweep.v_weight = {c.lyapunov.v_weight};
  if (!root.contains("sweep") || !root["sweep"].contains("t_delay_ms")) c.sweep.t_delay_ms = {c.channel.t_delay * 1e3};
  if (!root.contains("sweep") || !root["sweep"].contains("diffusion_steps")) {
    c.sweep.diffusion_steps = {c.hyperparams.diffusion_steps};
  }
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

void validate_config(const ExperimentConfig& c) {
  auto wrap = [](const std::string& field, auto&& check) {
    try {
      check();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(field, e.what());
    }
  };
  if (c.seeds.empty()) throw ConfigError("seeds", "must list at least one seed");
  if (has_duplicates(c.seeds)) throw ConfigError("seeds", "must not repeat");
  if (c.episodes < 1) throw ConfigError("episodes", "must be at least 1");
  if (c.agents.empty()) throw ConfigError("agent.kinds", "must name at least one agent");
  if (has_duplicates(c.agents)) throw ConfigError("agent.kinds", "must not repeat");
  if (c.output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
  if (c.normalizer_warmup < 1) throw ConfigError("scenario.normalizer_warmup", "must be at least 1");

  const SweepConfig& s = c.sweep;
  if (s.k_links.empty()) throw ConfigError("sweep.k_links", "must not be empty");
  if (s.v_weight.empty()) throw ConfigError("sweep.v", "must not be empty");
  if (s.t_delay_ms.empty()) throw ConfigError("sweep.t_delay_ms", "must not be empty");
  if (s.diffusion_steps.empty()) throw ConfigError("sweep.diffusion_steps", "must not be empty");
  for (int k : s.k_links) {
    if (k < 1 || k > c.scenario.m_links) throw ConfigError("sweep.k_links", "each K must lie in [1, M]");
  }
  for (double v : s.v_weight) {
    if (!(v >= 0.0)) throw ConfigError("sweep.v", "must be non-negative");
  }
  for (double d : s.t_delay_ms) {
    if (!(d >= 0.0)) throw ConfigError("sweep.t_delay_ms", "must be non-negative");
  }
  for (int i : s.diffusion_steps) {
    if (i < 1) throw ConfigError("sweep.diffusion_steps", "must be at least 1");
  }
  if (has_duplicates(s.k_links)) throw ConfigError("sweep.k_links", "must not repeat");
  if (has_duplicates(s.v_weight)) throw ConfigError("sweep.v", "must not repeat");
  if (has_duplicates(s.t_delay_ms)) throw ConfigError("sweep.t_delay_ms", "must not repeat");
  if (has_duplicates(s.diffusion_steps)) throw ConfigError("sweep.diffusion_steps", "must not repeat");

  wrap("channel", [&] { c.channel.validate(); });
  wrap("energy", [&] { c.energy.validate(); });
  wrap("agent", [&] { c.hyperparams.validate(); });
  for (double dh : c.hyperparams.altitude_deltas) {
    if (std::abs(dh) > c.scenario.max_delta_h) throw ConfigError("agent.altitude_deltas", "exceed scenario.max_delta_h");
  }

  const int max_k = *std::max_element(s.k_links.begin(), s.k_links.end());
  const int needed = 2 * max_k + c.scenario.m_links;
  if (c.explicit_pairing) {
    if (s.k_links.size() != 1 || s.k_links.front() != c.scenario.k_links) {
      throw ConfigError("scenario.pairing", "an explicit pairing fixes K; remove sweep.k_links");
    }
    NetworkScenario probe = c.scenario;
    wrap("scenario", [&] { probe.validate(); });
  } else {
    NetworkScenario probe = c.scenario;
    probe.k_links = max_k;
    probe.pairing = LinkPairing{std::vector<int>(static_cast<std::size_t>(probe.m_links)),
                                std::vector<int>(static_cast<std::size_t>(max_k)),
                                std::vector<int>(static_cast<std::size_t>(max_k), 1)};
    wrap("scenario", [&] { probe.validate(); });
  }

  if (c.mobility.trace) {
    if (!std::filesystem::exists(*c.mobility.trace)) {
      throw ConfigError("mobility.trace", "file not found: " + c.mobility.trace->string());
    }
  } else {
    const PlatoonOptions& p = c.mobility.platoon;
    if (p.n_vehicles != 0 && p.n_vehicles < needed) {
      throw ConfigError("mobility.platoon.n_vehicles",
                        "needs at least 2*K + M = " + std::to_string(needed) + " vehicles");
    }
    if (!(p.spacing > 0.0)) throw ConfigError("mobility.platoon.spacing", "must be positive");
    if (!(p.position_jitter >= 0.0 && p.position_jitter < p.spacing / 2.0)) {
      throw ConfigError("mobility.platoon.position_jitter", "must lie in [0, spacing / 2)");
    }
    if (!(p.mean_speed >= 0.0)) throw ConfigError("mobility.platoon.mean_speed", "must be non-negative");
  }
}

std::string config_to_json(const ExperimentConfig& c) {
  const NetworkScenario& s = c.scenario;
  json j;
  j["name"] = c.name;
  j["output_dir"] = c.output_dir.string();
  j["seeds"] = c.seeds;
  j["episodes"] = c.episodes;
  j["eval_episodes"] = c.eval_episodes;
  json sc = {{"m_links", s.m_links},
             {"k_links", s.k_links},
             {"num_slots", s.num_slots},
             {"slot_duration", s.slot_duration},
             {"p_max_dbm", 10.0 * std::log10(s.p_max * 1e3)},
             {"h_min", s.altitude_bounds.min},
             {"h_max", s.altitude_bounds.max},
             {"max_delta_h", s.max_delta_h},
             {"gamma_v_th_db", 10.0 * std::log10(s.gamma_v_th)},
             {"pr_v_th", s.pr_v_th},
             {"e_th", s.e_th},
             {"outage_penalty", s.outage_penalty},
             {"reward_rate_unit", s.reward_rate_unit},
             {"outage_samples", s.outage_samples},
             {"initial_altitude", s.initial_altitude},
             {"uav_speed", s.uav_speed},
             {"normalizer_warmup", c.normalizer_warmup}};
  if (c.explicit_pairing) {
    sc["pairing"] = {{"v2u_tx", s.pairing.v2u_tx}, {"v2v_tx", s.pairing.v2v_tx}, {"v2v_rx", s.pairing.v2v_rx}};
  }
  j["scenario"] = sc;
  const ChannelParams& ch = c.channel;
  j["channel"] = {{"carrier_frequency", ch.carrier_frequency},
                  {"bandwidth", ch.bandwidth},
                  {"noise_psd_dbm_hz", 10.0 * std::log10(ch.noise_psd * 1e3)},
                  {"alpha_los_db", ch.alpha_los},
                  {"alpha_nlos_db", ch.alpha_nlos},
                  {"env_a", ch.env_a},
                  {"env_b", ch.env_b},
                  {"t_delay_ms", ch.t_delay * 1e3},
                  {"min_relative_speed", ch.min_relative_speed}};
  const PowerModelParams& e = c.energy;
  j["energy"] = {{"p0", e.p0_hover_blade},       {"p1", e.p1_hover_induced},
                 {"omega", e.omega},              {"rotor_radius", e.rotor_radius},
                 {"v0", e.v0_induced},            {"d0", e.d0_drag_ratio},
                 {"air_density", e.air_density},  {"rotor_solidity", e.rotor_solidity},
                 {"rotor_disc_area", e.rotor_disc_area}, {"weight", e.weight},
                 {"v_h_epsilon", e.v_h_epsilon},  {"clamp_vertical_at_zero", e.clamp_vertical_at_zero}};
  j["lyapunov"] = {{"v", c.lyapunov.v_weight}};
  std::vector<std::string> kinds;
  for (auto k : c.agents) kinds.push_back(to_string(k));
  const AgentHyperparams& h = c.hyperparams;
  j["agent"] = {{"kinds", kinds},
                {"lr_actor", h.lr_actor},
                {"lr_critic", h.lr_critic},
                {"discount", h.discount},
                {"tau", h.tau},
                {"batch_size", h.batch_size},
                {"buffer_capacity", h.buffer_capacity},
                {"warmup", h.warmup},
                {"hidden_width", h.hidden_width},
                {"hidden_layers", h.hidden_layers},
                {"reward_scale", h.reward_scale},
                {"diffusion_steps", h.diffusion_steps},
                {"beta_min", h.beta_min},
                {"beta_max", h.beta_max},
                {"noise_start", h.noise_start},
                {"noise_end", h.noise_end},
                {"noise_decay_steps", h.noise_decay_steps},
                {"power_levels", h.power_levels},
                {"altitude_deltas", h.altitude_deltas},
                {"lr_q", h.lr_q},
                {"epsilon_start", h.epsilon_start},
                {"epsilon_end", h.epsilon_end},
                {"epsilon_decay_steps", h.epsilon_decay_steps}};
  if (c.mobility.trace) {
    j["mobility"] = {{"trace", c.mobility.trace->string()}};
  } else {
    const PlatoonOptions& p = c.mobility.platoon;
    j["mobility"] = {{"platoon",
                      {{"n_vehicles", p.n_vehicles},
                       {"mean_speed", p.mean_speed},
                       {"spacing", p.spacing},
                       {"position_jitter", p.position_jitter},
                       {"lane_offset", p.lane_offset}}}};
  }
  j["sweep"] = {{"k_links", c.sweep.k_links},
                {"v", c.sweep.v_weight},
                {"t_delay_ms", c.sweep.t_delay_ms},
                {"diffusion_steps", c.sweep.diffusion_steps}};
  return j.dump(2) + "\n";
}

}  // namespace uavnet
