#include "uavnet/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "uavnet/errors.hpp"

namespace uavnet {

FeasibleAction amend_action(const MdpAction& raw, const NetworkScenario& s) {
  const ActionLayout layout{s.m_links, s.k_links};
  if (raw.raw.size() != layout.size()) {
    throw std::invalid_argument("raw action has " + std::to_string(raw.raw.size()) + " entries, expected " +
                                std::to_string(layout.size()));
  }
  auto at = [&raw](std::size_t i) {
    const double v = raw.raw[i];
    return std::isnan(v) ? 0.0 : std::clamp(v, -1.0, 1.0);
  };

  FeasibleAction a;
  a.m = s.m_links;
  a.k = s.k_links;
  a.p_k.resize(static_cast<std::size_t>(s.k_links));
  a.p_m.resize(static_cast<std::size_t>(s.m_links));
  for (int k = 0; k < s.k_links; ++k) a.p_k[static_cast<std::size_t>(k)] = (at(layout.v2v_power(k)) + 1.0) / 2.0 * s.p_max;
  for (int m = 0; m < s.m_links; ++m) a.p_m[static_cast<std::size_t>(m)] = (at(layout.v2u_power(m)) + 1.0) / 2.0 * s.p_max;
  a.delta_h = at(layout.altitude()) * s.max_delta_h;

  // Links with the strongest preference pick first; ties go to the lower index.
  std::vector<double> best(static_cast<std::size_t>(s.k_links), -2.0);
  for (int k = 0; k < s.k_links; ++k) {
    for (int m = 0; m < s.m_links; ++m) best[static_cast<std::size_t>(k)] = std::max(best[static_cast<std::size_t>(k)], at(layout.score(k, m)));
  }
  std::vector<int> order(static_cast<std::size_t>(s.k_links));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&best](int l, int r) { return best[static_cast<std::size_t>(l)] > best[static_cast<std::size_t>(r)]; });

  a.channel_of.assign(static_cast<std::size_t>(s.k_links), -1);
  std::vector<bool> taken(static_cast<std::size_t>(s.m_links), false);
  for (int k : order) {
    int choice = -1;
    double choice_score = -3.0;
    for (int m = 0; m < s.m_links; ++m) {
      if (taken[static_cast<std::size_t>(m)]) continue;
      const double score = at(layout.score(k, m));
      if (score > choice_score) {
        choice = m;
        choice_score = score;
      }
    }
    // K <= M guarantees a free channel.
    a.channel_of[static_cast<std::size_t>(k)] = choice;
    taken[static_cast<std::size_t>(choice)] = true;
  }
  return a;
}

double estimate_outage(int k, const LinkGains& g, const FadingState& f, const AgingCorrelation& corr,
                       const FeasibleAction& a, const ChannelParams& params, double gamma_th, int n_samples,
                       Rng& rng) {
  if (n_samples < 1) throw std::invalid_argument("outage estimate needs at least one sample");
  const auto ks = static_cast<std::size_t>(k);
  const int m = a.channel_of.at(ks);
  const double noise = params.noise_power();
  int below = 0;
  for (int s = 0; s < n_samples; ++s) {
    const Complex gk = age_fading(f.g_v_k_hat[ks], corr.rho_k[ks], rng);
    double interference = 0.0;
    if (m >= 0) {
      const std::size_t i = g.mk(m, k);
      const Complex gmk = age_fading(f.g_v_mk_hat[i], corr.rho_mk[i], rng);
      interference = a.p_m[static_cast<std::size_t>(m)] * std::norm(gmk) * g.large_v_mk[i];
    }
    const double sinr = a.p_k[ks] * std::norm(gk) * g.large_v_k[ks] / (interference + noise);
    if (sinr < gamma_th) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(n_samples);
}

StateNormalizer::StateNormalizer(std::size_t dim, std::size_t warmup)
    : warmup_(warmup), mean_(dim, 0.0), m2_(dim, 0.0) {}

std::vector<double> StateNormalizer::observe(const std::vector<double>& x) {
  if (mean_.empty()) {
    mean_.assign(x.size(), 0.0);
    m2_.assign(x.size(), 0.0);
  }
  if (x.size() != mean_.size()) throw std::invalid_argument("normalizer dimension mismatch");
  if (!frozen()) {
    ++count_;
    const double n = static_cast<double>(count_);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - mean_[i];
      mean_[i] += d / n;
      m2_[i] += d * (x[i] - mean_[i]);
    }
  }
  return apply(x);
}

std::vector<double> StateNormalizer::apply(const std::vector<double>& x) const {
  if (x.size() != mean_.size()) throw std::invalid_argument("normalizer dimension mismatch");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double sd = count_ >= 2 ? std::sqrt(m2_[i] / static_cast<double>(count_)) : 1.0;
    if (!(sd > 1e-6)) sd = 1.0;
    out[i] = (x[i] - mean_[i]) / sd;
  }
  return out;
}

std::vector<double> state_features(const LinkGains& g, const VirtualQueue& queue, bool observe_aged) {
  std::vector<double> x;
  x.reserve(static_cast<std::size_t>(g.m * g.k + 2 * g.k + g.m + 1));
  for (double h : g.h_u_m) x.push_back(std::log10(h));
  for (double h : g.h_u_k) x.push_back(std::log10(h));
  for (double h : observe_aged ? g.h_v_mk : g.h_v_mk_hat) x.push_back(std::log10(h));
  for (double h : observe_aged ? g.h_v_k : g.h_v_k_hat) x.push_back(std::log10(h));
  x.push_back(queue.q / queue.e_threshold);
  return x;
}

MdpState build_state(const LinkGains& gains, const VirtualQueue& queue, const NetworkScenario& scenario,
                     bool observe_aged, StateNormalizer& normalizer) {
  if (gains.m != scenario.m_links || gains.k != scenario.k_links) {
    throw std::invalid_argument("gain dimensions do not match the scenario");
  }
  auto features = state_features(gains, queue, observe_aged);
  const double q_scaled = features.back();
  features.pop_back();
  MdpState s{normalizer.observe(features)};
  s.values.push_back(q_scaled);
  for (double v : s.values) {
    if (!std::isfinite(v)) throw std::domain_error("non-finite state entry");
  }
  return s;
}

RewardBreakdown compose_reward(double mean_rate, const VirtualQueue& queue, double power, int violations,
                               const NetworkScenario& s, const LyapunovConfig& lyapunov) {
  RewardBreakdown r;
  r.mean_v2u_rate = mean_rate;
  r.rate_term = lyapunov.v_weight * mean_rate / s.reward_rate_unit;
  r.queue_term = queue.q * (power * queue.slot_duration - queue.e_threshold);
  r.outage_violations = violations;
  r.penalty_applied = static_cast<double>(violations) * s.outage_penalty;
  r.reward = r.rate_term - r.queue_term - r.penalty_applied;
  return r;
}

VehicularEnv::VehicularEnv(NetworkScenario scenario, ChannelParams channel, PowerModelParams power,
                           LyapunovConfig lyapunov, std::shared_ptr<const MobilityTrace> trace, std::uint64_t seed,
                           EnvOptions options)
    : scenario_(std::move(scenario)),
      channel_(channel),
      power_(power),
      lyapunov_(lyapunov),
      trace_(std::move(trace)),
      options_(options),
      rng_(seed),
      normalizer_(scenario_.state_dim() - 1, options.normalizer_warmup) {
  if (!trace_) throw std::invalid_argument("environment needs a mobility trace");
  scenario_.validate();
  channel_.validate();
  power_.validate();
  if (!(lyapunov_.v_weight >= 0.0)) throw std::invalid_argument("Lyapunov weight must be non-negative");
  if (trace_->num_slots() < scenario_.num_slots) {
    throw std::invalid_argument("trace has " + std::to_string(trace_->num_slots()) + " slots, scenario needs " +
                                std::to_string(scenario_.num_slots));
  }
  if (std::abs(trace_->slot_duration() - scenario_.slot_duration) > 1e-12) {
    throw std::invalid_argument("trace slot duration differs from the scenario slot duration");
  }
  auto check = [this](const std::vector<int>& ids, const char* role) {
    for (int id : ids) {
      if (!trace_->has_vehicle(id)) {
        throw std::invalid_argument(std::string("pairing.") + role + " references unknown vehicle " +
                                    std::to_string(id));
      }
    }
  };
  check(scenario_.pairing.v2u_tx, "v2u_tx");
  check(scenario_.pairing.v2v_tx, "v2v_tx");
  check(scenario_.pairing.v2v_rx, "v2v_rx");
  queue_.e_threshold = scenario_.e_th;
  queue_.slot_duration = scenario_.slot_duration;
}

LinkVehicles VehicularEnv::vehicles_at(std::size_t slot) const {
  const std::size_t t = std::min(slot, trace_->num_slots() - 1);
  LinkVehicles v;
  for (int id : scenario_.pairing.v2u_tx) v.v2u_tx.push_back(trace_->vehicle(t, id));
  for (int id : scenario_.pairing.v2v_tx) v.v2v_tx.push_back(trace_->vehicle(t, id));
  for (int id : scenario_.pairing.v2v_rx) v.v2v_rx.push_back(trace_->vehicle(t, id));
  return v;
}

void VehicularEnv::draw_slot_channel() {
  correlation_ = aging_correlations(vehicles_, channel_);
  fading_ = draw_fading(correlation_, rng_);
  gains_ = assemble_gains(uav_, vehicles_, fading_, channel_);
}

Observation VehicularEnv::observe() {
  return {build_state(gains_, queue_, scenario_, options_.observe_aged, normalizer_), gains_};
}

Observation VehicularEnv::reset() {
  slot_ = 0;
  started_ = true;
  cumulative_energy_ = 0.0;
  queue_.q = 0.0;
  vehicles_ = vehicles_at(0);
  Vec2 centroid;
  for (const auto& v : vehicles_.v2u_tx) {
    centroid.x += v.position.x;
    centroid.y += v.position.y;
  }
  centroid.x /= static_cast<double>(vehicles_.v2u_tx.size());
  centroid.y /= static_cast<double>(vehicles_.v2u_tx.size());
  uav_ = UavState{centroid, scenario_.initial_altitude, Vec3{scenario_.uav_speed, 0.0, 0.0}};
  draw_slot_channel();
  return observe();
}

StepResult VehicularEnv::step(const MdpAction& action) {
  if (!started_) throw InvalidStateError("step() before reset()");
  if (slot_ >= scenario_.num_slots) throw EpisodeExhaustedError("episode already used all its slots");

  StepResult out;
  StepInfo& info = out.info;
  info.slot = slot_;
  info.action = amend_action(action, scenario_);
  const auto& a = info.action;

  const UavState next_uav = advance_uav(uav_, scenario_.uav_speed, a.delta_h, scenario_.slot_duration,
                                        scenario_.max_delta_h, scenario_.altitude_bounds);
  // The altitude change applies within the slot; horizontal motion takes effect next slot.
  UavState geometry = uav_;
  geometry.altitude = next_uav.altitude;
  const LinkGains gains = assemble_gains(geometry, vehicles_, fading_, channel_);

  double rate_sum = 0.0;
  for (int m = 0; m < scenario_.m_links; ++m) {
    const double sinr = v2u_sinr(m, gains, a, channel_);
    info.v2u_sinr.push_back(sinr);
    rate_sum += shannon_rate(sinr, channel_);
  }
  const double mean_rate = rate_sum / static_cast<double>(scenario_.m_links);

  int violations = 0;
  for (int k = 0; k < scenario_.k_links; ++k) {
    info.v2v_sinr.push_back(v2v_sinr(k, gains, a, channel_));
    const double p_out = estimate_outage(k, gains, fading_, correlation_, a, channel_, scenario_.gamma_v_th,
                                         scenario_.outage_samples, rng_);
    info.outage_probability.push_back(p_out);
    if (p_out > scenario_.pr_v_th) ++violations;
  }

  info.power = propulsion_power(next_uav.velocity, power_);
  info.energy = info.power * scenario_.slot_duration;
  out.reward = compose_reward(mean_rate, queue_, info.power, violations, scenario_, lyapunov_);

  info.queue_before = queue_.q;
  queue_ = queue_update(queue_, info.power);
  info.queue_after = queue_.q;
  cumulative_energy_ += info.energy;
  info.moving_average_energy = cumulative_energy_ / static_cast<double>(slot_ + 1);
  info.altitude = next_uav.altitude;

  uav_ = next_uav;
  ++slot_;
  vehicles_ = vehicles_at(slot_);
  draw_slot_channel();
  out.next = observe();
  out.done = slot_ >= scenario_.num_slots;
  return out;
}

}  // namespace uavnet
