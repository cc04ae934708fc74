#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "uavnet/channel.hpp"
#include "uavnet/energy.hpp"
#include "uavnet/lyapunov.hpp"
#include "uavnet/mobility.hpp"
#include "uavnet/scenario.hpp"

namespace uavnet {

/// Greedy projection of a raw action onto the feasible set: one channel per
/// V2V link, no shared channels, powers in [0, p_max], |dh| <= max_delta_h.
/// V2V links are served in descending order of their best score and take
/// their best free channel. Raw entries outside [-1, 1] are clamped first.
FeasibleAction amend_action(const MdpAction& raw, const NetworkScenario& scenario);

/// Monte-Carlo estimate of Pr{SINR_k < gamma_th} over redraws of the
/// Gauss-Markov discrepancy, holding the reported fading and path loss fixed.
double estimate_outage(int k, const LinkGains& gains, const FadingState& fading, const AgingCorrelation& corr,
                       const FeasibleAction& action, const ChannelParams& params, double gamma_th, int n_samples,
                       Rng& rng);

/// Per-entry running standardization of log10 gains, frozen after `warmup`
/// observations.
class StateNormalizer {
 public:
  explicit StateNormalizer(std::size_t dim = 0, std::size_t warmup = 1000);

  /// Folds `x` into the statistics while not frozen, then standardizes it.
  std::vector<double> observe(const std::vector<double>& x);
  std::vector<double> apply(const std::vector<double>& x) const;
  bool frozen() const { return count_ >= warmup_; }
  std::size_t count() const { return count_; }

 private:
  std::size_t warmup_;
  std::size_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

struct MdpState {
  std::vector<double> values;  // length M*K + 2K + M + 1
};

/// Unnormalized feature layout: log10 of h_u_m (M), h_u_k (K), h_v_mk (M*K,
/// index m*K + k), h_v_k (K), then Q / E_th. V2V entries come from the aged
/// family when `observe_aged`, else from the reported (pre-delay) family.
std::vector<double> state_features(const LinkGains& gains, const VirtualQueue& queue, bool observe_aged);

/// Features with gain entries standardized; the queue entry is Q / E_th.
MdpState build_state(const LinkGains& gains, const VirtualQueue& queue, const NetworkScenario& scenario,
                     bool observe_aged, StateNormalizer& normalizer);

struct RewardBreakdown {
  double reward = 0.0;
  double mean_v2u_rate = 0.0;  // bit/s
  double rate_term = 0.0;      // V * mean_rate / reward_rate_unit
  double queue_term = 0.0;     // Q (P dt - E_th)
  int outage_violations = 0;
  double penalty_applied = 0.0;
};

/// Reward from its parts; `rate_term - queue_term - penalty`.
RewardBreakdown compose_reward(double mean_rate, const VirtualQueue& queue, double power, int violations,
                               const NetworkScenario& scenario, const LyapunovConfig& lyapunov);

struct Observation {
  MdpState state;
  LinkGains gains;  // full gain set at the observation instant
};

struct StepInfo {
  std::size_t slot = 0;
  FeasibleAction action;
  std::vector<double> v2u_sinr;
  std::vector<double> v2v_sinr;
  std::vector<double> outage_probability;
  double power = 0.0;       // W
  double energy = 0.0;      // J, power * dt
  double moving_average_energy = 0.0;
  double queue_before = 0.0;
  double queue_after = 0.0;
  double altitude = 0.0;    // after this slot's adjustment
};

struct StepResult {
  Observation next;
  RewardBreakdown reward;
  StepInfo info;
  bool done = false;
};

struct EnvOptions {
  bool observe_aged = true;
  std::size_t normalizer_warmup = 1000;
};

/// One UAV above one highway segment. Owns its noise stream, virtual queue
/// and state normalizer; episodes replay the same mobility trace.
class VehicularEnv {
 public:
  VehicularEnv(NetworkScenario scenario, ChannelParams channel, PowerModelParams power, LyapunovConfig lyapunov,
               std::shared_ptr<const MobilityTrace> trace, std::uint64_t seed, EnvOptions options = {});

  Observation reset();
  /// Throws EpisodeExhaustedError once the episode has used all its slots.
  StepResult step(const MdpAction& action);

  const NetworkScenario& scenario() const { return scenario_; }
  const ChannelParams& channel() const { return channel_; }
  const PowerModelParams& power_model() const { return power_; }
  const LyapunovConfig& lyapunov() const { return lyapunov_; }
  const EnvOptions& options() const { return options_; }
  const UavState& uav() const { return uav_; }
  const VirtualQueue& queue() const { return queue_; }
  std::size_t slot() const { return slot_; }
  std::size_t state_dim() const { return scenario_.state_dim(); }
  std::size_t action_dim() const { return scenario_.action_dim(); }

 private:
  LinkVehicles vehicles_at(std::size_t slot) const;
  void draw_slot_channel();
  Observation observe();

  NetworkScenario scenario_;
  ChannelParams channel_;
  PowerModelParams power_;
  LyapunovConfig lyapunov_;
  std::shared_ptr<const MobilityTrace> trace_;
  EnvOptions options_;
  Rng rng_;
  StateNormalizer normalizer_;

  std::size_t slot_ = 0;
  bool started_ = false;
  UavState uav_;
  VirtualQueue queue_;
  double cumulative_energy_ = 0.0;

  LinkVehicles vehicles_;
  AgingCorrelation correlation_;
  FadingState fading_;
  LinkGains gains_;
};

}  // namespace uavnet
