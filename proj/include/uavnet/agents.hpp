#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "uavnet/diffusion.hpp"
#include "uavnet/env.hpp"
#include "uavnet/hungarian.hpp"
#include "uavnet/neural.hpp"
#include "uavnet/replay_buffer.hpp"

namespace uavnet {

enum class AgentKind { d3pg, d3pg_wcsi, ddpg, hddqn, random };

std::string to_string(AgentKind kind);
AgentKind agent_kind_from_string(const std::string& name);

struct AgentHyperparams {
  double lr_actor = 3e-6;
  double lr_critic = 1e-5;
  double discount = 0.99;
  double tau = 0.005;
  std::size_t batch_size = 64;
  std::size_t buffer_capacity = 50000;
  std::size_t warmup = 1000;
  int hidden_width = 256;
  int hidden_layers = 3;
  /// Stored rewards are multiplied by this; the environment's reward is untouched.
  double reward_scale = 1.0;

  int diffusion_steps = 4;
  double beta_min = 0.1;
  double beta_max = 10.0;

  // Gaussian exploration on raw actions (DDPG), decayed linearly per slot.
  double noise_start = 0.3;
  double noise_end = 0.05;
  std::size_t noise_decay_steps = 2000;

  // Discrete grids and epsilon-greedy schedule (H-DDQN).
  std::vector<double> power_levels{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};  // fractions of p_max
  std::vector<double> altitude_deltas{-5.0, -2.5, 0.0, 2.5, 5.0};   // m
  double lr_q = 1e-4;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  std::size_t epsilon_decay_steps = 2000;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Columns of a sampled minibatch.
struct Batch {
  Matrix states;
  Matrix actions;
  Vector rewards;
  Matrix next_states;
  std::vector<std::vector<int>> choices;
};

Batch gather_batch(const ReplayBuffer& buffer, const std::vector<std::size_t>& indices);

/// Deterministic-output actor that can be differentiated through.
class Actor {
 public:
  virtual ~Actor() = default;
  virtual int state_dim() const = 0;
  virtual int action_dim() const = 0;
  /// One action per state column, entries in [-1, 1].
  virtual Matrix act(const Matrix& states, Rng& rng, bool stochastic) const = 0;
  /// Gradient of sum <action_grad, act(states)> with the randomness of the
  /// same call held fixed; returns the actions alongside.
  virtual Gradients action_gradient(const Matrix& states, const Matrix& action_grad, Rng& rng,
                                    Matrix* actions) const = 0;
  virtual DenseNet& network() = 0;
  virtual const DenseNet& network() const = 0;
  virtual std::unique_ptr<Actor> clone() const = 0;
};

/// tanh-output MLP actor.
class MlpActor final : public Actor {
 public:
  MlpActor(int state_dim, int action_dim, int width, int layers, Rng& rng);
  explicit MlpActor(DenseNet net);

  int state_dim() const override { return net_.input_size(); }
  int action_dim() const override { return net_.output_size(); }
  Matrix act(const Matrix& states, Rng& rng, bool stochastic) const override;
  Gradients action_gradient(const Matrix& states, const Matrix& action_grad, Rng& rng,
                            Matrix* actions) const override;
  DenseNet& network() override { return net_; }
  const DenseNet& network() const override { return net_; }
  std::unique_ptr<Actor> clone() const override { return std::make_unique<MlpActor>(*this); }

 private:
  DenseNet net_;
};

/// Denoiser network plus schedule; actions come from the reverse chain.
class DiffusionActor final : public Actor {
 public:
  DiffusionActor(int state_dim, int action_dim, int width, int layers, DiffusionSchedule schedule, Rng& rng);
  DiffusionActor(DenseNet denoiser, DiffusionSchedule schedule);

  int state_dim() const override { return net_.input_size() - net_.output_size() - schedule_.steps; }
  int action_dim() const override { return net_.output_size(); }
  const DiffusionSchedule& schedule() const { return schedule_; }
  Matrix act(const Matrix& states, Rng& rng, bool stochastic) const override;
  Gradients action_gradient(const Matrix& states, const Matrix& action_grad, Rng& rng,
                            Matrix* actions) const override;
  DenseNet& network() override { return net_; }
  const DenseNet& network() const override { return net_; }
  std::unique_ptr<Actor> clone() const override { return std::make_unique<DiffusionActor>(*this); }

 private:
  DenseNet net_;
  DiffusionSchedule schedule_;
};

/// Q(s, a) network over the concatenation [s; a].
DenseNet make_critic(int state_dim, int action_dim, int width, int layers, Rng& rng);

/// One descent step on the mean squared TD error with targets
/// r + discount * target_critic(s', next_actions). Returns the pre-step loss.
double critic_td_update(DenseNet& critic, AdamState& optimizer, const DenseNet& target_critic,
                        const Matrix& next_actions, const Batch& batch, double discount);

/// One ascent step on mean_s Q(s, actor(s)). Returns the pre-step mean Q.
double actor_pg_update(Actor& actor, AdamState& optimizer, const DenseNet& critic, const Matrix& states, Rng& rng);

/// Index layout of the factored Q-heads: one power head per V2V link, one
/// per V2U link, one altitude head.
struct QHeads {
  int k = 0;
  int m = 0;
  int power_levels = 0;
  int altitude_levels = 0;

  int count() const { return k + m + 1; }
  int size(int head) const { return head < k + m ? power_levels : altitude_levels; }
  int offset(int head) const { return head * power_levels; }
  int total() const { return (k + m) * power_levels + altitude_levels; }
};

/// Double-Q update of a factored network: per head a* = argmax Q_online(s'),
/// y = r + discount * Q_target(s', a*). Mean squared error over heads and
/// batch; one descent step. Returns the pre-step loss.
double ddqn_update(DenseNet& qnet, AdamState& optimizer, const DenseNet& target_qnet, const QHeads& heads,
                   const Batch& batch, double discount);

/// Hungarian cost for H-DDQN: minus the reported V2V SINR (dB) of link k on
/// channel m with every transmitter at full power.
Matrix channel_cost(const LinkGains& gains, const NetworkScenario& scenario, const ChannelParams& channel);

struct Decision {
  MdpAction action;
  std::vector<int> choices;  // discrete head choices (H-DDQN only)
};

struct UpdateStats {
  bool updated = false;
  double critic_loss = 0.0;
  double actor_objective = 0.0;
};

class Agent {
 public:
  Agent(AgentKind kind, const NetworkScenario& scenario, const AgentHyperparams& hp, std::uint64_t seed);
  virtual ~Agent() = default;

  AgentKind kind() const { return kind_; }
  /// False only for the baseline that ignores CSI aging.
  bool observe_aged() const { return kind_ != AgentKind::d3pg_wcsi; }
  const AgentHyperparams& hyperparams() const { return hp_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  std::size_t updates() const { return updates_; }
  std::size_t steps() const { return steps_; }
  std::size_t state_dim() const { return scenario_.state_dim(); }
  std::size_t action_dim() const { return scenario_.action_dim(); }

  /// `explore` false selects evaluation mode.
  virtual Decision act(const Observation& obs, bool explore) = 0;
  void remember(const Observation& obs, const Decision& decision, double reward, const Observation& next);
  /// One learning update once the buffer holds `warmup` transitions.
  UpdateStats learn();

  virtual void save(const std::filesystem::path& dir) const = 0;
  virtual void load(const std::filesystem::path& dir) = 0;

 protected:
  virtual UpdateStats update(const Batch& batch) = 0;

  AgentKind kind_;
  NetworkScenario scenario_;
  AgentHyperparams hp_;
  Rng rng_;
  ReplayBuffer buffer_;
  std::size_t steps_ = 0;
  std::size_t updates_ = 0;
};

/// D3PG, D3PG-WCSI and DDPG share the actor-critic machinery.
class ActorCriticAgent final : public Agent {
 public:
  ActorCriticAgent(AgentKind kind, const NetworkScenario& scenario, const AgentHyperparams& hp, std::uint64_t seed);

  Decision act(const Observation& obs, bool explore) override;
  void save(const std::filesystem::path& dir) const override;
  void load(const std::filesystem::path& dir) override;

  const Actor& actor() const { return *actor_; }
  const DenseNet& critic() const { return critic_; }
  double exploration_sigma() const;

 protected:
  UpdateStats update(const Batch& batch) override;

 private:
  std::unique_ptr<Actor> actor_;
  std::unique_ptr<Actor> target_actor_;
  DenseNet critic_;
  DenseNet target_critic_;
  AdamState actor_opt_;
  AdamState critic_opt_;
};

/// Hungarian channel assignment plus factored double-DQN for powers and altitude.
class HddqnAgent final : public Agent {
 public:
  HddqnAgent(const NetworkScenario& scenario, const ChannelParams& channel, const AgentHyperparams& hp,
             std::uint64_t seed);

  Decision act(const Observation& obs, bool explore) override;
  void save(const std::filesystem::path& dir) const override;
  void load(const std::filesystem::path& dir) override;

  const QHeads& heads() const { return heads_; }
  double epsilon() const;
  /// Raw action equivalent to an assignment plus discrete head choices.
  MdpAction compose_action(const std::vector<int>& channel_of, const std::vector<int>& choices) const;

 protected:
  UpdateStats update(const Batch& batch) override;

 private:
  ChannelParams channel_;
  QHeads heads_;
  DenseNet qnet_;
  DenseNet target_qnet_;
  AdamState opt_;
};

/// Uniform raw actions; never learns.
class RandomAgent final : public Agent {
 public:
  RandomAgent(const NetworkScenario& scenario, const AgentHyperparams& hp, std::uint64_t seed);

  Decision act(const Observation& obs, bool explore) override;
  void save(const std::filesystem::path&) const override {}
  void load(const std::filesystem::path&) override {}

 protected:
  UpdateStats update(const Batch&) override { return {}; }
};

std::unique_ptr<Agent> make_agent(AgentKind kind, const NetworkScenario& scenario, const ChannelParams& channel,
                                  const AgentHyperparams& hp, std::uint64_t seed);

}  // namespace uavnet
