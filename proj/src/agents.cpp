#include "uavnet/agents.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace uavnet {

namespace {

std::vector<int> layer_sizes(int in, int width, int layers, int out) {
  std::vector<int> sizes{in};
  for (int i = 0; i < layers; ++i) sizes.push_back(width);
  sizes.push_back(out);
  return sizes;
}

Matrix column(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix stack(const Matrix& top, const Matrix& bottom) {
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

double linear_decay(double start, double end, std::size_t step, std::size_t span) {
  if (span == 0) return end;
  const double f = std::min(1.0, static_cast<double>(step) / static_cast<double>(span));
  return start + (end - start) * f;
}

constexpr std::uint64_t kEvalStream = 0x5eed'e7a1'0000'0001ULL;

}  // namespace

std::string to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::d3pg: return "d3pg";
    case AgentKind::d3pg_wcsi: return "d3pg_wcsi";
    case AgentKind::ddpg: return "ddpg";
    case AgentKind::hddqn: return "hddqn";
    case AgentKind::random: return "random";
  }
  return "unknown";
}

AgentKind agent_kind_from_string(const std::string& name) {
  for (auto k : {AgentKind::d3pg, AgentKind::d3pg_wcsi, AgentKind::ddpg, AgentKind::hddqn, AgentKind::random}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown agent kind '" + name + "'");
}

void AgentHyperparams::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  need(lr_actor > 0.0, "lr_actor must be positive");
  need(lr_critic > 0.0, "lr_critic must be positive");
  need(lr_q > 0.0, "lr_q must be positive");
  need(discount >= 0.0 && discount < 1.0, "discount must lie in [0, 1)");
  need(tau > 0.0 && tau <= 1.0, "tau must lie in (0, 1]");
  need(batch_size >= 1, "batch_size must be at least 1");
  need(buffer_capacity >= 1, "buffer_capacity must be at least 1");
  need(hidden_width >= 1, "hidden_width must be at least 1");
  need(hidden_layers >= 1, "hidden_layers must be at least 1");
  need(reward_scale > 0.0, "reward_scale must be positive");
  need(diffusion_steps >= 1, "diffusion_steps must be at least 1");
  need(beta_min > 0.0 && beta_min < beta_max, "beta range must satisfy 0 < beta_min < beta_max");
  need(noise_start >= 0.0 && noise_end >= 0.0, "exploration noise must be non-negative");
  need(!power_levels.empty(), "power_levels must not be empty");
  need(!altitude_deltas.empty(), "altitude_deltas must not be empty");
  for (double p : power_levels) need(p >= 0.0 && p <= 1.0, "power_levels must lie in [0, 1]");
  need(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 && epsilon_end <= 1.0,
       "epsilon must lie in [0, 1]");
}

Batch gather_batch(const ReplayBuffer& buffer, const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw std::invalid_argument("empty batch");
  const Transition& first = buffer.at(indices.front());
  const auto n = static_cast<Eigen::Index>(indices.size());
  Batch b;
  b.states.resize(static_cast<Eigen::Index>(first.state.size()), n);
  b.actions.resize(static_cast<Eigen::Index>(first.action.size()), n);
  b.next_states.resize(b.states.rows(), n);
  b.rewards.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Transition& t = buffer.at(indices[static_cast<std::size_t>(j)]);
    b.states.col(j) = column(t.state);
    b.actions.col(j) = column(t.action);
    b.next_states.col(j) = column(t.next_state);
    b.rewards(j) = t.reward;
    b.choices.push_back(t.choices);
  }
  return b;
}

MlpActor::MlpActor(int state_dim, int action_dim, int width, int layers, Rng& rng)
    : net_(layer_sizes(state_dim, width, layers, action_dim), Activation::relu, Activation::tanh, rng, 0.01) {}

MlpActor::MlpActor(DenseNet net) : net_(std::move(net)) {}

Matrix MlpActor::act(const Matrix& states, Rng&, bool) const { return net_.predict(states); }

Gradients MlpActor::action_gradient(const Matrix& states, const Matrix& action_grad, Rng&, Matrix* actions) const {
  const Tape tape = net_.forward(states);
  if (actions) *actions = tape.output;
  return net_.backward(tape, action_grad);
}

DiffusionActor::DiffusionActor(int state_dim, int action_dim, int width, int layers, DiffusionSchedule schedule,
                               Rng& rng)
    : net_(layer_sizes(action_dim + schedule.steps + state_dim, width, layers, action_dim), Activation::relu,
           Activation::identity, rng, 0.01),
      schedule_(std::move(schedule)) {}

DiffusionActor::DiffusionActor(DenseNet denoiser, DiffusionSchedule schedule)
    : net_(std::move(denoiser)), schedule_(std::move(schedule)) {
  if (net_.input_size() <= net_.output_size() + schedule_.steps) {
    throw std::invalid_argument("denoiser input too small for this schedule");
  }
}

Matrix DiffusionActor::act(const Matrix& states, Rng& rng, bool stochastic) const {
  return sample_reverse_chain(net_, states, schedule_, rng, stochastic).actions;
}

Gradients DiffusionActor::action_gradient(const Matrix& states, const Matrix& action_grad, Rng& rng,
                                          Matrix* actions) const {
  const auto trace = sample_reverse_chain(net_, states, schedule_, rng, true);
  if (actions) *actions = trace.actions;
  return reverse_chain_backward(net_, trace, action_grad, schedule_);
}

DenseNet make_critic(int state_dim, int action_dim, int width, int layers, Rng& rng) {
  return DenseNet(layer_sizes(state_dim + action_dim, width, layers, 1), Activation::relu, Activation::identity, rng);
}

double critic_td_update(DenseNet& critic, AdamState& optimizer, const DenseNet& target_critic,
                        const Matrix& next_actions, const Batch& batch, double discount) {
  const auto n = batch.states.cols();
  if (n == 0) throw std::invalid_argument("empty batch");
  const Matrix next_q = target_critic.predict(stack(batch.next_states, next_actions));
  const Vector y = batch.rewards + discount * next_q.row(0).transpose();
  const Tape tape = critic.forward(stack(batch.states, batch.actions));
  const Vector diff = tape.output.row(0).transpose() - y;
  const double loss = diff.squaredNorm() / static_cast<double>(n);
  const Matrix out_grad = (2.0 / static_cast<double>(n)) * diff.transpose();
  adam_step(critic, critic.backward(tape, out_grad), optimizer);
  return loss;
}

double actor_pg_update(Actor& actor, AdamState& optimizer, const DenseNet& critic, const Matrix& states, Rng& rng) {
  const auto n = states.cols();
  if (n == 0) throw std::invalid_argument("empty batch");
  // Replaying the generator reproduces the same chain noise for the gradient pass.
  Rng replay = rng;
  const Matrix actions = actor.act(states, rng, true);
  const Tape tape = critic.forward(stack(states, actions));
  const double mean_q = tape.output.sum() / static_cast<double>(n);
  Matrix input_grad;
  critic.backward(tape, Matrix::Constant(1, n, 1.0 / static_cast<double>(n)), &input_grad);
  const Matrix action_grad = input_grad.bottomRows(actions.rows());
  const Gradients g = actor.action_gradient(states, action_grad, replay, nullptr);
  adam_step(actor.network(), g, optimizer, true);
  return mean_q;
}

double ddqn_update(DenseNet& qnet, AdamState& optimizer, const DenseNet& target_qnet, const QHeads& heads,
                   const Batch& batch, double discount) {
  const auto n = batch.states.cols();
  if (n == 0) throw std::invalid_argument("empty batch");
  if (qnet.output_size() != heads.total()) throw std::invalid_argument("Q network does not match the head layout");
  const Matrix online_next = qnet.predict(batch.next_states);
  const Matrix target_next = target_qnet.predict(batch.next_states);
  const Tape tape = qnet.forward(batch.states);
  Matrix out_grad = Matrix::Zero(tape.output.rows(), n);
  const double norm = static_cast<double>(n) * heads.count();
  double loss = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& choice = batch.choices.at(static_cast<std::size_t>(j));
    if (static_cast<int>(choice.size()) != heads.count()) throw std::invalid_argument("transition lacks head choices");
    for (int h = 0; h < heads.count(); ++h) {
      const int off = heads.offset(h);
      Eigen::Index best = 0;
      online_next.col(j).segment(off, heads.size(h)).maxCoeff(&best);
      const double y = batch.rewards(j) + discount * target_next(off + best, j);
      const int row = off + choice[static_cast<std::size_t>(h)];
      const double diff = tape.output(row, j) - y;
      loss += diff * diff;
      out_grad(row, j) = 2.0 * diff / norm;
    }
  }
  adam_step(qnet, qnet.backward(tape, out_grad), optimizer);
  return loss / norm;
}

Matrix channel_cost(const LinkGains& g, const NetworkScenario& s, const ChannelParams& channel) {
  Matrix cost(s.k_links, s.m_links);
  const double noise = channel.noise_power();
  for (int k = 0; k < s.k_links; ++k) {
    for (int m = 0; m < s.m_links; ++m) {
      const double sinr = s.p_max * g.h_v_k_hat[static_cast<std::size_t>(k)] /
                          (s.p_max * g.h_v_mk_hat[g.mk(m, k)] + noise);
      cost(k, m) = -10.0 * std::log10(sinr);
    }
  }
  return cost;
}

Agent::Agent(AgentKind kind, const NetworkScenario& scenario, const AgentHyperparams& hp, std::uint64_t seed)
    : kind_(kind), scenario_(scenario), hp_(hp), rng_(seed), buffer_(hp.buffer_capacity) {
  scenario_.validate();
  hp_.validate();
}

void Agent::remember(const Observation& obs, const Decision& d, double reward, const Observation& next) {
  buffer_.push(Transition{obs.state.values, d.action.raw, reward * hp_.reward_scale, next.state.values, d.choices});
  ++steps_;
}

UpdateStats Agent::learn() {
  if (buffer_.size() == 0 || buffer_.size() < hp_.warmup) return {};
  const Batch batch = gather_batch(buffer_, buffer_.sample_indices(hp_.batch_size, rng_));
  UpdateStats stats = update(batch);
  if (stats.updated) ++updates_;
  return stats;
}

ActorCriticAgent::ActorCriticAgent(AgentKind kind, const NetworkScenario& scenario, const AgentHyperparams& hp,
                                   std::uint64_t seed)
    : Agent(kind, scenario, hp, seed) {
  const int sd = static_cast<int>(scenario_.state_dim());
  const int ad = static_cast<int>(scenario_.action_dim());
  switch (kind) {
    case AgentKind::d3pg:
    case AgentKind::d3pg_wcsi:
      actor_ = std::make_unique<DiffusionActor>(sd, ad, hp_.hidden_width, hp_.hidden_layers,
                                                build_schedule(hp_.diffusion_steps, hp_.beta_min, hp_.beta_max), rng_);
      break;
    case AgentKind::ddpg:
      actor_ = std::make_unique<MlpActor>(sd, ad, hp_.hidden_width, hp_.hidden_layers, rng_);
      break;
    default:
      throw std::invalid_argument("not an actor-critic agent kind: " + to_string(kind));
  }
  critic_ = make_critic(sd, ad, hp_.hidden_width, hp_.hidden_layers, rng_);
  target_actor_ = actor_->clone();
  target_critic_ = critic_;
  actor_opt_ = AdamState::for_network(actor_->network(), hp_.lr_actor);
  critic_opt_ = AdamState::for_network(critic_, hp_.lr_critic);
}

double ActorCriticAgent::exploration_sigma() const {
  return linear_decay(hp_.noise_start, hp_.noise_end, steps_, hp_.noise_decay_steps);
}

Decision ActorCriticAgent::act(const Observation& obs, bool explore) {
  const Matrix s = column(obs.state.values);
  Matrix a;
  if (explore) {
    a = actor_->act(s, rng_, true);
  } else {
    Rng fixed(kEvalStream);
    a = actor_->act(s, fixed, false);
  }
  Decision d;
  d.action.raw.assign(a.data(), a.data() + a.size());
  if (explore && kind_ == AgentKind::ddpg) {
    std::normal_distribution<double> noise(0.0, exploration_sigma());
    for (double& x : d.action.raw) x = std::clamp(x + noise(rng_), -1.0, 1.0);
  }
  return d;
}

UpdateStats ActorCriticAgent::update(const Batch& batch) {
  UpdateStats st;
  const Matrix next_actions = target_actor_->act(batch.next_states, rng_, true);
  st.critic_loss = critic_td_update(critic_, critic_opt_, target_critic_, next_actions, batch, hp_.discount);
  st.actor_objective = actor_pg_update(*actor_, actor_opt_, critic_, batch.states, rng_);
  soft_update(target_critic_, critic_, hp_.tau);
  soft_update(target_actor_->network(), actor_->network(), hp_.tau);
  st.updated = true;
  return st;
}

void ActorCriticAgent::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  actor_->network().save(dir / "actor.txt");
  target_actor_->network().save(dir / "target_actor.txt");
  critic_.save(dir / "critic.txt");
  target_critic_.save(dir / "target_critic.txt");
}

void ActorCriticAgent::load(const std::filesystem::path& dir) {
  auto rebuild = [this](DenseNet net) -> std::unique_ptr<Actor> {
    if (auto* d = dynamic_cast<const DiffusionActor*>(actor_.get())) {
      return std::make_unique<DiffusionActor>(std::move(net), d->schedule());
    }
    return std::make_unique<MlpActor>(std::move(net));
  };
  auto actor = rebuild(DenseNet::load(dir / "actor.txt"));
  auto target_actor = rebuild(DenseNet::load(dir / "target_actor.txt"));
  DenseNet critic = DenseNet::load(dir / "critic.txt");
  DenseNet target_critic = DenseNet::load(dir / "target_critic.txt");
  if (!actor->network().same_architecture(actor_->network()) || !critic.same_architecture(critic_)) {
    throw std::invalid_argument("checkpoint architecture does not match this agent");
  }
  actor_ = std::move(actor);
  target_actor_ = std::move(target_actor);
  critic_ = std::move(critic);
  target_critic_ = std::move(target_critic);
  actor_opt_ = AdamState::for_network(actor_->network(), hp_.lr_actor);
  critic_opt_ = AdamState::for_network(critic_, hp_.lr_critic);
}

HddqnAgent::HddqnAgent(const NetworkScenario& scenario, const ChannelParams& channel, const AgentHyperparams& hp,
                       std::uint64_t seed)
    : Agent(AgentKind::hddqn, scenario, hp, seed), channel_(channel) {
  heads_ = QHeads{scenario_.k_links, scenario_.m_links, static_cast<int>(hp_.power_levels.size()),
                  static_cast<int>(hp_.altitude_deltas.size())};
  for (double dh : hp_.altitude_deltas) {
    if (std::abs(dh) > scenario_.max_delta_h) throw std::invalid_argument("altitude_deltas exceed max_delta_h");
  }
  qnet_ = DenseNet(layer_sizes(static_cast<int>(scenario_.state_dim()), hp_.hidden_width, hp_.hidden_layers,
                               heads_.total()),
                   Activation::relu, Activation::identity, rng_);
  target_qnet_ = qnet_;
  opt_ = AdamState::for_network(qnet_, hp_.lr_q);
}

double HddqnAgent::epsilon() const {
  return linear_decay(hp_.epsilon_start, hp_.epsilon_end, steps_, hp_.epsilon_decay_steps);
}

MdpAction HddqnAgent::compose_action(const std::vector<int>& channel_of, const std::vector<int>& choices) const {
  const ActionLayout layout{scenario_.m_links, scenario_.k_links};
  MdpAction a;
  a.raw.assign(layout.size(), -1.0);
  for (int k = 0; k < scenario_.k_links; ++k) {
    a.raw[layout.score(k, channel_of.at(static_cast<std::size_t>(k)))] = 1.0;
    a.raw[layout.v2v_power(k)] = 2.0 * hp_.power_levels.at(static_cast<std::size_t>(choices.at(static_cast<std::size_t>(k)))) - 1.0;
  }
  for (int m = 0; m < scenario_.m_links; ++m) {
    const auto h = static_cast<std::size_t>(scenario_.k_links + m);
    a.raw[layout.v2u_power(m)] = 2.0 * hp_.power_levels.at(static_cast<std::size_t>(choices.at(h))) - 1.0;
  }
  const double dh = hp_.altitude_deltas.at(static_cast<std::size_t>(choices.at(static_cast<std::size_t>(heads_.count() - 1))));
  a.raw[layout.altitude()] = std::clamp(dh / scenario_.max_delta_h, -1.0, 1.0);
  return a;
}

Decision HddqnAgent::act(const Observation& obs, bool explore) {
  const Assignment assignment = hungarian_assign(channel_cost(obs.gains, scenario_, channel_));
  const Vector q = qnet_.predict(Vector(column(obs.state.values)));
  const double eps = explore ? epsilon() : 0.0;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Decision d;
  for (int h = 0; h < heads_.count(); ++h) {
    int choice = 0;
    if (eps > 0.0 && coin(rng_) < eps) {
      choice = std::uniform_int_distribution<int>(0, heads_.size(h) - 1)(rng_);
    } else {
      Eigen::Index best = 0;
      q.segment(heads_.offset(h), heads_.size(h)).maxCoeff(&best);
      choice = static_cast<int>(best);
    }
    d.choices.push_back(choice);
  }
  d.action = compose_action(assignment.column_of, d.choices);
  return d;
}

UpdateStats HddqnAgent::update(const Batch& batch) {
  UpdateStats st;
  st.critic_loss = ddqn_update(qnet_, opt_, target_qnet_, heads_, batch, hp_.discount);
  soft_update(target_qnet_, qnet_, hp_.tau);
  st.updated = true;
  return st;
}

void HddqnAgent::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  qnet_.save(dir / "qnet.txt");
  target_qnet_.save(dir / "target_qnet.txt");
}

void HddqnAgent::load(const std::filesystem::path& dir) {
  DenseNet q = DenseNet::load(dir / "qnet.txt");
  DenseNet t = DenseNet::load(dir / "target_qnet.txt");
  if (!q.same_architecture(qnet_) || !t.same_architecture(qnet_)) {
    throw std::invalid_argument("checkpoint architecture does not match this agent");
  }
  qnet_ = std::move(q);
  target_qnet_ = std::move(t);
  opt_ = AdamState::for_network(qnet_, hp_.lr_q);
}

RandomAgent::RandomAgent(const NetworkScenario& scenario, const AgentHyperparams& hp, std::uint64_t seed)
    : Agent(AgentKind::random, scenario, hp, seed) {}

Decision RandomAgent::act(const Observation&, bool) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Decision d;
  d.action.raw.resize(scenario_.action_dim());
  for (double& x : d.action.raw) x = u(rng_);
  return d;
}

std::unique_ptr<Agent> make_agent(AgentKind kind, const NetworkScenario& scenario, const ChannelParams& channel,
                                  const AgentHyperparams& hp, std::uint64_t seed) {
  switch (kind) {
    case AgentKind::d3pg:
    case AgentKind::d3pg_wcsi:
    case AgentKind::ddpg:
      return std::make_unique<ActorCriticAgent>(kind, scenario, hp, seed);
    case AgentKind::hddqn:
      return std::make_unique<HddqnAgent>(scenario, channel, hp, seed);
    case AgentKind::random:
      return std::make_unique<RandomAgent>(scenario, hp, seed);
  }
  throw std::invalid_argument("unknown agent kind");
}

}  // namespace uavnet
