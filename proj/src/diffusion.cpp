#include "uavnet/diffusion.hpp"

#include <cmath>
#include <stdexcept>

namespace uavnet {

DiffusionSchedule build_schedule(int steps, double beta_min, double beta_max) {
  if (steps < 1) throw std::invalid_argument("diffusion needs at least one step");
  if (!(beta_min > 0.0) || !(beta_min < beta_max)) {
    throw std::invalid_argument("diffusion rates must satisfy 0 < beta_min < beta_max");
  }
  DiffusionSchedule s;
  s.steps = steps;
  s.beta_min = beta_min;
  s.beta_max = beta_max;
  const double n = static_cast<double>(steps);
  double running = 1.0;
  for (int i = 1; i <= steps; ++i) {
    const double b = 1.0 - std::exp(-beta_min / n - (2.0 * i - 1.0) / (2.0 * n * n) * (beta_max - beta_min));
    const double phi_bar_prev = running;
    running *= 1.0 - b;
    s.beta.push_back(b);
    s.phi.push_back(1.0 - b);
    s.phi_bar.push_back(running);
    s.beta_bar.push_back((1.0 - phi_bar_prev) / (1.0 - running) * b);
  }
  return s;
}

Vector forward_marginal(const Vector& x0, int i, const DiffusionSchedule& s, const Vector& noise) {
  if (noise.size() != x0.size()) throw std::invalid_argument("noise shape mismatch");
  const double pb = s.phi_bar_at(i);
  return std::sqrt(pb) * x0 + std::sqrt(1.0 - pb) * noise;
}

Vector forward_step(const Vector& x, int i, const DiffusionSchedule& s, const Vector& noise) {
  if (noise.size() != x.size()) throw std::invalid_argument("noise shape mismatch");
  return std::sqrt(1.0 - s.beta_at(i)) * x + std::sqrt(s.beta_at(i)) * noise;
}

Matrix posterior_mean(const Matrix& x_i, const Matrix& eps_hat, int i, const DiffusionSchedule& s) {
  if (x_i.rows() != eps_hat.rows() || x_i.cols() != eps_hat.cols()) {
    throw std::invalid_argument("noise estimate shape mismatch");
  }
  const double phi = s.phi_at(i);
  const double coef = (1.0 - phi) / std::sqrt(1.0 - s.phi_bar_at(i));
  return (x_i - coef * eps_hat) / std::sqrt(phi);
}

Matrix denoiser_input(const Matrix& x_i, int i, const Matrix& states, const DiffusionSchedule& s) {
  if (x_i.cols() != states.cols()) throw std::invalid_argument("batch size mismatch");
  Matrix in = Matrix::Zero(x_i.rows() + s.steps + states.rows(), x_i.cols());
  in.topRows(x_i.rows()) = x_i;
  in.row(x_i.rows() + (i - 1)).setOnes();
  in.bottomRows(states.rows()) = states;
  return in;
}

ReverseChainTrace sample_reverse_chain(const DenseNet& denoiser, const Matrix& states, const DiffusionSchedule& s,
                                       std::mt19937_64& rng, bool stochastic) {
  const Eigen::Index action_dim = denoiser.output_size();
  if (denoiser.input_size() != action_dim + s.steps + states.rows()) {
    throw std::invalid_argument("denoiser input size must equal action + steps + state dimensions");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&](Eigen::Index rows, Eigen::Index cols) {
    Matrix z(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index r = 0; r < rows; ++r) z(r, c) = normal(rng);
    return z;
  };

  ReverseChainTrace trace;
  Matrix x = gaussian(action_dim, states.cols());
  for (int i = s.steps; i >= 1; --i) {
    trace.tapes.push_back(denoiser.forward(denoiser_input(x, i, states, s)));
    Matrix next = posterior_mean(x, trace.tapes.back().output, i, s);
    const double sd = std::sqrt(s.beta_bar_at(i));
    if (stochastic && sd > 0.0) next += sd * gaussian(action_dim, states.cols());
    x = std::move(next);
  }
  trace.actions = x.array().tanh().matrix();
  return trace;
}

Gradients reverse_chain_backward(const DenseNet& denoiser, const ReverseChainTrace& trace, const Matrix& action_grad,
                                 const DiffusionSchedule& s) {
  if (static_cast<int>(trace.tapes.size()) != s.steps) throw std::invalid_argument("trace/schedule mismatch");
  const Eigen::Index action_dim = denoiser.output_size();
  Matrix g = ((1.0 - trace.actions.array().square()) * action_grad.array()).matrix();
  Gradients total = denoiser.zero_gradients();
  for (int i = 1; i <= s.steps; ++i) {
    const Tape& tape = trace.tapes[static_cast<std::size_t>(s.steps - i)];
    const double inv_sqrt_phi = 1.0 / std::sqrt(s.phi_at(i));
    const double coef = (1.0 - s.phi_at(i)) / std::sqrt(1.0 - s.phi_bar_at(i));
    Matrix input_grad;
    total += denoiser.backward(tape, (-coef * inv_sqrt_phi) * g, &input_grad);
    g = inv_sqrt_phi * g + input_grad.topRows(action_dim);
  }
  return total;
}

std::vector<double> sample_action(const DenseNet& denoiser, const std::vector<double>& state,
                                  const DiffusionSchedule& schedule, std::mt19937_64& rng, bool stochastic) {
  const Matrix s = Eigen::Map<const Vector>(state.data(), static_cast<Eigen::Index>(state.size()));
  const auto trace = sample_reverse_chain(denoiser, s, schedule, rng, stochastic);
  return {trace.actions.data(), trace.actions.data() + trace.actions.size()};
}

}  // namespace uavnet
