#pragma once

#include <random>
#include <vector>

#include "uavnet/neural.hpp"

namespace uavnet {

/// Variance-preserving schedule with I steps. Arrays are indexed 0..I-1 for
/// steps i = 1..I.
struct DiffusionSchedule {
  int steps = 0;
  double beta_min = 0.0;
  double beta_max = 0.0;
  std::vector<double> beta;
  std::vector<double> phi;       // 1 - beta_i
  std::vector<double> phi_bar;   // prod_{j<=i} phi_j
  std::vector<double> beta_bar;  // posterior variance; 0 at i = 1

  double beta_at(int i) const { return beta.at(static_cast<std::size_t>(i - 1)); }
  double phi_at(int i) const { return phi.at(static_cast<std::size_t>(i - 1)); }
  double phi_bar_at(int i) const { return i == 0 ? 1.0 : phi_bar.at(static_cast<std::size_t>(i - 1)); }
  double beta_bar_at(int i) const { return beta_bar.at(static_cast<std::size_t>(i - 1)); }
};

/// beta_i = 1 - exp(-beta_min/I - (2i - 1)/(2 I^2) (beta_max - beta_min)).
DiffusionSchedule build_schedule(int steps, double beta_min = 0.1, double beta_max = 10.0);

/// sqrt(phi_bar_i) x0 + sqrt(1 - phi_bar_i) noise.
Vector forward_marginal(const Vector& x0, int i, const DiffusionSchedule& schedule, const Vector& noise);

/// One forward transition sqrt(1 - beta_i) x + sqrt(beta_i) noise.
Vector forward_step(const Vector& x, int i, const DiffusionSchedule& schedule, const Vector& noise);

/// (x_i - (1 - phi_i)/sqrt(1 - phi_bar_i) eps_hat) / sqrt(phi_i). Works column-wise on batches.
Matrix posterior_mean(const Matrix& x_i, const Matrix& eps_hat, int i, const DiffusionSchedule& schedule);

/// Denoiser input: [noisy action; one-hot step (length I); state].
Matrix denoiser_input(const Matrix& x_i, int i, const Matrix& states, const DiffusionSchedule& schedule);

/// Everything needed to differentiate the reverse chain afterwards.
struct ReverseChainTrace {
  std::vector<Tape> tapes;  // tapes[j] belongs to step i = I - j
  Matrix actions;           // tanh(x_0), columns = samples
};

/// Runs the reverse chain x_I ~ N(0, 1) -> x_0 for a batch of states
/// (columns) and squashes the result with tanh. `stochastic` false drops the
/// per-step noise (evaluation mode); the last step is always noise-free.
ReverseChainTrace sample_reverse_chain(const DenseNet& denoiser, const Matrix& states,
                                       const DiffusionSchedule& schedule, std::mt19937_64& rng,
                                       bool stochastic = true);

/// Backpropagates d(sum <action_grad, actions>) through every step of the
/// chain (noise draws held fixed) into the denoiser parameters.
Gradients reverse_chain_backward(const DenseNet& denoiser, const ReverseChainTrace& trace,
                                 const Matrix& action_grad, const DiffusionSchedule& schedule);

/// Single-state convenience wrapper around sample_reverse_chain.
std::vector<double> sample_action(const DenseNet& denoiser, const std::vector<double>& state,
                                  const DiffusionSchedule& schedule, std::mt19937_64& rng, bool stochastic = true);

}  // namespace uavnet
