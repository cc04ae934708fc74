#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace uavnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { identity, relu, tanh };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
};

/// Parameter gradients, shaped like the network's layers.
struct Gradients {
  std::vector<Matrix> weight;
  std::vector<Vector> bias;

  Gradients& operator+=(const Gradients& other);
  Gradients& operator*=(double factor);
  double squared_norm() const;
};

class DenseNet;

/// Activations recorded by a forward pass; columns are batch samples.
struct Tape {
  std::vector<Matrix> inputs;       // input to each layer
  std::vector<Matrix> pre;          // pre-activation of each layer
  Matrix output;
  const DenseNet* owner = nullptr;
  std::uint64_t version = 0;
};

/// Fully connected network: affine layers, a shared hidden activation and a
/// separate output activation. Batches are column-major (one sample per column).
class DenseNet {
 public:
  DenseNet() = default;
  /// `sizes` = {n_in, hidden..., n_out}. Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in));
  /// the last layer is further scaled by `final_layer_scale`.
  DenseNet(std::vector<int> sizes, Activation hidden, Activation output, std::mt19937_64& rng,
           double final_layer_scale = 1.0);
  /// All-zero parameters.
  DenseNet(std::vector<int> sizes, Activation hidden, Activation output);

  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }
  Activation hidden_activation() const { return hidden_; }
  Activation output_activation() const { return output_; }
  std::size_t parameter_count() const;
  std::size_t num_layers() const { return layers_.size(); }

  const DenseLayer& layer(std::size_t i) const { return layers_.at(i); }
  /// Mutable access invalidates outstanding tapes.
  DenseLayer& mutable_layer(std::size_t i);
  std::uint64_t version() const { return version_; }

  Tape forward(const Matrix& input) const;
  Matrix predict(const Matrix& input) const;
  Vector predict(const Vector& input) const;

  /// Reverse pass for d(sum <output_grad, output>). Gradients are summed over
  /// the batch. Throws InvalidStateError if the tape predates a parameter change.
  Gradients backward(const Tape& tape, const Matrix& output_grad, Matrix* input_grad = nullptr) const;

  Gradients zero_gradients() const;
  bool same_architecture(const DenseNet& other) const;
  bool parameters_finite() const;

  /// Text dump with an architecture header; doubles are written as hex floats
  /// so a load reproduces every bit.
  void save(std::ostream& out) const;
  static DenseNet load(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static DenseNet load(const std::filesystem::path& path);

 private:
  void check_shape(const Matrix& input) const;

  std::vector<int> sizes_;
  Activation hidden_ = Activation::relu;
  Activation output_ = Activation::identity;
  std::vector<DenseLayer> layers_;
  std::uint64_t version_ = 0;
};

/// Bias-corrected adaptive-moment optimizer state for one network.
struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  std::vector<Matrix> m_weight, v_weight;
  std::vector<Vector> m_bias, v_bias;

  static AdamState for_network(const DenseNet& net, double learning_rate);
};

/// One Adam update. `maximize` ascends instead of descending.
void adam_step(DenseNet& net, const Gradients& grads, AdamState& state, bool maximize = false);

/// target <- tau * online + (1 - tau) * target.
void soft_update(DenseNet& target, const DenseNet& online, double tau);

/// Euclidean distance between two parameter sets of identical architecture.
double parameter_distance(const DenseNet& a, const DenseNet& b);

}  // namespace uavnet
