#include "uavnet/neural.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ios>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "uavnet/errors.hpp"

namespace uavnet {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
  }
  return "identity";
}

Activation activation_from_string(const std::string& name) {
  if (name == "identity") return Activation::identity;
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

namespace {

Matrix activate(const Matrix& z, Activation a) {
  switch (a) {
    case Activation::identity: return z;
    case Activation::relu: return z.cwiseMax(0.0);
    case Activation::tanh: return z.array().tanh().matrix();
  }
  return z;
}

/// Multiplies the upstream gradient by the activation derivative at z.
Matrix activation_backward(const Matrix& z, const Matrix& upstream, Activation a) {
  switch (a) {
    case Activation::identity: return upstream;
    case Activation::relu: return (z.array() > 0.0).cast<double>().cwiseProduct(upstream.array()).matrix();
    case Activation::tanh: {
      const Eigen::ArrayXXd t = z.array().tanh();
      return ((1.0 - t * t) * upstream.array()).matrix();
    }
  }
  return upstream;
}

}  // namespace

Gradients& Gradients::operator+=(const Gradients& o) {
  if (weight.size() != o.weight.size()) throw std::invalid_argument("gradient shape mismatch");
  for (std::size_t i = 0; i < weight.size(); ++i) {
    weight[i] += o.weight[i];
    bias[i] += o.bias[i];
  }
  return *this;
}

Gradients& Gradients::operator*=(double factor) {
  for (auto& w : weight) w *= factor;
  for (auto& b : bias) b *= factor;
  return *this;
}

double Gradients::squared_norm() const {
  double s = 0.0;
  for (const auto& w : weight) s += w.squaredNorm();
  for (const auto& b : bias) s += b.squaredNorm();
  return s;
}

DenseNet::DenseNet(std::vector<int> sizes, Activation hidden, Activation output)
    : sizes_(std::move(sizes)), hidden_(hidden), output_(output) {
  if (sizes_.size() < 2) throw std::invalid_argument("network needs at least input and output sizes");
  for (int s : sizes_) {
    if (s < 1) throw std::invalid_argument("layer sizes must be positive");
  }
  for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
    layers_.push_back({Matrix::Zero(sizes_[i + 1], sizes_[i]), Vector::Zero(sizes_[i + 1])});
  }
}

DenseNet::DenseNet(std::vector<int> sizes, Activation hidden, Activation output, std::mt19937_64& rng,
                   double final_layer_scale)
    : DenseNet(std::move(sizes), hidden, output) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
    const double scale = l + 1 == layers_.size() ? final_layer_scale : 1.0;
    std::uniform_real_distribution<double> u(-bound, bound);
    auto& layer = layers_[l];
    // Column-major fill order is part of the seeded contract.
    for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) layer.weight(r, c) = scale * u(rng);
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = scale * u(rng);
  }
}

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

DenseLayer& DenseNet::mutable_layer(std::size_t i) {
  ++version_;
  return layers_.at(i);
}

void DenseNet::check_shape(const Matrix& input) const {
  if (layers_.empty()) throw InvalidStateError("network has no layers");
  if (input.rows() != input_size()) {
    throw std::invalid_argument("network expects " + std::to_string(input_size()) + " inputs, got " +
                                std::to_string(input.rows()));
  }
}

Tape DenseNet::forward(const Matrix& input) const {
  check_shape(input);
  Tape tape;
  tape.owner = this;
  tape.version = version_;
  Matrix x = input;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix z = layers_[l].weight * x;
    z.colwise() += layers_[l].bias;
    tape.inputs.push_back(std::move(x));
    x = activate(z, l + 1 == layers_.size() ? output_ : hidden_);
    tape.pre.push_back(std::move(z));
  }
  tape.output = std::move(x);
  return tape;
}

Matrix DenseNet::predict(const Matrix& input) const {
  check_shape(input);
  Matrix x = input;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix z = layers_[l].weight * x;
    z.colwise() += layers_[l].bias;
    x = activate(z, l + 1 == layers_.size() ? output_ : hidden_);
  }
  return x;
}

Vector DenseNet::predict(const Vector& input) const { return predict(Matrix(input)).col(0); }

Gradients DenseNet::backward(const Tape& tape, const Matrix& output_grad, Matrix* input_grad) const {
  if (tape.owner != this || tape.version != version_ || tape.pre.size() != layers_.size()) {
    throw InvalidStateError("tape does not belong to the current parameters of this network");
  }
  if (output_grad.rows() != tape.output.rows() || output_grad.cols() != tape.output.cols()) {
    throw std::invalid_argument("output gradient shape mismatch");
  }
  Gradients g = zero_gradients();
  Matrix upstream = output_grad;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const Matrix dz = activation_backward(tape.pre[li], upstream, li + 1 == layers_.size() ? output_ : hidden_);
    g.weight[li].noalias() = dz * tape.inputs[li].transpose();
    g.bias[li] = dz.rowwise().sum();
    if (li > 0 || input_grad != nullptr) upstream.noalias() = layers_[li].weight.transpose() * dz;
  }
  if (input_grad != nullptr) *input_grad = std::move(upstream);
  return g;
}

Gradients DenseNet::zero_gradients() const {
  Gradients g;
  for (const auto& l : layers_) {
    g.weight.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
    g.bias.push_back(Vector::Zero(l.bias.size()));
  }
  return g;
}

bool DenseNet::same_architecture(const DenseNet& other) const {
  return sizes_ == other.sizes_ && hidden_ == other.hidden_ && output_ == other.output_;
}

bool DenseNet::parameters_finite() const {
  for (const auto& l : layers_) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

void DenseNet::save(std::ostream& out) const {
  out << "uavnet-densenet 1\n";
  out << "sizes " << sizes_.size();
  for (int s : sizes_) out << ' ' << s;
  out << "\nhidden " << to_string(hidden_) << "\noutput " << to_string(output_) << '\n';
  out << std::hexfloat;
  for (const auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out << (c ? " " : "") << l.weight(r, c);
      out << '\n';
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) out << (r ? " " : "") << l.bias(r);
    out << '\n';
  }
  out << std::defaultfloat;
}

namespace {
double read_double(std::istream& in) {
  std::string token;
  if (!(in >> token)) throw std::runtime_error("checkpoint truncated");
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size()) throw std::runtime_error("bad number '" + token + "' in checkpoint");
  return v;
}
}  // namespace

DenseNet DenseNet::load(std::istream& in) {
  std::string magic;
  int format = 0;
  in >> magic >> format;
  if (magic != "uavnet-densenet" || format != 1) throw std::runtime_error("not a uavnet network checkpoint");
  std::string key;
  std::size_t n = 0;
  in >> key >> n;
  if (key != "sizes" || n < 2) throw std::runtime_error("bad checkpoint architecture header");
  std::vector<int> sizes(n);
  for (auto& s : sizes) in >> s;
  std::string hidden, output;
  in >> key >> hidden;
  if (key != "hidden") throw std::runtime_error("bad checkpoint header");
  in >> key >> output;
  if (key != "output" || !in) throw std::runtime_error("bad checkpoint header");
  DenseNet net(sizes, activation_from_string(hidden), activation_from_string(output));
  for (auto& l : net.layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = read_double(in);
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = read_double(in);
  }
  return net;
}

void DenseNet::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  save(out);
}

DenseNet DenseNet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint " + path.string());
  return load(in);
}

AdamState AdamState::for_network(const DenseNet& net, double learning_rate) {
  AdamState s;
  s.learning_rate = learning_rate;
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    const auto& l = net.layer(i);
    s.m_weight.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
    s.v_weight.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
    s.m_bias.push_back(Vector::Zero(l.bias.size()));
    s.v_bias.push_back(Vector::Zero(l.bias.size()));
  }
  return s;
}

void adam_step(DenseNet& net, const Gradients& grads, AdamState& s, bool maximize) {
  if (grads.weight.size() != net.num_layers() || s.m_weight.size() != net.num_layers()) {
    throw std::invalid_argument("optimizer state does not match the network");
  }
  ++s.step;
  const double sign = maximize ? -1.0 : 1.0;
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    if (param.rows() != grad.rows() || param.cols() != grad.cols()) throw std::invalid_argument("gradient shape mismatch");
    m = s.beta1 * m + (1.0 - s.beta1) * (sign * grad);
    v = s.beta2 * v + (1.0 - s.beta2) * grad.cwiseProduct(grad);
    param.array() -= s.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + s.epsilon);
  };
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    auto& layer = net.mutable_layer(i);
    update(layer.weight, grads.weight[i], s.m_weight[i], s.v_weight[i]);
    update(layer.bias, grads.bias[i], s.m_bias[i], s.v_bias[i]);
  }
}

void soft_update(DenseNet& target, const DenseNet& online, double tau) {
  if (!target.same_architecture(online)) throw std::invalid_argument("soft update between different architectures");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("soft update rate must lie in (0, 1]");
  for (std::size_t i = 0; i < target.num_layers(); ++i) {
    auto& t = target.mutable_layer(i);
    const auto& o = online.layer(i);
    if (tau == 1.0) {
      t = o;
    } else {
      // Written as a step toward `online` so identical parameters stay bit-identical.
      t.weight += tau * (o.weight - t.weight);
      t.bias += tau * (o.bias - t.bias);
    }
  }
}

double parameter_distance(const DenseNet& a, const DenseNet& b) {
  if (!a.same_architecture(b)) throw std::invalid_argument("architectures differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.num_layers(); ++i) {
    s += (a.layer(i).weight - b.layer(i).weight).squaredNorm();
    s += (a.layer(i).bias - b.layer(i).bias).squaredNorm();
  }
  return std::sqrt(s);
}

}  // namespace uavnet
