#include <cmath>
#include <numeric>

#include "petbench/error.hpp"
#include "petbench/ml.hpp"
#include "petbench/rng.hpp"

namespace petbench {

namespace {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

}  // namespace

NeuralNetwork NeuralNetwork::initialize(std::size_t inputs, const std::vector<std::size_t>& hidden,
                                        std::uint64_t seed) {
  Rng rng(seed);
  NeuralNetwork net;
  std::size_t fan_in = inputs;
  std::vector<std::size_t> widths = hidden;
  widths.push_back(1);
  for (std::size_t l = 0; l < widths.size(); ++l) {
    const std::size_t fan_out = widths[l];
    const bool output = l + 1 == widths.size();
    const double limit = output ? std::sqrt(6.0 / static_cast<double>(fan_in + fan_out))
                                : std::sqrt(6.0 / static_cast<double>(std::max<std::size_t>(fan_in, 1)));
    Layer layer;
    layer.weights.resize(static_cast<Eigen::Index>(fan_out), static_cast<Eigen::Index>(fan_in));
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) layer.weights(i, j) = rng.uniform(-limit, limit);
    }
    layer.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fan_out));
    net.layers_.push_back(std::move(layer));
    fan_in = fan_out;
  }
  return net;
}

std::size_t NeuralNetwork::arity() const {
  return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.front().weights.cols());
}

std::size_t NeuralNetwork::parameter_count() const {
  std::size_t total = 0;
  for (const auto& l : layers_) total += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return total;
}

Eigen::VectorXd NeuralNetwork::parameters() const {
  Eigen::VectorXd p(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index at = 0;
  for (const auto& l : layers_) {
    for (Eigen::Index i = 0; i < l.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < l.weights.cols(); ++j) p[at++] = l.weights(i, j);
    }
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) p[at++] = l.bias[i];
  }
  return p;
}

void NeuralNetwork::set_parameters(const Eigen::VectorXd& p) {
  if (static_cast<std::size_t>(p.size()) != parameter_count()) throw ShapeError("parameter vector size mismatch");
  Eigen::Index at = 0;
  for (auto& l : layers_) {
    for (Eigen::Index i = 0; i < l.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < l.weights.cols(); ++j) l.weights(i, j) = p[at++];
    }
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias[i] = p[at++];
  }
}

LossGradient NeuralNetwork::loss_gradient(const FeatureMatrix& x, const Labels& y) const {
  if (static_cast<std::size_t>(x.cols()) != arity()) throw ShapeError("feature count does not match network input");
  const Eigen::Index batch = x.rows();
  const auto n = static_cast<double>(batch);

  // activations[l] is the input of layer l (batch x width), pre[l] its pre-activation.
  std::vector<Eigen::MatrixXd> activations{x};
  std::vector<Eigen::MatrixXd> pre;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = activations.back() * layers_[l].weights.transpose();
    z.rowwise() += layers_[l].bias.transpose();
    pre.push_back(z);
    if (l + 1 < layers_.size()) activations.push_back(z.cwiseMax(0.0));
  }

  LossGradient out;
  const Eigen::MatrixXd& logits = pre.back();
  Eigen::MatrixXd delta(batch, 1);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < batch; ++i) {
    const double t = y[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
    loss += softplus(logits(i, 0)) - t * logits(i, 0);
    delta(i, 0) = (sigmoid(logits(i, 0)) - t) / n;
  }
  out.loss = loss / n;

  std::vector<Eigen::MatrixXd> grad_w(layers_.size());
  std::vector<Eigen::VectorXd> grad_b(layers_.size());
  for (std::size_t l = layers_.size(); l-- > 0;) {
    grad_w[l] = delta.transpose() * activations[l];
    grad_b[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      Eigen::MatrixXd back = delta * layers_[l].weights;
      delta = back.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  out.gradient.resize(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    for (Eigen::Index i = 0; i < grad_w[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < grad_w[l].cols(); ++j) out.gradient[at++] = grad_w[l](i, j);
    }
    for (Eigen::Index i = 0; i < grad_b[l].size(); ++i) out.gradient[at++] = grad_b[l][i];
  }
  return out;
}

NeuralNetwork NeuralNetwork::fit(const FeatureMatrix& x, const Labels& y, const NnParams& params) {
  auto net = initialize(static_cast<std::size_t>(x.cols()), params.hidden, params.seed);
  // Separate stream for batch order so initialization and shuffling don't interact.
  Rng rng(params.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), 0);

  FeatureMatrix batch_x;
  Labels batch_y;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += params.batch_size) {
      const std::size_t end = std::min(order.size(), start + params.batch_size);
      batch_x.resize(static_cast<Eigen::Index>(end - start), x.cols());
      batch_y.resize(end - start);
      for (std::size_t i = start; i < end; ++i) {
        batch_x.row(static_cast<Eigen::Index>(i - start)) = x.row(static_cast<Eigen::Index>(order[i]));
        batch_y[i - start] = y[order[i]];
      }
      const auto step = net.loss_gradient(batch_x, batch_y);
      net.set_parameters(net.parameters() - params.learning_rate * step.gradient);
    }
  }
  return net;
}

Eigen::VectorXd NeuralNetwork::probabilities(const FeatureMatrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != arity()) {
    throw ShapeError("expected " + std::to_string(arity()) + " features, got " + std::to_string(x.cols()));
  }
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = a * layers_[l].weights.transpose();
    z.rowwise() += layers_[l].bias.transpose();
    a = l + 1 < layers_.size() ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
  }
  Eigen::VectorXd p(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) p[i] = sigmoid(a(i, 0));
  return p;
}

Labels NeuralNetwork::predict(const FeatureMatrix& x) const {
  const Eigen::VectorXd p = probabilities(x);
  Labels out(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(i)] = p[i] > 0.5 ? 1 : 0;
  return out;
}

}  // namespace petbench
