#include <cmath>

#include "petbench/error.hpp"
#include "petbench/ml.hpp"

namespace petbench {

namespace {

// log(1 + e^z) without overflow
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

Eigen::VectorXd label_vector(const Labels& y) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) v[static_cast<Eigen::Index>(i)] = y[i] ? 1.0 : 0.0;
  return v;
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LossGradient LogisticRegression::loss_gradient(const Eigen::VectorXd& params, const FeatureMatrix& x,
                                               const Labels& y, double l2) {
  const Eigen::Index d = x.cols();
  if (params.size() != d + 1) throw ShapeError("parameter vector does not match feature count");
  const auto n = static_cast<double>(x.rows());
  const Eigen::VectorXd w = params.head(d);
  const double b = params[d];
  const Eigen::VectorXd z = (x * w).array() + b;
  const Eigen::VectorXd target = label_vector(y);

  LossGradient out;
  double loss = 0.0;
  Eigen::VectorXd residual(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    loss += softplus(z[i]) - target[i] * z[i];
    residual[i] = sigmoid(z[i]) - target[i];
  }
  out.loss = loss / n + 0.5 * l2 * w.squaredNorm();
  out.gradient.resize(d + 1);
  out.gradient.head(d) = x.transpose() * residual / n + l2 * w;
  out.gradient[d] = residual.sum() / n;
  return out;
}

LogisticRegression LogisticRegression::fit(const FeatureMatrix& x, const Labels& y, const LogRegParams& params,
                                           std::vector<double>* loss_history) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(x.cols() + 1);
  if (loss_history) loss_history->clear();
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    const auto step = loss_gradient(theta, x, y, params.l2);
    if (loss_history) loss_history->push_back(step.loss);
    theta -= params.learning_rate * step.gradient;
  }
  if (loss_history) loss_history->push_back(loss_gradient(theta, x, y, params.l2).loss);
  return from_parameters(theta);
}

LogisticRegression LogisticRegression::from_parameters(const Eigen::VectorXd& params) {
  LogisticRegression m;
  m.weights_ = params.head(params.size() - 1);
  m.bias_ = params[params.size() - 1];
  return m;
}

Eigen::VectorXd LogisticRegression::parameters() const {
  Eigen::VectorXd p(weights_.size() + 1);
  p << weights_, bias_;
  return p;
}

Eigen::VectorXd LogisticRegression::probabilities(const FeatureMatrix& x) const {
  if (x.cols() != weights_.size()) {
    throw ShapeError("expected " + std::to_string(weights_.size()) + " features, got " + std::to_string(x.cols()));
  }
  Eigen::VectorXd z = (x * weights_).array() + bias_;
  return z.unaryExpr([](double v) { return sigmoid(v); });
}

Labels LogisticRegression::predict(const FeatureMatrix& x) const {
  const Eigen::VectorXd p = probabilities(x);
  Labels out(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(i)] = p[i] > 0.5 ? 1 : 0;
  return out;
}

}  // namespace petbench
