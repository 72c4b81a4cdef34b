#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "petbench/encoding.hpp"

namespace petbench {

enum class ModelKind { knn, logreg, nn };

struct KnnParams {
  std::size_t k = 5;
};

struct LogRegParams {
  double learning_rate = 0.5;
  std::size_t epochs = 1000;
  double l2 = 1e-4;
};

struct NnParams {
  std::vector<std::size_t> hidden{32};
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;
};

struct ModelSpec {
  ModelKind kind = ModelKind::logreg;
  KnnParams knn;
  LogRegParams logreg;
  NnParams nn;

  /// Short label used in reports: "knn", "logreg", "nn".
  std::string name() const;
  void validate() const;
};

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view s);

class Model {
 public:
  virtual ~Model() = default;
  /// Throws ShapeError when the column count differs from training.
  virtual Labels predict(const FeatureMatrix& x) const = 0;
  virtual std::size_t arity() const = 0;
};

/// Brute-force k-nearest-neighbour vote on Euclidean distance.
///
/// Neighbours are ranked by (distance, label), so equal-distance candidates
/// resolve toward the smaller label; a split vote also goes to the smaller
/// label. When a feature layout is supplied, one-hot blocks are compared as
/// category codes, which gives the same distances as the dense one-hot form.
class KnnClassifier final : public Model {
 public:
  static KnnClassifier fit(const FeatureMatrix& x, const Labels& y, std::size_t k,
                           const std::vector<FeatureBlock>* layout = nullptr);

  Labels predict(const FeatureMatrix& x) const override;
  std::size_t arity() const override { return static_cast<std::size_t>(train_.cols()); }

 private:
  struct Compact {
    std::vector<Eigen::Index> numeric_columns;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks;  // first column, width
  };
  // Returns false when some row is not one-hot within a block.
  bool encode(const FeatureMatrix& x, std::vector<double>& numeric, std::vector<std::int32_t>& codes) const;

  FeatureMatrix train_;
  Labels labels_;
  std::size_t k_ = 5;
  std::optional<Compact> compact_;
  std::vector<double> train_numeric_;
  std::vector<std::int32_t> train_codes_;
};

struct LossGradient {
  double loss = 0.0;
  Eigen::VectorXd gradient;
};

/// Binary logistic regression trained by full-batch gradient descent on mean
/// cross-entropy plus (l2 / 2) * |w|^2 (bias unpenalized).
class LogisticRegression final : public Model {
 public:
  static LogisticRegression fit(const FeatureMatrix& x, const Labels& y, const LogRegParams& params,
                                std::vector<double>* loss_history = nullptr);
  /// Parameter vector layout: weights followed by the bias.
  static LossGradient loss_gradient(const Eigen::VectorXd& params, const FeatureMatrix& x, const Labels& y,
                                    double l2);
  static LogisticRegression from_parameters(const Eigen::VectorXd& params);

  Eigen::VectorXd probabilities(const FeatureMatrix& x) const;
  Labels predict(const FeatureMatrix& x) const override;
  std::size_t arity() const override { return static_cast<std::size_t>(weights_.size()); }
  Eigen::VectorXd parameters() const;

 private:
  Eigen::VectorXd weights_;
  double bias_ = 0.0;
};

/// Feed-forward network: ReLU hidden layers, one sigmoid output unit, trained
/// with seeded mini-batch gradient descent on mean cross-entropy.
class NeuralNetwork final : public Model {
 public:
  /// Randomly initialized (He-uniform hidden, Glorot-uniform output, zero bias).
  static NeuralNetwork initialize(std::size_t inputs, const std::vector<std::size_t>& hidden, std::uint64_t seed);
  static NeuralNetwork fit(const FeatureMatrix& x, const Labels& y, const NnParams& params);

  /// Loss and gradient of the flattened parameters over the batch (x, y).
  LossGradient loss_gradient(const FeatureMatrix& x, const Labels& y) const;
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& params);
  std::size_t parameter_count() const;

  Eigen::VectorXd probabilities(const FeatureMatrix& x) const;
  Labels predict(const FeatureMatrix& x) const override;
  std::size_t arity() const override;

 private:
  struct Layer {
    Eigen::MatrixXd weights;  // outputs x inputs
    Eigen::VectorXd bias;
  };
  std::vector<Layer> layers_;
};

/// Trains the model `spec` describes. Throws DegenerateLabelsError for
/// single-class labels and std::invalid_argument for non-finite features.
std::unique_ptr<Model> train(const ModelSpec& spec, const EncodedData& data);

Labels predict(const Model& model, const FeatureMatrix& x);

/// correct / total. Throws std::invalid_argument on length mismatch or empty input.
double accuracy(std::span<const int> predicted, std::span<const int> actual);

double sigmoid(double z);

}  // namespace petbench
