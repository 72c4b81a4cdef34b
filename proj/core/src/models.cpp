#include <cmath>
#include <set>
#include <stdexcept>

#include "petbench/error.hpp"
#include "petbench/ml.hpp"

namespace petbench {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::knn: return "knn";
    case ModelKind::logreg: return "logreg";
    case ModelKind::nn: return "nn";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view s) {
  if (s == "knn") return ModelKind::knn;
  if (s == "logreg") return ModelKind::logreg;
  if (s == "nn") return ModelKind::nn;
  throw ConfigError("unknown model kind '" + std::string(s) + "'");
}

std::string ModelSpec::name() const { return std::string(to_string(kind)); }

void ModelSpec::validate() const {
  switch (kind) {
    case ModelKind::knn:
      if (knn.k < 1) throw ConfigError("knn_k must be at least 1");
      break;
    case ModelKind::logreg:
      if (logreg.epochs < 1) throw ConfigError("logreg epochs must be at least 1");
      if (!(logreg.learning_rate > 0.0)) throw ConfigError("logreg learning rate must be positive");
      if (!(logreg.l2 >= 0.0)) throw ConfigError("logreg l2 weight must be nonnegative");
      break;
    case ModelKind::nn:
      if (nn.epochs < 1) throw ConfigError("nn epochs must be at least 1");
      if (nn.batch_size < 1) throw ConfigError("nn batch size must be at least 1");
      if (!(nn.learning_rate > 0.0)) throw ConfigError("nn learning rate must be positive");
      for (auto w : nn.hidden) {
        if (w < 1) throw ConfigError("nn hidden layers must be nonempty");
      }
      break;
  }
}

std::unique_ptr<Model> train(const ModelSpec& spec, const EncodedData& data) {
  spec.validate();
  if (data.rows() != data.labels.size()) throw ShapeError("feature rows and labels differ in length");
  if (!data.features.allFinite()) throw std::invalid_argument("training features must be finite");
  const std::set<int> classes(data.labels.begin(), data.labels.end());
  if (classes.size() < 2) throw DegenerateLabelsError("training labels contain fewer than two classes");

  switch (spec.kind) {
    case ModelKind::knn:
      return std::make_unique<KnnClassifier>(KnnClassifier::fit(data.features, data.labels, spec.knn.k, &data.layout));
    case ModelKind::logreg:
      return std::make_unique<LogisticRegression>(LogisticRegression::fit(data.features, data.labels, spec.logreg));
    case ModelKind::nn:
      return std::make_unique<NeuralNetwork>(NeuralNetwork::fit(data.features, data.labels, spec.nn));
  }
  throw ConfigError("unknown model kind");
}

Labels predict(const Model& model, const FeatureMatrix& x) {
  if (x.rows() == 0) {
    if (static_cast<std::size_t>(x.cols()) != model.arity()) throw ShapeError("feature count mismatch");
    return {};
  }
  return model.predict(x);
}

double accuracy(std::span<const int> predicted, std::span<const int> actual) {
  if (predicted.size() != actual.size()) throw std::invalid_argument("prediction and label vectors differ in length");
  if (predicted.empty()) throw std::invalid_argument("accuracy of an empty prediction is undefined");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == actual[i];
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

}  // namespace petbench
