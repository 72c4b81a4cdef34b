#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "petbench/dataset.hpp"

namespace petbench {

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Labels = std::vector<int>;

/// Where one source attribute lands in the feature matrix.
struct FeatureBlock {
  enum class Kind { numeric, one_hot };
  Kind kind = Kind::numeric;
  std::size_t attribute = 0;  ///< schema index in the source dataset
  std::size_t first_column = 0;
  std::size_t width = 1;
};

struct EncodedData {
  FeatureMatrix features;
  Labels labels;
  std::vector<FeatureBlock> layout;

  std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(features.cols()); }
};

/// One-hot / standardizing encoder fitted on a training split.
///
/// Numeric columns are standardized, (x - mean) / sd with the population sd
/// of the training values, or min-max scaled to [0, 1] on request. A
/// constant column encodes as 0.
/// An attribute is scaled as a number only when its schema kind is numeric
/// and every training value parses; generalized data ("[20,30)", "*") falls
/// back to one-hot. Categories are ordered lexicographically. A category not
/// seen during fit encodes as an all-zero block.
class Encoder {
 public:
  enum class Scaling { standard, min_max };

  static Encoder fit(const Dataset& train, std::optional<std::string> positive_label = std::nullopt,
                     Scaling scaling = Scaling::standard);

  EncodedData transform(const Dataset& d) const;

  std::size_t feature_count() const { return feature_count_; }
  const std::vector<FeatureBlock>& layout() const { return layout_; }
  const std::string& positive_label() const { return positive_label_; }

  /// Index of `value` within the one-hot block of `attribute`, if seen during fit.
  std::optional<std::size_t> category_index(const std::string& attribute, const std::string& value) const;
  const std::string& category(const std::string& attribute, std::size_t index) const;

 private:
  struct Column {
    std::string name;
    std::size_t source = 0;
    FeatureBlock::Kind kind = FeatureBlock::Kind::numeric;
    double offset = 0.0;
    double scale = 0.0;
    std::vector<std::string> categories;  // sorted
  };
  const Column& column(const std::string& attribute) const;

  std::vector<Column> columns_;
  std::vector<FeatureBlock> layout_;
  std::size_t feature_count_ = 0;
  std::string target_;
  std::string positive_label_;
};

}  // namespace petbench
