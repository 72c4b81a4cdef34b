#include "petbench/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "petbench/error.hpp"

namespace petbench {

Encoder Encoder::fit(const Dataset& train, std::optional<std::string> positive_label, Scaling scaling) {
  Encoder enc;
  enc.target_ = train.target();
  const std::size_t t = train.target_index();

  std::set<std::string> labels;
  for (const auto& row : train.rows()) labels.insert(row[t]);
  if (labels.size() > 2) throw TypeError("target '" + train.target() + "' has more than two classes");
  if (positive_label) {
    enc.positive_label_ = *positive_label;
  } else if (!labels.empty()) {
    enc.positive_label_ = *labels.rbegin();
  }

  std::size_t next_column = 0;
  for (std::size_t j = 0; j < train.width(); ++j) {
    if (j == t) continue;
    const auto& attr = train.schema()[j];
    Column col;
    col.name = attr.name;
    col.source = j;

    bool numeric = attr.is_numeric();
    double mean = 0.0, scale = 0.0;
    double lo = 0.0, hi = 0.0;
    if (numeric) {
      // Welford's running mean and variance.
      double m2 = 0.0;
      std::size_t count = 0;
      for (const auto& row : train.rows()) {
        auto v = parse_number(row[j]);
        if (!v) {
          numeric = false;
          break;
        }
        lo = count == 0 ? *v : std::min(lo, *v);
        hi = count == 0 ? *v : std::max(hi, *v);
        ++count;
        const double d = *v - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (*v - mean);
      }
      if (count > 0) scale = std::sqrt(m2 / static_cast<double>(count));
      if (scaling == Scaling::min_max) {
        mean = lo;
        scale = hi - lo;
      }
    }
    FeatureBlock block;
    block.attribute = j;
    block.first_column = next_column;
    if (numeric) {
      col.kind = FeatureBlock::Kind::numeric;
      col.offset = mean;
      col.scale = scale;
      block.kind = FeatureBlock::Kind::numeric;
      block.width = 1;
    } else {
      std::set<std::string> cats;
      for (const auto& row : train.rows()) cats.insert(row[j]);
      col.kind = FeatureBlock::Kind::one_hot;
      col.categories.assign(cats.begin(), cats.end());
      block.kind = FeatureBlock::Kind::one_hot;
      block.width = col.categories.size();
    }
    next_column += block.width;
    enc.columns_.push_back(std::move(col));
    enc.layout_.push_back(block);
  }
  enc.feature_count_ = next_column;
  return enc;
}

EncodedData Encoder::transform(const Dataset& d) const {
  EncodedData out;
  out.layout = layout_;
  out.features = FeatureMatrix::Zero(static_cast<Eigen::Index>(d.n()),
                                     static_cast<Eigen::Index>(feature_count_));
  out.labels.resize(d.n());

  std::vector<std::size_t> source(columns_.size());
  for (std::size_t c = 0; c < columns_.size(); ++c) source[c] = d.index_of(columns_[c].name);
  const std::size_t t = d.index_of(target_);

  for (std::size_t i = 0; i < d.n(); ++i) {
    const auto& row = d.row(i);
    const auto r = static_cast<Eigen::Index>(i);
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      const auto& col = columns_[c];
      const auto& value = row[source[c]];
      const auto base = static_cast<Eigen::Index>(layout_[c].first_column);
      if (col.kind == FeatureBlock::Kind::numeric) {
        auto v = parse_number(value);
        if (!v) throw TypeError("value '" + value + "' of numeric attribute '" + col.name + "' is not a number");
        out.features(r, base) = col.scale > 0.0 ? (*v - col.offset) / col.scale : 0.0;
      } else {
        auto it = std::lower_bound(col.categories.begin(), col.categories.end(), value);
        if (it != col.categories.end() && *it == value) {
          out.features(r, base + static_cast<Eigen::Index>(it - col.categories.begin())) = 1.0;
        }
      }
    }
    out.labels[i] = row[t] == positive_label_ ? 1 : 0;
  }
  return out;
}

const Encoder::Column& Encoder::column(const std::string& attribute) const {
  for (const auto& c : columns_) {
    if (c.name == attribute) return c;
  }
  throw SchemaError("attribute '" + attribute + "' is not encoded");
}

std::optional<std::size_t> Encoder::category_index(const std::string& attribute,
                                                   const std::string& value) const {
  const auto& col = column(attribute);
  auto it = std::lower_bound(col.categories.begin(), col.categories.end(), value);
  if (it == col.categories.end() || *it != value) return std::nullopt;
  return static_cast<std::size_t>(it - col.categories.begin());
}

const std::string& Encoder::category(const std::string& attribute, std::size_t index) const {
  return column(attribute).categories.at(index);
}

}  // namespace petbench
