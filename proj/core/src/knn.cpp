#include <algorithm>
#include <limits>
#include <map>

#include "petbench/error.hpp"
#include "petbench/ml.hpp"

namespace petbench {

namespace {

struct Neighbour {
  double distance;
  int label;
  bool operator<(const Neighbour& o) const {
    return distance < o.distance || (distance == o.distance && label < o.label);
  }
};

// Keeps the k smallest neighbours seen so far, sorted ascending.
class NearestSet {
 public:
  explicit NearestSet(std::size_t k) : k_(k) { items_.reserve(k + 1); }

  double bound() const { return items_.size() < k_ ? std::numeric_limits<double>::infinity() : items_.back().distance; }

  void offer(Neighbour n) {
    if (items_.size() == k_ && !(n < items_.back())) return;
    auto pos = std::upper_bound(items_.begin(), items_.end(), n);
    items_.insert(pos, n);
    if (items_.size() > k_) items_.pop_back();
  }

  int vote() const {
    std::map<int, std::size_t> tally;
    for (const auto& n : items_) ++tally[n.label];
    int best = 0;
    std::size_t best_count = 0;
    for (const auto& [label, count] : tally) {  // ascending labels: ties keep the smaller
      if (count > best_count) {
        best = label;
        best_count = count;
      }
    }
    return best;
  }

 private:
  std::size_t k_;
  std::vector<Neighbour> items_;
};

}  // namespace

KnnClassifier KnnClassifier::fit(const FeatureMatrix& x, const Labels& y, std::size_t k,
                                 const std::vector<FeatureBlock>* layout) {
  if (k < 1) throw std::invalid_argument("knn_k must be at least 1");
  if (static_cast<std::size_t>(x.rows()) != y.size()) throw ShapeError("feature rows and labels differ in length");
  KnnClassifier model;
  model.train_ = x;
  model.labels_ = y;
  model.k_ = k;
  if (layout) {
    Compact c;
    for (const auto& block : *layout) {
      if (block.kind == FeatureBlock::Kind::numeric) {
        c.numeric_columns.push_back(static_cast<Eigen::Index>(block.first_column));
      } else {
        c.blocks.emplace_back(static_cast<Eigen::Index>(block.first_column), static_cast<Eigen::Index>(block.width));
      }
    }
    model.compact_ = std::move(c);
    if (!model.encode(x, model.train_numeric_, model.train_codes_)) model.compact_.reset();
  }
  return model;
}

bool KnnClassifier::encode(const FeatureMatrix& x, std::vector<double>& numeric,
                           std::vector<std::int32_t>& codes) const {
  const auto& c = *compact_;
  const auto rows = x.rows();
  numeric.assign(static_cast<std::size_t>(rows) * c.numeric_columns.size(), 0.0);
  codes.assign(static_cast<std::size_t>(rows) * c.blocks.size(), -1);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < c.numeric_columns.size(); ++j) {
      numeric[static_cast<std::size_t>(r) * c.numeric_columns.size() + j] = x(r, c.numeric_columns[j]);
    }
    for (std::size_t b = 0; b < c.blocks.size(); ++b) {
      const auto [first, width] = c.blocks[b];
      std::int32_t hot = -1;
      for (Eigen::Index w = 0; w < width; ++w) {
        const double v = x(r, first + w);
        if (v == 0.0) continue;
        if (v != 1.0 || hot != -1) return false;
        hot = static_cast<std::int32_t>(w);
      }
      codes[static_cast<std::size_t>(r) * c.blocks.size() + b] = hot;
    }
  }
  return true;
}

Labels KnnClassifier::predict(const FeatureMatrix& x) const {
  if (x.cols() != train_.cols()) {
    throw ShapeError("expected " + std::to_string(train_.cols()) + " features, got " + std::to_string(x.cols()));
  }
  Labels out(static_cast<std::size_t>(x.rows()));
  const std::size_t n_train = labels_.size();
  const std::size_t k = std::min(k_, n_train);
  if (n_train == 0) throw ShapeError("knn model has no training rows");

  std::vector<double> numeric;
  std::vector<std::int32_t> codes;
  const bool compact = compact_ && encode(x, numeric, codes);

  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    NearestSet nearest(k);
    if (compact) {
      const std::size_t nn = compact_->numeric_columns.size();
      const std::size_t nb = compact_->blocks.size();
      const double* q_num = numeric.data() + static_cast<std::size_t>(r) * nn;
      const std::int32_t* q_code = codes.data() + static_cast<std::size_t>(r) * nb;
      for (std::size_t i = 0; i < n_train; ++i) {
        const std::int32_t* t_code = train_codes_.data() + i * nb;
        int mismatch = 0;
        for (std::size_t b = 0; b < nb; ++b) {
          if (q_code[b] != t_code[b]) mismatch += (q_code[b] < 0 || t_code[b] < 0) ? 1 : 2;
        }
        double d = static_cast<double>(mismatch);
        const double* t_num = train_numeric_.data() + i * nn;
        for (std::size_t j = 0; j < nn; ++j) {
          const double diff = q_num[j] - t_num[j];
          d += diff * diff;
        }
        if (d <= nearest.bound()) nearest.offer({d, labels_[i]});
      }
    } else {
      for (std::size_t i = 0; i < n_train; ++i) {
        const double d = (train_.row(static_cast<Eigen::Index>(i)) - x.row(r)).squaredNorm();
        if (d <= nearest.bound()) nearest.offer({d, labels_[i]});
      }
    }
    out[static_cast<std::size_t>(r)] = nearest.vote();
  }
  return out;
}

}  // namespace petbench
