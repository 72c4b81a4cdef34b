#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "petbench/dataset.hpp"
#include "petbench/rng.hpp"

namespace petbench {

struct SynthesizerConfig {
  std::size_t degree = 2;                 ///< maximum parents per attribute
  std::optional<std::size_t> n_out;       ///< rows to sample; defaults to the input size
  std::uint64_t seed = 0;
  std::size_t bins = 20;                  ///< equal-width bins for wide numeric attributes
  double smoothing = 1.0;                 ///< additive pseudo-count for CPT rows

  void validate() const;
};

/// How one attribute maps onto a finite code domain.
///
/// Categorical attributes (and numeric ones with at most `bins` distinct
/// values) use one code per observed value in sorted order; wider numeric
/// attributes are cut into equal-width bins over [min, max].
struct DiscreteAttribute {
  enum class Encoding { categorical, binned };

  std::string name;
  Encoding encoding = Encoding::categorical;
  bool integer = false;
  std::vector<std::string> categories;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t bins = 0;

  std::size_t domain_size() const { return encoding == Encoding::binned ? bins : categories.size(); }
  std::optional<std::size_t> code_of(const std::string& value) const;
  /// A concrete value for `code`; binned codes draw uniformly within the bin.
  std::string decode(std::size_t code, Rng& rng) const;
};

/// Column-major code table of a dataset under a fixed discretization.
struct DiscreteTable {
  std::vector<DiscreteAttribute> attributes;
  std::vector<std::vector<std::uint32_t>> codes;  ///< codes[attribute][row]
  std::size_t n = 0;
};

DiscreteTable discretize(const Dataset& d, std::size_t bins);

/// Treats every distinct string as its own category (no binning).
DiscreteTable discretize_as_categories(const Dataset& d);

/// Empirical Shannon entropy of one attribute, in bits.
double entropy(const DiscreteTable& t, std::size_t a);

/// I(a; b) in bits over the empirical joint of a and the tuple b.
/// Throws std::invalid_argument for an empty b and Error for zero rows.
double mutual_information(const DiscreteTable& t, std::size_t a, std::span<const std::size_t> b);
double mutual_information(const Dataset& d, const std::string& a, const std::vector<std::string>& b);

struct ConditionalTable {
  std::vector<std::size_t> parents;        ///< attribute indices, in key order
  std::vector<std::size_t> parent_domain;  ///< domain size per parent
  std::size_t child_domain = 0;
  std::vector<double> probabilities;       ///< row-major, rows() x child_domain

  std::size_t rows() const { return child_domain ? probabilities.size() / child_domain : 0; }
  std::span<const double> row(std::size_t r) const {
    return {probabilities.data() + r * child_domain, child_domain};
  }
  /// Row index of a parent-code assignment (mixed radix, first parent fastest).
  std::size_t row_index(std::span<const std::uint32_t> codes_by_attribute) const;
};

struct BayesianNetwork {
  std::vector<AttributeSchema> schema;
  std::string target;
  std::size_t source_rows = 0;
  std::vector<DiscreteAttribute> attributes;       ///< parallel to schema
  std::vector<std::size_t> order;                  ///< sampling order
  std::vector<std::vector<std::size_t>> parents;   ///< by attribute index
  std::vector<ConditionalTable> cpts;              ///< by attribute index; empty until fitted
  /// MI between each attribute and its parent set at selection time.
  std::vector<double> selection_score;

  bool fitted() const { return cpts.size() == attributes.size() && !attributes.empty(); }
};

/// Greedy degree-bounded structure search: start from the highest-entropy
/// attribute, then repeatedly add the (attribute, parent set) pair with the
/// largest mutual information, parents drawn from already-placed attributes.
BayesianNetwork greedy_bayes(const Dataset& d, const SynthesizerConfig& config);
BayesianNetwork greedy_bayes(const DiscreteTable& t, std::size_t degree);

BayesianNetwork fit_cpts(const Dataset& d, BayesianNetwork net, double smoothing);

/// Ancestral sampling of n_out rows (default: the training size).
Dataset sample(const BayesianNetwork& net, const SynthesizerConfig& config);

/// greedy_bayes + fit_cpts + sample.
Dataset synthesize(const Dataset& d, const SynthesizerConfig& config, BayesianNetwork* network_out = nullptr);

/// JSON description of the network: order, parents, CPT dimensions.
std::string describe(const BayesianNetwork& net);

}  // namespace petbench
