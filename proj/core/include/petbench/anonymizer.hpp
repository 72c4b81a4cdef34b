#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "petbench/dataset.hpp"
#include "petbench/hierarchy.hpp"

namespace petbench {

struct AnonymizationConfig {
  std::size_t k = 2;
  double suppression_limit = 0.20;
  std::vector<std::string> quasi_identifiers;
  std::map<std::string, Hierarchy> hierarchies;  ///< keyed by attribute name

  /// Throws ConfigError when a quasi-identifier lacks a hierarchy or a bound is off.
  void validate() const;
  const Hierarchy& hierarchy(const std::string& attribute) const;
};

/// One generalization level per quasi-identifier, in config order.
struct LatticeNode {
  std::vector<std::size_t> levels;

  /// Componentwise <=, the lattice's partial order.
  bool precedes_or_equal(const LatticeNode& other) const;
  friend auto operator<=>(const LatticeNode&, const LatticeNode&) = default;
};

struct EquivalenceClass {
  std::vector<std::string> key;  ///< generalized quasi-identifier values
  std::vector<std::size_t> rows;
};

/// Partition of all rows by their generalized quasi-identifier tuple, ordered by key.
std::vector<EquivalenceClass> equivalence_classes(const Dataset& d, const AnonymizationConfig& config,
                                                  const LatticeNode& node);

struct KAnonymityCheck {
  bool satisfiable = false;
  std::size_t min_suppression = 0;  ///< rows in classes smaller than k
};

KAnonymityCheck is_k_anonymous(const Dataset& d, const AnonymizationConfig& config, const LatticeNode& node);

/// Search objective, compared lexicographically: normalized generalization
/// (sum of level/depth, kept as an exact fraction), suppressed rows, level vector.
struct NodeCost {
  std::uint64_t generalization_num = 0;
  std::uint64_t generalization_den = 1;
  std::size_t suppressed = 0;
  LatticeNode node;

  double generalization() const {
    return static_cast<double>(generalization_num) / static_cast<double>(generalization_den);
  }
  friend std::strong_ordering operator<=>(const NodeCost& a, const NodeCost& b);
  friend bool operator==(const NodeCost& a, const NodeCost& b) { return (a <=> b) == 0; }
};

NodeCost node_cost(const AnonymizationConfig& config, const LatticeNode& node, std::size_t suppressed);

struct AnonymizationSolution {
  LatticeNode node;
  std::vector<std::size_t> suppressed_rows;  ///< ascending
  Dataset output;
  double suppressed_cell_fraction = 0.0;
  NodeCost cost;
  std::size_t nodes_evaluated = 0;
};

/// Minimal-cost k-anonymous recoding of `d` within the suppression limit.
/// Identifying attributes are blanked to "*"; other non-QI cells pass through.
/// Throws InfeasibleError when n < k or no node qualifies.
AnonymizationSolution anonymize(const Dataset& d, const AnonymizationConfig& config);

/// Fraction of output cells equal to "*".
double suppressed_cell_fraction(const AnonymizationSolution& s, const Dataset& d);

/// Applies a node's generalization (and identifying-attribute removal) to every
/// row without suppression; used to recode held-out rows into a solution's vocabulary.
Dataset apply_generalization(const Dataset& d, const AnonymizationConfig& config, const LatticeNode& node);

}  // namespace petbench
