#include "petbench/anonymizer.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>

#include "petbench/error.hpp"

namespace petbench {

void AnonymizationConfig::validate() const {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (!(suppression_limit >= 0.0 && suppression_limit <= 1.0)) {
    throw ConfigError("suppression_limit must lie in [0, 1]");
  }
  for (const auto& q : quasi_identifiers) {
    if (!hierarchies.contains(q)) throw ConfigError("quasi-identifier '" + q + "' has no hierarchy");
  }
}

const Hierarchy& AnonymizationConfig::hierarchy(const std::string& attribute) const {
  auto it = hierarchies.find(attribute);
  if (it == hierarchies.end()) throw ConfigError("no hierarchy for '" + attribute + "'");
  return it->second;
}

bool LatticeNode::precedes_or_equal(const LatticeNode& other) const {
  if (levels.size() != other.levels.size()) return false;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] > other.levels[i]) return false;
  }
  return true;
}

namespace {

// Full 128-bit product as (high, low) words.
std::pair<std::uint64_t, std::uint64_t> wide_multiply(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t mask = 0xffffffffULL;
  const std::uint64_t a_lo = a & mask, a_hi = a >> 32;
  const std::uint64_t b_lo = b & mask, b_hi = b >> 32;
  const std::uint64_t ll = a_lo * b_lo;
  const std::uint64_t lh = a_lo * b_hi;
  const std::uint64_t hl = a_hi * b_lo;
  const std::uint64_t hh = a_hi * b_hi;
  const std::uint64_t mid = (ll >> 32) + (lh & mask) + (hl & mask);
  const std::uint64_t low = (mid << 32) | (ll & mask);
  const std::uint64_t high = hh + (lh >> 32) + (hl >> 32) + (mid >> 32);
  return {high, low};
}

}  // namespace

std::strong_ordering operator<=>(const NodeCost& a, const NodeCost& b) {
  // a.num / a.den vs b.num / b.den without rounding
  const auto lhs = wide_multiply(a.generalization_num, b.generalization_den);
  const auto rhs = wide_multiply(b.generalization_num, a.generalization_den);
  if (auto c = lhs <=> rhs; c != 0) return c;
  if (auto c = a.suppressed <=> b.suppressed; c != 0) return c;
  return a.node <=> b.node;
}

namespace {

void check_node(const AnonymizationConfig& config, const LatticeNode& node) {
  if (node.levels.size() != config.quasi_identifiers.size()) {
    throw RangeError("lattice node has " + std::to_string(node.levels.size()) + " levels for " +
                     std::to_string(config.quasi_identifiers.size()) + " quasi-identifiers");
  }
  for (std::size_t i = 0; i < node.levels.size(); ++i) {
    const auto& h = config.hierarchy(config.quasi_identifiers[i]);
    if (node.levels[i] > h.depth()) {
      throw RangeError("level " + std::to_string(node.levels[i]) + " exceeds depth of '" +
                       config.quasi_identifiers[i] + "'");
    }
  }
}

bool within_limit(std::size_t suppressed, double limit, std::size_t n) {
  const double budget = limit * static_cast<double>(n);
  return static_cast<double>(suppressed) <= budget + 1e-9 * static_cast<double>(n);
}

// Per-QI, per-level dense codes of every row, so a node's class key is a
// mixed-radix integer (or, when the radix product overflows, a code vector).
class LatticeEvaluator {
 public:
  LatticeEvaluator(const Dataset& d, const AnonymizationConfig& config) : n_(d.n()) {
    for (const auto& q : config.quasi_identifiers) {
      const auto& h = config.hierarchy(q);
      const std::size_t col = d.index_of(q);
      std::vector<std::size_t> value_of_row(n_);
      for (std::size_t r = 0; r < n_; ++r) {
        auto idx = h.value_index(d.row(r)[col]);
        if (!idx) throw DomainError("value '" + d.row(r)[col] + "' of '" + q + "' is not in its hierarchy");
        value_of_row[r] = *idx;
      }
      Attribute attr;
      for (std::size_t l = 0; l <= h.depth(); ++l) {
        std::unordered_map<std::string_view, std::uint32_t> dense;
        std::vector<std::uint32_t> codes(n_);
        for (std::size_t r = 0; r < n_; ++r) {
          auto [it, inserted] = dense.emplace(h.at(value_of_row[r], l), static_cast<std::uint32_t>(dense.size()));
          codes[r] = it->second;
        }
        attr.radix.push_back(std::max<std::size_t>(dense.size(), 1));
        attr.codes.push_back(std::move(codes));
      }
      attributes_.push_back(std::move(attr));
    }
  }

  // Sizes of the equivalence classes under `node`, in no particular order.
  std::vector<std::size_t> class_sizes(const LatticeNode& node) const {
    std::vector<std::size_t> sizes;
    if (n_ == 0) return sizes;
    std::vector<std::uint64_t> keys(n_, 0);
    bool overflow = false;
    std::uint64_t stride = 1;
    for (std::size_t q = 0; q < attributes_.size() && !overflow; ++q) {
      const auto& codes = attributes_[q].codes[node.levels[q]];
      for (std::size_t r = 0; r < n_; ++r) keys[r] += codes[r] * stride;
      const std::uint64_t radix = attributes_[q].radix[node.levels[q]];
      if (__builtin_mul_overflow(stride, radix, &stride)) overflow = true;
    }
    if (!overflow) {
      std::sort(keys.begin(), keys.end());
      std::size_t run = 1;
      for (std::size_t r = 1; r < n_; ++r) {
        if (keys[r] == keys[r - 1]) {
          ++run;
        } else {
          sizes.push_back(run);
          run = 1;
        }
      }
      sizes.push_back(run);
      return sizes;
    }
    std::vector<std::vector<std::uint32_t>> tuples(n_);
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t q = 0; q < attributes_.size(); ++q) tuples[r].push_back(attributes_[q].codes[node.levels[q]][r]);
    }
    std::sort(tuples.begin(), tuples.end());
    std::size_t run = 1;
    for (std::size_t r = 1; r < n_; ++r) {
      if (tuples[r] == tuples[r - 1]) {
        ++run;
      } else {
        sizes.push_back(run);
        run = 1;
      }
    }
    sizes.push_back(run);
    return sizes;
  }

  std::size_t min_suppression(const LatticeNode& node, std::size_t k) const {
    std::size_t total = 0;
    for (std::size_t s : class_sizes(node)) {
      if (s < k) total += s;
    }
    return total;
  }

 private:
  struct Attribute {
    std::vector<std::size_t> radix;                   // per level
    std::vector<std::vector<std::uint32_t>> codes;    // [level][row]
  };
  std::size_t n_;
  std::vector<Attribute> attributes_;
};

std::vector<std::size_t> depths(const AnonymizationConfig& config) {
  std::vector<std::size_t> out;
  for (const auto& q : config.quasi_identifiers) out.push_back(config.hierarchy(q).depth());
  return out;
}

}  // namespace

NodeCost node_cost(const AnonymizationConfig& config, const LatticeNode& node, std::size_t suppressed) {
  NodeCost cost;
  std::uint64_t den = 1;
  for (std::size_t depth : depths(config)) {
    if (depth > 0) den = std::lcm(den, static_cast<std::uint64_t>(depth));
  }
  const auto ds = depths(config);
  std::uint64_t num = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds[i] > 0) num += node.levels[i] * (den / ds[i]);
  }
  cost.generalization_num = num;
  cost.generalization_den = den;
  cost.suppressed = suppressed;
  cost.node = node;
  return cost;
}

std::vector<EquivalenceClass> equivalence_classes(const Dataset& d, const AnonymizationConfig& config,
                                                  const LatticeNode& node) {
  check_node(config, node);
  std::vector<std::size_t> cols;
  for (const auto& q : config.quasi_identifiers) cols.push_back(d.index_of(q));
  std::map<std::vector<std::string>, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < d.n(); ++r) {
    std::vector<std::string> key;
    key.reserve(cols.size());
    for (std::size_t q = 0; q < cols.size(); ++q) {
      key.push_back(config.hierarchy(config.quasi_identifiers[q]).generalize(d.row(r)[cols[q]], node.levels[q]));
    }
    groups[std::move(key)].push_back(r);
  }
  std::vector<EquivalenceClass> out;
  out.reserve(groups.size());
  for (auto& [key, rows] : groups) out.push_back({key, std::move(rows)});
  return out;
}

KAnonymityCheck is_k_anonymous(const Dataset& d, const AnonymizationConfig& config, const LatticeNode& node) {
  KAnonymityCheck check;
  for (const auto& cls : equivalence_classes(d, config, node)) {
    if (cls.rows.size() < config.k) check.min_suppression += cls.rows.size();
  }
  check.satisfiable = within_limit(check.min_suppression, config.suppression_limit, d.n());
  return check;
}

Dataset apply_generalization(const Dataset& d, const AnonymizationConfig& config, const LatticeNode& node) {
  check_node(config, node);
  std::vector<std::size_t> qi_cols;
  for (const auto& q : config.quasi_identifiers) qi_cols.push_back(d.index_of(q));
  std::vector<Row> rows = d.rows();
  for (auto& row : rows) {
    for (std::size_t q = 0; q < qi_cols.size(); ++q) {
      row[qi_cols[q]] = config.hierarchy(config.quasi_identifiers[q]).generalize(row[qi_cols[q]], node.levels[q]);
    }
    for (std::size_t j = 0; j < d.width(); ++j) {
      if (d.schema()[j].privacy_class == PrivacyClass::identifying) row[j] = std::string(kSuppressed);
    }
  }
  return d.with_rows(std::move(rows));
}

AnonymizationSolution anonymize(const Dataset& d, const AnonymizationConfig& config) {
  config.validate();
  if (d.n() < config.k) {
    throw InfeasibleError("dataset has " + std::to_string(d.n()) + " rows, fewer than k = " +
                          std::to_string(config.k));
  }
  const LatticeEvaluator evaluator(d, config);
  const auto ds = depths(config);
  const std::size_t dims = ds.size();

  // Node index = mixed radix over (depth + 1).
  std::size_t total = 1;
  for (std::size_t depth : ds) {
    if (__builtin_mul_overflow(total, depth + 1, &total) || total > (std::size_t{1} << 28)) {
      throw Error("generalization lattice too large to search");
    }
  }
  enum : std::uint8_t { kUnvisited, kUnsatisfiable, kSatisfiable, kDominated };
  std::vector<std::uint8_t> status(total, kUnvisited);
  std::vector<std::size_t> stride(dims, 1);
  for (std::size_t i = 1; i < dims; ++i) stride[i] = stride[i - 1] * (ds[i - 1] + 1);

  std::size_t max_height = 0;
  for (std::size_t depth : ds) max_height += depth;

  // Bucket node indices by height so every predecessor is settled first.
  std::vector<std::vector<std::size_t>> by_height(max_height + 1);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t h = 0, rest = idx;
    for (std::size_t i = 0; i < dims; ++i) {
      h += rest % (ds[i] + 1);
      rest /= ds[i] + 1;
    }
    by_height[h].push_back(idx);
  }

  std::optional<NodeCost> best;
  std::size_t evaluated = 0;
  LatticeNode node;
  node.levels.assign(dims, 0);
  for (const auto& layer : by_height) {
    for (std::size_t idx : layer) {
      std::size_t rest = idx;
      for (std::size_t i = 0; i < dims; ++i) {
        node.levels[i] = rest % (ds[i] + 1);
        rest /= ds[i] + 1;
      }
      bool dominated = false;
      for (std::size_t i = 0; i < dims && !dominated; ++i) {
        if (node.levels[i] == 0) continue;
        const auto s = status[idx - stride[i]];
        dominated = s == kSatisfiable || s == kDominated;
      }
      if (dominated) {
        status[idx] = kDominated;
        continue;
      }
      ++evaluated;
      const std::size_t suppressed = evaluator.min_suppression(node, config.k);
      if (!within_limit(suppressed, config.suppression_limit, d.n())) {
        status[idx] = kUnsatisfiable;
        continue;
      }
      status[idx] = kSatisfiable;
      auto cost = node_cost(config, node, suppressed);
      if (!best || cost < *best) best = std::move(cost);
    }
  }
  if (!best) throw InfeasibleError("no generalization satisfies k = " + std::to_string(config.k) +
                                   " within the suppression limit");

  AnonymizationSolution solution;
  solution.node = best->node;
  solution.cost = *best;
  solution.nodes_evaluated = evaluated;

  Dataset generalized = apply_generalization(d, config, solution.node);
  std::vector<Row> rows = generalized.rows();
  std::vector<std::size_t> qi_cols;
  for (const auto& q : config.quasi_identifiers) qi_cols.push_back(d.index_of(q));
  for (const auto& cls : equivalence_classes(d, config, solution.node)) {
    if (cls.rows.size() >= config.k) continue;
    for (std::size_t r : cls.rows) {
      solution.suppressed_rows.push_back(r);
      for (std::size_t c : qi_cols) rows[r][c] = std::string(kSuppressed);
    }
  }
  std::sort(solution.suppressed_rows.begin(), solution.suppressed_rows.end());
  solution.output = d.with_rows(std::move(rows));
  solution.suppressed_cell_fraction = suppressed_cell_fraction(solution, d);
  return solution;
}

double suppressed_cell_fraction(const AnonymizationSolution& s, const Dataset& d) {
  const std::size_t cells = d.n() * d.width();
  if (cells == 0) return 0.0;
  std::size_t starred = 0;
  for (const auto& row : s.output.rows()) {
    starred += static_cast<std::size_t>(std::count(row.begin(), row.end(), kSuppressed));
  }
  return static_cast<double>(starred) / static_cast<double>(cells);
}

}  // namespace petbench
