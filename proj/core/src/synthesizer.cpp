#include "petbench/synthesizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "petbench/error.hpp"

namespace petbench {

void SynthesizerConfig::validate() const {
  if (degree < 1) throw ConfigError("synthesizer degree must be at least 1");
  if (bins < 2) throw ConfigError("synthesizer bins must be at least 2");
  if (!(smoothing >= 0.0)) throw ConfigError("synthesizer smoothing must be nonnegative");
}

std::optional<std::size_t> DiscreteAttribute::code_of(const std::string& value) const {
  if (encoding == Encoding::categorical) {
    auto it = std::find(categories.begin(), categories.end(), value);
    if (it == categories.end()) return std::nullopt;
    return static_cast<std::size_t>(it - categories.begin());
  }
  auto v = parse_number(value);
  if (!v || *v < lo || *v > hi) return std::nullopt;
  const double width = (hi - lo) / static_cast<double>(bins);
  auto b = static_cast<std::size_t>(std::floor((*v - lo) / width));
  return std::min(b, bins - 1);
}

std::string DiscreteAttribute::decode(std::size_t code, Rng& rng) const {
  if (encoding == Encoding::categorical) return categories.at(code);
  const double width = (hi - lo) / static_cast<double>(bins);
  const double left = lo + width * static_cast<double>(code);
  const bool last = code + 1 == bins;
  const double right = last ? hi : lo + width * static_cast<double>(code + 1);
  if (integer) {
    const auto first = static_cast<long long>(std::ceil(left));
    auto final_value = last ? static_cast<long long>(std::floor(right)) : static_cast<long long>(std::ceil(right)) - 1;
    final_value = std::max(final_value, first);
    const auto span = static_cast<std::uint64_t>(final_value - first + 1);
    return std::to_string(first + static_cast<long long>(rng.below(span)));
  }
  return format_number(rng.uniform(left, right));
}

namespace {

std::vector<std::string> sorted_categories(const Dataset& d, std::size_t col, bool numeric) {
  std::set<std::string> distinct;
  for (const auto& row : d.rows()) distinct.insert(row[col]);
  std::vector<std::string> out(distinct.begin(), distinct.end());
  if (numeric) {
    std::stable_sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
      return *parse_number(a) < *parse_number(b);
    });
  }
  return out;
}

bool all_numeric(const Dataset& d, std::size_t col) {
  for (const auto& row : d.rows()) {
    if (!parse_number(row[col])) return false;
  }
  return true;
}

DiscreteTable build_table(const Dataset& d, std::vector<DiscreteAttribute> attributes) {
  DiscreteTable t;
  t.n = d.n();
  t.codes.assign(attributes.size(), std::vector<std::uint32_t>(d.n()));
  for (std::size_t j = 0; j < attributes.size(); ++j) {
    const auto& a = attributes[j];
    std::map<std::string, std::uint32_t> lookup;
    if (a.encoding == DiscreteAttribute::Encoding::categorical) {
      for (std::size_t c = 0; c < a.categories.size(); ++c) lookup.emplace(a.categories[c], static_cast<std::uint32_t>(c));
    }
    for (std::size_t r = 0; r < d.n(); ++r) {
      const auto& value = d.row(r)[j];
      if (a.encoding == DiscreteAttribute::Encoding::categorical) {
        auto it = lookup.find(value);
        if (it == lookup.end()) throw DomainError("value '" + value + "' outside the domain of '" + a.name + "'");
        t.codes[j][r] = it->second;
      } else {
        auto code = a.code_of(value);
        if (!code) throw DomainError("value '" + value + "' outside the range of '" + a.name + "'");
        t.codes[j][r] = static_cast<std::uint32_t>(*code);
      }
    }
  }
  t.attributes = std::move(attributes);
  return t;
}

// Joint counts of (a, tuple b): counts[b_index * |a| + a_code].
struct JointCounts {
  std::vector<double> counts;
  std::size_t a_domain = 0;
  std::size_t b_domain = 0;
};

JointCounts joint_counts(const DiscreteTable& t, std::size_t a, std::span<const std::size_t> b) {
  JointCounts jc;
  jc.a_domain = std::max<std::size_t>(t.attributes[a].domain_size(), 1);
  jc.b_domain = 1;
  for (std::size_t p : b) jc.b_domain *= std::max<std::size_t>(t.attributes[p].domain_size(), 1);
  jc.counts.assign(jc.a_domain * jc.b_domain, 0.0);
  for (std::size_t r = 0; r < t.n; ++r) {
    std::size_t idx = 0, stride = 1;
    for (std::size_t p : b) {
      idx += t.codes[p][r] * stride;
      stride *= std::max<std::size_t>(t.attributes[p].domain_size(), 1);
    }
    jc.counts[idx * jc.a_domain + t.codes[a][r]] += 1.0;
  }
  return jc;
}

}  // namespace

DiscreteTable discretize(const Dataset& d, std::size_t bins) {
  if (bins < 2) throw ConfigError("bins must be at least 2");
  std::vector<DiscreteAttribute> attributes;
  for (std::size_t j = 0; j < d.width(); ++j) {
    const auto& schema = d.schema()[j];
    DiscreteAttribute a;
    a.name = schema.name;
    a.integer = schema.kind == AttributeKind::integer;
    const bool numeric = schema.is_numeric() && all_numeric(d, j);
    auto categories = sorted_categories(d, j, numeric);
    const bool wide = numeric && (schema.kind == AttributeKind::continuous || categories.size() > bins);
    if (wide && categories.size() > 1) {
      a.encoding = DiscreteAttribute::Encoding::binned;
      a.bins = bins;
      a.lo = *parse_number(categories.front());
      a.hi = *parse_number(categories.back());
    } else {
      a.encoding = DiscreteAttribute::Encoding::categorical;
      a.categories = std::move(categories);
    }
    attributes.push_back(std::move(a));
  }
  return build_table(d, std::move(attributes));
}

DiscreteTable discretize_as_categories(const Dataset& d) {
  std::vector<DiscreteAttribute> attributes;
  for (std::size_t j = 0; j < d.width(); ++j) {
    DiscreteAttribute a;
    a.name = d.schema()[j].name;
    a.categories = sorted_categories(d, j, false);
    attributes.push_back(std::move(a));
  }
  return build_table(d, std::move(attributes));
}

double entropy(const DiscreteTable& t, std::size_t a) {
  if (t.n == 0) throw Error("entropy of an empty table is undefined");
  std::vector<double> counts(std::max<std::size_t>(t.attributes[a].domain_size(), 1), 0.0);
  for (auto c : t.codes[a]) counts[c] += 1.0;
  const double n = static_cast<double>(t.n);
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) h -= c / n * std::log2(c / n);
  }
  return h;
}

double mutual_information(const DiscreteTable& t, std::size_t a, std::span<const std::size_t> b) {
  if (b.empty()) throw std::invalid_argument("mutual information needs a nonempty conditioning set");
  if (t.n == 0) throw Error("mutual information of an empty table is undefined");
  const auto jc = joint_counts(t, a, b);
  std::vector<double> pa(jc.a_domain, 0.0), pb(jc.b_domain, 0.0);
  for (std::size_t y = 0; y < jc.b_domain; ++y) {
    for (std::size_t x = 0; x < jc.a_domain; ++x) {
      const double c = jc.counts[y * jc.a_domain + x];
      pa[x] += c;
      pb[y] += c;
    }
  }
  const double n = static_cast<double>(t.n);
  double mi = 0.0;
  for (std::size_t y = 0; y < jc.b_domain; ++y) {
    if (pb[y] == 0.0) continue;
    for (std::size_t x = 0; x < jc.a_domain; ++x) {
      const double c = jc.counts[y * jc.a_domain + x];
      if (c == 0.0) continue;
      mi += c / n * std::log2(c * n / (pa[x] * pb[y]));
    }
  }
  return std::max(mi, 0.0);
}

double mutual_information(const Dataset& d, const std::string& a, const std::vector<std::string>& b) {
  const auto t = discretize_as_categories(d);
  std::vector<std::size_t> parents;
  for (const auto& name : b) parents.push_back(d.index_of(name));
  return mutual_information(t, d.index_of(a), parents);
}

std::size_t ConditionalTable::row_index(std::span<const std::uint32_t> codes_by_attribute) const {
  std::size_t idx = 0, stride = 1;
  for (std::size_t i = 0; i < parents.size(); ++i) {
    idx += codes_by_attribute[parents[i]] * stride;
    stride *= parent_domain[i];
  }
  return idx;
}

namespace {

// All size-k subsets of `pool` (already in preferred order), lexicographic.
void for_each_subset(const std::vector<std::size_t>& pool, std::size_t k,
                     const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  std::vector<std::size_t> subset(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) subset[i] = pool[pick[i]];
    visit(subset);
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == pool.size() - k + (i - 1)) --i;
    if (i == 0) return;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

}  // namespace

BayesianNetwork greedy_bayes(const DiscreteTable& t, std::size_t degree) {
  if (degree < 1) throw ConfigError("degree must be at least 1");
  const std::size_t m = t.attributes.size();
  if (m == 0) throw SchemaError("cannot learn a network over zero attributes");

  BayesianNetwork net;
  net.attributes = t.attributes;
  net.parents.assign(m, {});
  net.selection_score.assign(m, 0.0);

  // Candidate order: lexicographic by attribute name.
  std::vector<std::size_t> by_name(m);
  std::iota(by_name.begin(), by_name.end(), 0);
  std::stable_sort(by_name.begin(), by_name.end(),
                   [&](std::size_t a, std::size_t b) { return t.attributes[a].name < t.attributes[b].name; });
  constexpr double kTieTolerance = 1e-12;

  std::size_t root = by_name.front();
  if (t.n > 0) {
    double best_h = -1.0;
    for (std::size_t a : by_name) {
      const double h = entropy(t, a);
      if (h > best_h + kTieTolerance) {
        best_h = h;
        root = a;
      }
    }
    net.selection_score[root] = best_h;
  }
  net.order.push_back(root);
  std::vector<bool> placed(m, false);
  placed[root] = true;

  while (net.order.size() < m) {
    std::vector<std::size_t> pool;  // placed attributes, name order
    for (std::size_t a : by_name) {
      if (placed[a]) pool.push_back(a);
    }
    const std::size_t k = std::min(degree, pool.size());
    double best_mi = -1.0;
    std::size_t best_child = m;
    std::vector<std::size_t> best_parents;
    for (std::size_t child : by_name) {
      if (placed[child]) continue;
      for_each_subset(pool, k, [&](const std::vector<std::size_t>& parents) {
        const double mi = t.n > 0 ? mutual_information(t, child, parents) : 0.0;
        if (mi > best_mi + kTieTolerance) {
          best_mi = mi;
          best_child = child;
          best_parents = parents;
        }
      });
    }
    net.order.push_back(best_child);
    net.parents[best_child] = best_parents;
    net.selection_score[best_child] = best_mi;
    placed[best_child] = true;
  }
  return net;
}

BayesianNetwork greedy_bayes(const Dataset& d, const SynthesizerConfig& config) {
  config.validate();
  auto net = greedy_bayes(discretize(d, config.bins), config.degree);
  net.schema = d.schema();
  net.target = d.target();
  net.source_rows = d.n();
  return net;
}

BayesianNetwork fit_cpts(const Dataset& d, BayesianNetwork net, double smoothing) {
  if (!(smoothing >= 0.0)) throw ConfigError("smoothing must be nonnegative");
  const DiscreteTable t = build_table(d, net.attributes);
  const std::size_t m = net.attributes.size();
  net.cpts.assign(m, {});
  for (std::size_t a = 0; a < m; ++a) {
    ConditionalTable cpt;
    cpt.parents = net.parents[a];
    cpt.child_domain = std::max<std::size_t>(net.attributes[a].domain_size(), 1);
    std::size_t rows = 1;
    for (std::size_t p : cpt.parents) {
      cpt.parent_domain.push_back(std::max<std::size_t>(net.attributes[p].domain_size(), 1));
      rows *= cpt.parent_domain.back();
    }
    std::vector<double> counts(rows * cpt.child_domain, 0.0);
    std::vector<std::uint32_t> codes(m);
    for (std::size_t r = 0; r < t.n; ++r) {
      for (std::size_t p : cpt.parents) codes[p] = t.codes[p][r];
      counts[cpt.row_index(codes) * cpt.child_domain + t.codes[a][r]] += 1.0;
    }
    cpt.probabilities.assign(counts.size(), 0.0);
    for (std::size_t row = 0; row < rows; ++row) {
      double total = 0.0;
      for (std::size_t c = 0; c < cpt.child_domain; ++c) total += counts[row * cpt.child_domain + c] + smoothing;
      for (std::size_t c = 0; c < cpt.child_domain; ++c) {
        cpt.probabilities[row * cpt.child_domain + c] =
            total > 0.0 ? (counts[row * cpt.child_domain + c] + smoothing) / total
                        : 1.0 / static_cast<double>(cpt.child_domain);
      }
    }
    net.cpts[a] = std::move(cpt);
  }
  net.source_rows = d.n();
  if (net.schema.empty()) {
    net.schema = d.schema();
    net.target = d.target();
  }
  return net;
}

Dataset sample(const BayesianNetwork& net, const SynthesizerConfig& config) {
  if (!net.fitted()) throw Error("network has no fitted CPTs");
  const std::size_t n_out = config.n_out.value_or(net.source_rows);
  const std::size_t m = net.attributes.size();
  Rng rng(config.seed);
  std::vector<Row> rows;
  rows.reserve(n_out);
  std::vector<std::uint32_t> codes(m);
  for (std::size_t r = 0; r < n_out; ++r) {
    for (std::size_t a : net.order) {
      const auto& cpt = net.cpts[a];
      codes[a] = static_cast<std::uint32_t>(rng.categorical(cpt.row(cpt.row_index(codes))));
    }
    Row row(m);
    for (std::size_t a : net.order) row[a] = net.attributes[a].decode(codes[a], rng);
    rows.push_back(std::move(row));
  }
  return Dataset(net.schema, std::move(rows), net.target);
}

Dataset synthesize(const Dataset& d, const SynthesizerConfig& config, BayesianNetwork* network_out) {
  auto net = fit_cpts(d, greedy_bayes(d, config), config.smoothing);
  auto out = sample(net, config);
  if (network_out) *network_out = std::move(net);
  return out;
}

std::string describe(const BayesianNetwork& net) {
  using nlohmann::json;
  json j;
  j["source_rows"] = net.source_rows;
  json order = json::array();
  for (std::size_t a : net.order) order.push_back(net.attributes[a].name);
  j["order"] = order;
  json nodes = json::array();
  for (std::size_t a : net.order) {
    const auto& attr = net.attributes[a];
    json node;
    node["attribute"] = attr.name;
    node["encoding"] = attr.encoding == DiscreteAttribute::Encoding::binned ? "binned" : "categorical";
    node["domain_size"] = attr.domain_size();
    if (attr.encoding == DiscreteAttribute::Encoding::binned) {
      node["range"] = {attr.lo, attr.hi};
    }
    json parents = json::array();
    for (std::size_t p : net.parents[a]) parents.push_back(net.attributes[p].name);
    node["parents"] = parents;
    node["mutual_information"] = net.selection_score[a];
    if (net.fitted()) node["cpt_shape"] = {net.cpts[a].rows(), net.cpts[a].child_domain};
    nodes.push_back(node);
  }
  j["nodes"] = nodes;
  return j.dump(2) + "\n";
}

}  // namespace petbench
