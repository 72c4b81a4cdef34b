#include "petbench/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "petbench/dataset.hpp"
#include "petbench/error.hpp"

namespace petbench {

Hierarchy::Hierarchy(std::string attribute, const std::vector<std::vector<std::string>>& table)
    : attribute_(std::move(attribute)) {
  if (table.empty()) throw HierarchyError("hierarchy '" + attribute_ + "' has no values");
  const std::size_t arity = table.front().size();
  if (arity == 0) throw HierarchyError("hierarchy '" + attribute_ + "' has an empty row");
  levels_.assign(arity, {});

  for (std::size_t r = 0; r < table.size(); ++r) {
    const auto& row = table[r];
    if (row.size() != arity) {
      throw HierarchyError("hierarchy '" + attribute_ + "': row " + std::to_string(r + 1) + " has " +
                           std::to_string(row.size()) + " levels, expected " + std::to_string(arity));
    }
    auto [it, inserted] = index_.emplace(row[0], levels_[0].size());
    if (!inserted) {
      for (std::size_t l = 0; l < arity; ++l) {
        if (levels_[l][it->second] != row[l]) {
          throw ConsistencyError("hierarchy '" + attribute_ + "': value '" + row[0] +
                                 "' has conflicting generalizations");
        }
      }
      continue;
    }
    for (std::size_t l = 0; l < arity; ++l) levels_[l].push_back(row[l]);
  }

  const std::size_t top = arity - 1;
  if (top > 0) {
    for (const auto& v : levels_[top]) {
      if (v != kSuppressed) {
        throw HierarchyError("hierarchy '" + attribute_ + "': top level must be '*', found '" + v + "'");
      }
    }
  }
  for (std::size_t l = 0; l + 1 < arity; ++l) {
    std::unordered_map<std::string_view, std::string_view> up;
    for (std::size_t i = 0; i < levels_[l].size(); ++i) {
      auto [it, inserted] = up.emplace(levels_[l][i], levels_[l + 1][i]);
      if (!inserted && it->second != levels_[l + 1][i]) {
        throw HierarchyError("hierarchy '" + attribute_ + "': level " + std::to_string(l) + " group '" +
                             levels_[l][i] + "' splits at level " + std::to_string(l + 1));
      }
    }
  }
}

std::optional<std::size_t> Hierarchy::value_index(std::string_view value) const {
  auto it = index_.find(std::string(value));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Hierarchy::generalize(std::string_view value, std::size_t level) const {
  if (level > depth()) {
    throw RangeError("level " + std::to_string(level) + " exceeds depth " + std::to_string(depth()) +
                     " of hierarchy '" + attribute_ + "'");
  }
  auto i = value_index(value);
  if (!i) throw DomainError("value '" + std::string(value) + "' is not in hierarchy '" + attribute_ + "'");
  return levels_[level][*i];
}

std::vector<std::vector<std::string>> Hierarchy::table() const {
  std::vector<std::vector<std::string>> out(domain_size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (const auto& level : levels_) out[i].push_back(level[i]);
  }
  return out;
}

Hierarchy parse_hierarchy(std::string_view text, std::string attribute, char delimiter) {
  std::vector<std::vector<std::string>> table;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    table.push_back(parse_csv_line(line, delimiter));
  }
  return Hierarchy(std::move(attribute), table);
}

Hierarchy load_hierarchy(const std::filesystem::path& path, std::string attribute, char delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw HierarchyError("cannot open hierarchy file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (attribute.empty()) attribute = path.stem().string();
  return parse_hierarchy(buffer.str(), std::move(attribute), delimiter);
}

std::string to_text(const Hierarchy& h, char delimiter) {
  std::string out;
  for (const auto& row : h.table()) {
    for (std::size_t l = 0; l < row.size(); ++l) {
      if (l) out.push_back(delimiter);
      out += format_csv_field(row[l], delimiter);
    }
    out.push_back('\n');
  }
  return out;
}

void write_hierarchy(const Hierarchy& h, const std::filesystem::path& path, char delimiter) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw HierarchyError("cannot write hierarchy file '" + path.string() + "'");
  out << to_text(h, delimiter);
}

namespace {

std::vector<std::string> distinct(std::span<const std::string> values) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& v : values) {
    if (seen.insert(v).second) out.push_back(v);
  }
  return out;
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

Hierarchy synthesize_interval_hierarchy(std::string attribute, std::span<const std::string> values,
                                        std::span<const double> widths) {
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (!(widths[i] > 0.0)) throw HierarchyError("interval widths must be positive");
    if (i > 0 && !(widths[i] > widths[i - 1])) throw HierarchyError("interval widths must be strictly increasing");
  }
  const auto raw = distinct(values);
  if (raw.empty()) throw HierarchyError("hierarchy '" + attribute + "' has no values");
  std::vector<double> numeric(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto v = parse_number(raw[i]);
    if (!v) throw TypeError("value '" + raw[i] + "' of '" + attribute + "' is not numeric");
    numeric[i] = *v;
  }

  std::vector<std::vector<std::string>> table(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) table[i].push_back(raw[i]);

  // group id of each value at the previous level; level 0 groups by raw value
  std::vector<std::size_t> previous(raw.size());
  std::iota(previous.begin(), previous.end(), 0);

  for (double width : widths) {
    std::map<long long, std::size_t> bin_id;  // bin index -> dense id
    std::vector<long long> bins_of_value(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const auto b = static_cast<long long>(std::floor(numeric[i] / width));
      bins_of_value[i] = b;
      bin_id.emplace(b, 0);
    }
    std::vector<long long> bins;
    for (auto& [b, id] : bin_id) {
      id = bins.size();
      bins.push_back(b);
    }
    DisjointSets sets(bins.size());
    std::map<std::size_t, std::size_t> first_bin_of_group;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const std::size_t id = bin_id[bins_of_value[i]];
      auto [it, inserted] = first_bin_of_group.emplace(previous[i], id);
      if (!inserted) sets.unite(it->second, id);
    }
    std::map<std::size_t, std::pair<long long, long long>> extent;  // root -> (min bin, max bin)
    for (std::size_t id = 0; id < bins.size(); ++id) {
      const std::size_t root = sets.find(id);
      auto [it, inserted] = extent.emplace(root, std::make_pair(bins[id], bins[id]));
      if (!inserted) {
        it->second.first = std::min(it->second.first, bins[id]);
        it->second.second = std::max(it->second.second, bins[id]);
      }
    }
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const std::size_t root = sets.find(bin_id[bins_of_value[i]]);
      const auto [lo, hi] = extent[root];
      table[i].push_back("[" + format_number(static_cast<double>(lo) * width) + "," +
                         format_number(static_cast<double>(hi + 1) * width) + ")");
      previous[i] = root;
    }
  }
  for (auto& row : table) row.emplace_back(kSuppressed);
  return Hierarchy(std::move(attribute), table);
}

Hierarchy synthesize_masking_hierarchy(std::string attribute, std::span<const std::string> values,
                                       std::span<const std::size_t> masked) {
  for (std::size_t i = 0; i < masked.size(); ++i) {
    if (masked[i] == 0 || (i > 0 && masked[i] <= masked[i - 1])) {
      throw HierarchyError("masked character counts must be positive and strictly increasing");
    }
  }
  const auto raw = distinct(values);
  if (raw.empty()) throw HierarchyError("hierarchy '" + attribute + "' has no values");
  std::vector<std::vector<std::string>> table;
  for (const auto& v : raw) {
    std::vector<std::string> row{v};
    for (std::size_t count : masked) {
      const std::size_t keep = v.size() > count ? v.size() - count : 0;
      row.push_back(v.substr(0, keep) + std::string(v.size() - keep, '*'));
    }
    row.emplace_back(kSuppressed);
    table.push_back(std::move(row));
  }
  return Hierarchy(std::move(attribute), table);
}

}  // namespace petbench
