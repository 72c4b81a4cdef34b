#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace petbench {

/// Generalization ladder for one attribute.
///
/// Level 0 is the raw value, level depth() maps everything to "*" (unless the
/// ladder is the degenerate depth-0 identity). Partitions only merge going up:
/// values equal at level l stay equal at level l+1.
class Hierarchy {
 public:
  Hierarchy() = default;

  /// `table[i]` is the ladder of raw value `table[i][0]`; all rows share one arity.
  /// Throws ConsistencyError on conflicting duplicates and HierarchyError on a
  /// broken ladder.
  Hierarchy(std::string attribute, const std::vector<std::vector<std::string>>& table);

  const std::string& attribute() const { return attribute_; }
  std::size_t depth() const { return levels_.empty() ? 0 : levels_.size() - 1; }
  std::size_t domain_size() const { return domain().size(); }
  const std::vector<std::string>& domain() const { return levels_.front(); }

  bool contains(std::string_view value) const { return index_.contains(std::string(value)); }
  std::optional<std::size_t> value_index(std::string_view value) const;

  /// map_level(value). Throws DomainError / RangeError.
  const std::string& generalize(std::string_view value, std::size_t level) const;
  const std::string& at(std::size_t value_index, std::size_t level) const {
    return levels_[level][value_index];
  }

  /// Rows in domain order, one column per level.
  std::vector<std::vector<std::string>> table() const;

  friend bool operator==(const Hierarchy& a, const Hierarchy& b) {
    return a.attribute_ == b.attribute_ && a.levels_ == b.levels_;
  }

 private:
  std::string attribute_;
  std::vector<std::vector<std::string>> levels_;  // levels_[l][value index]
  std::unordered_map<std::string, std::size_t> index_;
};

Hierarchy parse_hierarchy(std::string_view text, std::string attribute, char delimiter = ';');
Hierarchy load_hierarchy(const std::filesystem::path& path, std::string attribute = {},
                         char delimiter = ';');
std::string to_text(const Hierarchy& h, char delimiter = ';');
void write_hierarchy(const Hierarchy& h, const std::filesystem::path& path, char delimiter = ';');

/// Zero-aligned equal-width interval ladder over numeric raw values.
/// Level l bins values by widths[l-1] as "[lo,hi)"; when a width does not
/// nest in the previous one, overlapping bins are merged so the ladder stays
/// coarsening. The top level is "*".
Hierarchy synthesize_interval_hierarchy(std::string attribute, std::span<const std::string> values,
                                        std::span<const double> widths);

/// Trailing-character masking ladder ("1013" -> "101*" -> "1***" -> "*").
/// Level l masks the last masked[l-1] characters; masked must be increasing.
Hierarchy synthesize_masking_hierarchy(std::string attribute, std::span<const std::string> values,
                                       std::span<const std::size_t> masked);

}  // namespace petbench
