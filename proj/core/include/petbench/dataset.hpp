#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace petbench {

enum class AttributeKind { categorical, integer, continuous };

enum class PrivacyClass { insensitive, sensitive, identifying, quasi_identifying };

/// The generalized / suppressed cell marker.
inline constexpr std::string_view kSuppressed = "*";

struct AttributeSchema {
  std::string name;
  AttributeKind kind = AttributeKind::categorical;
  PrivacyClass privacy_class = PrivacyClass::insensitive;
  std::string missing_token = "?";

  bool is_numeric() const { return kind != AttributeKind::categorical; }
  friend bool operator==(const AttributeSchema&, const AttributeSchema&) = default;
};

using Row = std::vector<std::string>;

/// Immutable table of string cells with a typed schema and a label attribute.
class Dataset {
 public:
  Dataset() = default;
  /// Validates arity, unique names, and that `target` names a column.
  Dataset(std::vector<AttributeSchema> schema, std::vector<Row> rows, std::string target);

  const std::vector<AttributeSchema>& schema() const { return schema_; }
  const std::vector<Row>& rows() const { return rows_; }
  const Row& row(std::size_t i) const { return rows_[i]; }
  const std::string& target() const { return target_; }
  std::size_t n() const { return rows_.size(); }
  std::size_t width() const { return schema_.size(); }
  bool empty() const { return rows_.empty(); }

  /// Column index by name; throws SchemaError when absent.
  std::size_t index_of(std::string_view name) const;
  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t target_index() const { return index_of(target_); }
  const AttributeSchema& attribute(std::string_view name) const { return schema_[index_of(name)]; }

  /// New dataset holding the given rows (in the given order) of this one.
  Dataset subset(const std::vector<std::size_t>& indices) const;
  Dataset with_rows(std::vector<Row> rows) const;
  Dataset with_schema_and_rows(std::vector<AttributeSchema> schema, std::vector<Row> rows) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<AttributeSchema> schema_;
  std::vector<Row> rows_;
  std::string target_;
};

struct CsvOptions {
  char delimiter = ',';
  /// Strip ASCII whitespace around unquoted fields.
  bool trim = true;
};

/// Split one CSV record into fields (RFC-4180 quoting, doubled quotes escape).
std::vector<std::string> parse_csv_line(std::string_view line, char delimiter, bool trim = true);
std::string format_csv_field(std::string_view field, char delimiter);

/// Reads a headered CSV whose columns are a permutation of the schema names.
/// Columns are reordered to schema order; values are validated against kinds.
Dataset load_csv(const std::filesystem::path& path, const std::vector<AttributeSchema>& schema,
                 const std::string& target, const CsvOptions& options = {});

/// Same, reading from an in-memory buffer (used by tests and tools).
Dataset parse_csv(std::string_view text, const std::vector<AttributeSchema>& schema,
                  const std::string& target, const CsvOptions& options = {});

void write_csv(const Dataset& d, const std::filesystem::path& path, char delimiter = ',');
std::string to_csv(const Dataset& d, char delimiter = ',');

/// Drops every row with a cell equal to its attribute's missing token.
Dataset clean(const Dataset& d);

inline constexpr std::string_view kPass = "pass";
inline constexpr std::string_view kFail = "fail";

/// Replaces a numeric target by pass (>= threshold) / fail.
Dataset binarize_target(const Dataset& d, double threshold);

struct Split {
  Dataset train;
  Dataset test;
};

/// Stratified, seeded train/test partition with |test| = round(test_fraction * n).
Split split(const Dataset& d, double test_fraction, std::uint64_t seed);

/// Parses a cell of a numeric attribute; nullopt when it is not a finite number.
std::optional<double> parse_number(std::string_view s);
std::string format_number(double v);

std::string_view to_string(AttributeKind k);
std::string_view to_string(PrivacyClass c);
AttributeKind parse_attribute_kind(std::string_view s);
PrivacyClass parse_privacy_class(std::string_view s);

}  // namespace petbench
