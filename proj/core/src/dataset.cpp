#include "petbench/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "petbench/error.hpp"
#include "petbench/rng.hpp"

namespace petbench {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

// Splits a whole buffer into records. Quoted fields may span lines.
std::vector<Record> split_records(std::string_view text, char delimiter, bool trim) {
  std::vector<Record> out;
  std::size_t line = 1;
  std::size_t pos = 0;
  while (pos < text.size()) {
    Record rec;
    rec.line = line;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    bool end_of_record = false;
    auto push_field = [&] {
      if (was_quoted || !trim) {
        rec.fields.push_back(std::move(field));
      } else {
        rec.fields.emplace_back(trim_view(field));
      }
      field.clear();
      was_quoted = false;
    };
    while (pos < text.size() && !end_of_record) {
      const char c = text[pos++];
      if (quoted) {
        if (c == '"') {
          if (pos < text.size() && text[pos] == '"') {
            field.push_back('"');
            ++pos;
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
        }
        continue;
      }
      if (c == '"' && trim_view(field).empty()) {
        field.clear();
        quoted = true;
        was_quoted = true;
      } else if (c == delimiter) {
        push_field();
      } else if (c == '\n') {
        ++line;
        end_of_record = true;
      } else if (c == '\r') {
        // CRLF: swallowed, the '\n' ends the record.
      } else if (was_quoted) {
        if (!is_space(c)) throw ParseError("unexpected character after closing quote", rec.line);
      } else {
        field.push_back(c);
      }
    }
    if (quoted) throw ParseError("unterminated quoted field", rec.line);
    push_field();
    // Blank lines are not records.
    if (rec.fields.size() == 1 && rec.fields.front().empty()) continue;
    out.push_back(std::move(rec));
  }
  return out;
}

void check_unique_names(const std::vector<AttributeSchema>& schema) {
  std::set<std::string_view> seen;
  for (const auto& a : schema) {
    if (!seen.insert(a.name).second) throw SchemaError("duplicate attribute name '" + a.name + "'");
  }
}

}  // namespace

Dataset::Dataset(std::vector<AttributeSchema> schema, std::vector<Row> rows, std::string target)
    : schema_(std::move(schema)), rows_(std::move(rows)), target_(std::move(target)) {
  check_unique_names(schema_);
  if (!target_.empty() && !find(target_)) {
    throw SchemaError("target attribute '" + target_ + "' is not in the schema");
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].size() != schema_.size()) {
      throw SchemaError("row " + std::to_string(i) + " has " + std::to_string(rows_[i].size()) +
                        " values, schema has " + std::to_string(schema_.size()));
    }
  }
}

std::optional<std::size_t> Dataset::find(std::string_view name) const {
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    if (schema_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Dataset::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw SchemaError("unknown attribute '" + std::string(name) + "'");
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  std::vector<Row> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(rows_.at(i));
  return Dataset(schema_, std::move(out), target_);
}

Dataset Dataset::with_rows(std::vector<Row> rows) const {
  return Dataset(schema_, std::move(rows), target_);
}

Dataset Dataset::with_schema_and_rows(std::vector<AttributeSchema> schema,
                                      std::vector<Row> rows) const {
  return Dataset(std::move(schema), std::move(rows), target_);
}

std::vector<std::string> parse_csv_line(std::string_view line, char delimiter, bool trim) {
  auto records = split_records(line, delimiter, trim);
  if (records.empty()) return {""};
  return std::move(records.front().fields);
}

std::string format_csv_field(std::string_view field, char delimiter) {
  const bool needs_quotes =
      field.find_first_of(std::string{'"', '\n', '\r', delimiter}) != std::string_view::npos ||
      (!field.empty() && (is_space(field.front()) || is_space(field.back())));
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Dataset parse_csv(std::string_view text, const std::vector<AttributeSchema>& schema,
                  const std::string& target, const CsvOptions& options) {
  check_unique_names(schema);
  auto records = split_records(text, options.delimiter, options.trim);
  if (records.empty()) throw ParseError("missing header row", 1);

  const auto& header = records.front().fields;
  std::unordered_map<std::string, std::size_t> schema_pos;
  for (std::size_t i = 0; i < schema.size(); ++i) schema_pos.emplace(schema[i].name, i);

  // column_to_schema[c] = schema index of file column c
  std::vector<std::size_t> column_to_schema(header.size());
  std::vector<bool> covered(schema.size(), false);
  for (std::size_t c = 0; c < header.size(); ++c) {
    auto it = schema_pos.find(header[c]);
    if (it == schema_pos.end()) throw SchemaError("unknown column '" + header[c] + "' in header");
    if (covered[it->second]) throw SchemaError("column '" + header[c] + "' appears twice");
    covered[it->second] = true;
    column_to_schema[c] = it->second;
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (!covered[i]) throw SchemaError("schema attribute '" + schema[i].name + "' missing from header");
  }

  std::vector<Row> rows;
  rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " values, found " +
                           std::to_string(rec.fields.size()),
                       rec.line);
    }
    Row row(schema.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
      const auto& attr = schema[column_to_schema[c]];
      auto& value = rec.fields[c];
      if (attr.is_numeric() && value != attr.missing_token && !parse_number(value)) {
        throw ParseError("non-numeric value '" + value + "' for attribute '" + attr.name + "'",
                         rec.line);
      }
      row[column_to_schema[c]] = std::move(value);
    }
    rows.push_back(std::move(row));
  }
  return Dataset(schema, std::move(rows), target);
}

Dataset load_csv(const std::filesystem::path& path, const std::vector<AttributeSchema>& schema,
                 const std::string& target, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_csv(buffer.str(), schema, target, options);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string to_csv(const Dataset& d, char delimiter) {
  std::string out;
  auto append_row = [&](auto&& cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) out.push_back(delimiter);
      first = false;
      out += format_csv_field(c, delimiter);
    }
    out.push_back('\n');
  };
  std::vector<std::string> header;
  for (const auto& a : d.schema()) header.push_back(a.name);
  append_row(header);
  for (const auto& row : d.rows()) append_row(row);
  return out;
}

void write_csv(const Dataset& d, const std::filesystem::path& path, char delimiter) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << to_csv(d, delimiter);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

Dataset clean(const Dataset& d) {
  std::vector<Row> kept;
  kept.reserve(d.n());
  for (const auto& row : d.rows()) {
    bool missing = false;
    for (std::size_t j = 0; j < row.size() && !missing; ++j) {
      missing = row[j] == d.schema()[j].missing_token;
    }
    if (!missing) kept.push_back(row);
  }
  return d.with_rows(std::move(kept));
}

Dataset binarize_target(const Dataset& d, double threshold) {
  const std::size_t t = d.target_index();
  if (!d.schema()[t].is_numeric()) {
    throw TypeError("target '" + d.target() + "' is not numeric");
  }
  auto schema = d.schema();
  schema[t].kind = AttributeKind::categorical;
  std::vector<Row> rows = d.rows();
  for (auto& row : rows) {
    if (row[t] == schema[t].missing_token) continue;
    auto v = parse_number(row[t]);
    if (!v) throw TypeError("target value '" + row[t] + "' is not numeric");
    row[t] = std::string(*v >= threshold ? kPass : kFail);
  }
  return d.with_schema_and_rows(std::move(schema), std::move(rows));
}

Split split(const Dataset& d, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must lie strictly between 0 and 1");
  }
  const std::size_t t = d.target_index();
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < d.n(); ++i) by_class[d.row(i)[t]].push_back(i);

  const auto n = static_cast<double>(d.n());
  const auto total_test = static_cast<std::size_t>(std::llround(test_fraction * n));
  if (total_test == 0 || total_test == d.n()) {
    throw StratificationError("not enough rows (" + std::to_string(d.n()) +
                              ") for a two-sided split at test_fraction " + format_number(test_fraction));
  }

  // Largest-remainder apportionment of the test rows over the classes.
  struct Quota {
    std::vector<std::size_t>* members;
    std::size_t take;
    double remainder;
  };
  std::vector<Quota> quotas;
  std::size_t assigned = 0;
  for (auto& [label, members] : by_class) {
    const double q = test_fraction * static_cast<double>(members.size());
    const auto base = static_cast<std::size_t>(std::floor(q));
    quotas.push_back({&members, base, q - static_cast<double>(base)});
    assigned += base;
  }
  std::vector<std::size_t> order(quotas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return quotas[a].remainder > quotas[b].remainder; });
  for (std::size_t i = 0; assigned < total_test; ++i) {
    auto& q = quotas[order[i % order.size()]];
    if (q.take < q.members->size()) {
      ++q.take;
      ++assigned;
    }
  }

  Rng rng(seed);
  std::vector<std::size_t> test_idx;
  std::vector<std::size_t> train_idx;
  for (auto& q : quotas) {
    auto members = *q.members;
    rng.shuffle(std::span<std::size_t>(members));
    test_idx.insert(test_idx.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(q.take));
    train_idx.insert(train_idx.end(), members.begin() + static_cast<std::ptrdiff_t>(q.take), members.end());
  }
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  return {d.subset(train_idx), d.subset(test_idx)};
}

std::optional<double> parse_number(std::string_view s) {
  s = trim_view(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string_view to_string(AttributeKind k) {
  switch (k) {
    case AttributeKind::categorical: return "categorical";
    case AttributeKind::integer: return "integer";
    case AttributeKind::continuous: return "continuous";
  }
  return "?";
}

std::string_view to_string(PrivacyClass c) {
  switch (c) {
    case PrivacyClass::insensitive: return "insensitive";
    case PrivacyClass::sensitive: return "sensitive";
    case PrivacyClass::identifying: return "identifying";
    case PrivacyClass::quasi_identifying: return "quasi_identifying";
  }
  return "?";
}

AttributeKind parse_attribute_kind(std::string_view s) {
  if (s == "categorical") return AttributeKind::categorical;
  if (s == "integer") return AttributeKind::integer;
  if (s == "continuous") return AttributeKind::continuous;
  throw ConfigError("unknown attribute kind '" + std::string(s) + "'");
}

PrivacyClass parse_privacy_class(std::string_view s) {
  if (s == "insensitive") return PrivacyClass::insensitive;
  if (s == "sensitive") return PrivacyClass::sensitive;
  if (s == "identifying") return PrivacyClass::identifying;
  if (s == "quasi_identifying" || s == "quasi-identifying") return PrivacyClass::quasi_identifying;
  throw ConfigError("unknown privacy class '" + std::string(s) + "'");
}

}  // namespace petbench
