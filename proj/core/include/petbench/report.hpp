#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "petbench/experiment.hpp"

namespace petbench {

struct DeviationRow {
  std::string variant;
  std::string model;
  std::optional<double> duration_pct;  ///< absent when the benchmark value is zero
  std::optional<double> energy_pct;
};

/// Percent change of each non-benchmark cell against the benchmark cell of
/// the same model: (variant - benchmark) / benchmark x 100.
/// Throws ReportError when no benchmark variant is present.
std::vector<DeviationRow> deviation_table(const BenchReport& r);

/// Percent change helper; nullopt when `benchmark` is (numerically) zero.
std::optional<double> percent_deviation(double variant, double benchmark);

std::string to_json(const BenchReport& r);
BenchReport report_from_json(const std::string& text);

enum class EmitFormat { json, csv_tables, scatter_csv };

/// Writes into `dir` (created when missing) and returns the files written:
/// json -> report.json; csv_tables -> table_preparation.csv, table_suppression.csv,
/// table_energy.csv, table_utest.csv, table_accuracy.csv; scatter_csv -> scatter.csv.
std::vector<std::filesystem::path> emit(const BenchReport& r, EmitFormat format, const std::filesystem::path& dir);

BenchReport load_report(const std::filesystem::path& path);

}  // namespace petbench
