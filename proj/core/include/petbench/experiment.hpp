#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "petbench/config.hpp"
#include "petbench/energy.hpp"
#include "petbench/stats.hpp"

namespace petbench {

/// One data variant: the untouched training split, a k-anonymised copy, or a synthetic copy.
struct VariantResult {
  std::string name;                              ///< "benchmark", "k=3", ..., "synthetic"
  std::optional<std::size_t> k;
  std::size_t train_rows = 0;
  std::optional<Measurement> preparation;        ///< absent for the benchmark
  std::optional<double> suppressed_cell_fraction;
  std::optional<std::size_t> suppressed_rows;
  std::vector<std::size_t> node;                 ///< chosen generalization levels, k-anon only
  std::optional<std::string> error;

  friend bool operator==(const VariantResult&, const VariantResult&) = default;
};

struct CellResult {
  std::string variant;
  std::string model;
  std::vector<Measurement> replicates;
  std::vector<double> accuracies;
  double mean_accuracy = 0.0;
  EnergySummary energy;
  std::optional<std::string> error;

  bool ok() const { return !error.has_value(); }
  friend bool operator==(const CellResult&, const CellResult&) = default;
};

/// Net energy of `row` tested as greater than that of `column` for one model.
struct PairwiseTest {
  std::string model;
  std::string row;
  std::string column;
  UTestResult result;

  friend bool operator==(const PairwiseTest&, const PairwiseTest&) = default;
};

struct BenchReport {
  std::string dataset;
  std::string probe;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  IdleBaseline idle;
  std::vector<VariantResult> variants;
  std::vector<CellResult> cells;
  std::vector<PairwiseTest> tests;

  /// True when every variant was prepared and every cell finished.
  bool complete() const;
  const CellResult* cell(const std::string& variant, const std::string& model) const;
  const VariantResult* variant(const std::string& name) const;
  friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

std::string variant_name(std::size_t k);

/// Progress callback: receives a one-line status message.
using ProgressFn = std::function<void(const std::string&)>;

/// clean -> split -> {benchmark, k-anonymised per k, synthetic} -> per variant
/// and model, `replicates` measured train+predict runs. Stage errors are
/// recorded against the affected variant or cell; the rest continue.
BenchReport run_experiment(const ExperimentConfig& config, const ProgressFn& progress = {});

/// Same, with an existing meter (its probe overrides config.probe).
BenchReport run_experiment(const ExperimentConfig& config, EnergyMeter& meter, const ProgressFn& progress = {});

/// One-sided tests of every ordered variant pair per model, on net energy.
std::vector<PairwiseTest> pairwise_tests(const std::vector<CellResult>& cells, const std::vector<std::string>& variant_order);

}  // namespace petbench
