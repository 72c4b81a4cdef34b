#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "petbench/dataset.hpp"
#include "petbench/encoding.hpp"
#include "petbench/energy.hpp"
#include "petbench/hierarchy.hpp"
#include "petbench/ml.hpp"
#include "petbench/synthesizer.hpp"

namespace petbench {

/// How to obtain the hierarchy of one quasi-identifier. Exactly one of the
/// three sources is set; interval and masking ladders are built from the
/// values present in the cleaned dataset.
struct HierarchySpec {
  std::filesystem::path file;
  std::vector<double> intervals;
  std::vector<std::size_t> masking;
};

struct DatasetConfig {
  std::string name;
  std::filesystem::path path;
  char delimiter = ',';
  std::string target;
  std::optional<std::string> positive_label;
  std::optional<double> binarize_threshold;
  std::vector<AttributeSchema> attributes;
  Encoder::Scaling scaling = Encoder::Scaling::standard;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  std::map<std::string, HierarchySpec> hierarchies;
  std::vector<std::size_t> k_values{3, 10, 27};
  double suppression_limit = 0.20;
  double test_fraction = 0.20;
  bool synthetic = true;
  SynthesizerConfig synthesizer;
  std::vector<ModelSpec> models;
  std::size_t replicates = 10;
  std::uint64_t seed = 42;
  ProbeConfig probe;
  std::size_t idle_replicates = 10;
  double idle_sleep_s = 1.0;
  std::filesystem::path output_dir = "results";

  /// Throws ConfigError on a violated invariant.
  void validate() const;
  /// Quasi-identifiers in schema order.
  std::vector<std::string> quasi_identifiers() const;
};

/// Relative paths inside the document resolve against `base_dir`.
ExperimentConfig parse_config(const std::string& yaml_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Loads and cleans the configured dataset, binarizing the target when asked.
Dataset load_dataset(const DatasetConfig& config);

/// Builds every configured hierarchy, using `d` for interval and masking ladders.
std::map<std::string, Hierarchy> build_hierarchies(const ExperimentConfig& config, const Dataset& d);

}  // namespace petbench
