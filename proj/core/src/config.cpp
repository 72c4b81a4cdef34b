#include "petbench/config.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>

#include <yaml-cpp/yaml.h>

#include "petbench/error.hpp"

namespace petbench {

namespace fs = std::filesystem;

namespace {

template <class T>
T get(const YAML::Node& node, const std::string& key, T fallback) {
  const auto child = node[key];
  if (!child) return fallback;
  try {
    return child.as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

template <class T>
T require(const YAML::Node& node, const std::string& key) {
  const auto child = node[key];
  if (!child) throw ConfigError("missing key '" + key + "'");
  try {
    return child.as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  if (path.is_absolute() || base.empty()) return path;
  return (base / path).lexically_normal();
}

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

ModelSpec parse_model(const YAML::Node& node) {
  ModelSpec spec;
  if (node.IsScalar()) {
    spec.kind = parse_model_kind(node.as<std::string>());
    return spec;
  }
  check_keys(node, {"kind", "k", "learning_rate", "epochs", "l2", "hidden", "batch_size", "seed"}, "model");
  try {
    spec.kind = parse_model_kind(require<std::string>(node, "kind"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  switch (spec.kind) {
    case ModelKind::knn:
      spec.knn.k = get<std::size_t>(node, "k", spec.knn.k);
      break;
    case ModelKind::logreg:
      spec.logreg.learning_rate = get<double>(node, "learning_rate", spec.logreg.learning_rate);
      spec.logreg.epochs = get<std::size_t>(node, "epochs", spec.logreg.epochs);
      spec.logreg.l2 = get<double>(node, "l2", spec.logreg.l2);
      break;
    case ModelKind::nn:
      spec.nn.hidden = get<std::vector<std::size_t>>(node, "hidden", spec.nn.hidden);
      spec.nn.epochs = get<std::size_t>(node, "epochs", spec.nn.epochs);
      spec.nn.batch_size = get<std::size_t>(node, "batch_size", spec.nn.batch_size);
      spec.nn.learning_rate = get<double>(node, "learning_rate", spec.nn.learning_rate);
      spec.nn.seed = get<std::uint64_t>(node, "seed", spec.nn.seed);
      break;
  }
  return spec;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (dataset.path.empty()) throw ConfigError("dataset.path is required");
  if (dataset.target.empty()) throw ConfigError("dataset.target is required");
  if (dataset.attributes.empty()) throw ConfigError("dataset.attributes is empty");
  if (k_values.empty()) throw ConfigError("k_values must not be empty");
  for (auto k : k_values) {
    if (k < 2) throw ConfigError("every k must be at least 2");
  }
  if (replicates < 1) throw ConfigError("replicates must be at least 1");
  if (idle_replicates < 1) throw ConfigError("idle_replicates must be at least 1");
  if (!(idle_sleep_s > 0.0)) throw ConfigError("idle_sleep_s must be positive");
  if (!(suppression_limit >= 0.0 && suppression_limit <= 1.0)) throw ConfigError("suppression_limit must lie in [0,1]");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test_fraction must lie in (0,1)");
  if (models.empty()) throw ConfigError("models must not be empty");
  for (const auto& m : models) {
    try {
      m.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  try {
    synthesizer.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (const auto& qi : quasi_identifiers()) {
    if (!hierarchies.contains(qi)) throw ConfigError("quasi-identifier '" + qi + "' has no hierarchy");
  }
  for (const auto& [name, h] : hierarchies) {
    const int sources = !h.file.empty() + !h.intervals.empty() + !h.masking.empty();
    if (sources != 1) throw ConfigError("hierarchy '" + name + "' needs exactly one of file, intervals, masking");
  }
}

std::vector<std::string> ExperimentConfig::quasi_identifiers() const {
  std::vector<std::string> out;
  for (const auto& a : dataset.attributes) {
    if (a.privacy_class == PrivacyClass::quasi_identifying) out.push_back(a.name);
  }
  return out;
}

ExperimentConfig parse_config(const std::string& yaml_text, const fs::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config must be a mapping");
  check_keys(root,
             {"dataset", "hierarchies", "k_values", "suppression_limit", "test_fraction", "synthetic", "synthesizer",
              "models", "replicates", "seed", "probe", "idle_replicates", "idle_sleep_s", "output_dir"},
             "config");

  ExperimentConfig c;
  const auto ds = root["dataset"];
  if (!ds || !ds.IsMap()) throw ConfigError("missing 'dataset' section");
  check_keys(ds, {"name", "path", "delimiter", "target", "positive_label", "binarize_threshold", "scaling", "attributes"},
             "dataset");
  c.dataset.path = resolve(base_dir, require<std::string>(ds, "path"));
  c.dataset.name = get<std::string>(ds, "name", c.dataset.path.stem().string());
  const auto delim = get<std::string>(ds, "delimiter", ",");
  if (delim.size() != 1) throw ConfigError("delimiter must be one character");
  c.dataset.delimiter = delim[0];
  c.dataset.target = require<std::string>(ds, "target");
  if (ds["positive_label"]) c.dataset.positive_label = require<std::string>(ds, "positive_label");
  if (ds["binarize_threshold"]) c.dataset.binarize_threshold = require<double>(ds, "binarize_threshold");
  const auto scaling = get<std::string>(ds, "scaling", "standard");
  if (scaling == "standard") {
    c.dataset.scaling = Encoder::Scaling::standard;
  } else if (scaling == "minmax") {
    c.dataset.scaling = Encoder::Scaling::min_max;
  } else {
    throw ConfigError("dataset.scaling must be standard or minmax");
  }
  const auto attrs = ds["attributes"];
  if (!attrs || !attrs.IsSequence()) throw ConfigError("dataset.attributes must be a list");
  for (const auto& a : attrs) {
    check_keys(a, {"name", "kind", "privacy", "missing"}, "attribute");
    AttributeSchema s;
    s.name = require<std::string>(a, "name");
    try {
      s.kind = parse_attribute_kind(get<std::string>(a, "kind", "categorical"));
      s.privacy_class = parse_privacy_class(get<std::string>(a, "privacy", "insensitive"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(s.name + ": " + e.what());
    }
    s.missing_token = get<std::string>(a, "missing", s.missing_token);
    c.dataset.attributes.push_back(std::move(s));
  }

  if (const auto hs = root["hierarchies"]) {
    if (!hs.IsMap()) throw ConfigError("hierarchies must be a mapping");
    for (const auto& kv : hs) {
      const auto name = kv.first.as<std::string>();
      HierarchySpec h;
      if (kv.second.IsScalar()) {
        h.file = resolve(base_dir, kv.second.as<std::string>());
      } else {
        check_keys(kv.second, {"file", "intervals", "masking"}, "hierarchy '" + name + "'");
        if (kv.second["file"]) h.file = resolve(base_dir, require<std::string>(kv.second, "file"));
        h.intervals = get<std::vector<double>>(kv.second, "intervals", {});
        h.masking = get<std::vector<std::size_t>>(kv.second, "masking", {});
      }
      c.hierarchies.emplace(name, std::move(h));
    }
  }

  c.k_values = get<std::vector<std::size_t>>(root, "k_values", c.k_values);
  c.suppression_limit = get<double>(root, "suppression_limit", c.suppression_limit);
  c.test_fraction = get<double>(root, "test_fraction", c.test_fraction);
  c.synthetic = get<bool>(root, "synthetic", c.synthetic);
  c.replicates = get<std::size_t>(root, "replicates", c.replicates);
  c.seed = get<std::uint64_t>(root, "seed", c.seed);
  c.idle_replicates = get<std::size_t>(root, "idle_replicates", c.idle_replicates);
  c.idle_sleep_s = get<double>(root, "idle_sleep_s", c.idle_sleep_s);
  c.output_dir = resolve(base_dir, get<std::string>(root, "output_dir", c.output_dir.string()));

  if (const auto sn = root["synthesizer"]) {
    check_keys(sn, {"degree", "bins", "smoothing", "seed", "n_out"}, "synthesizer");
    c.synthesizer.degree = get<std::size_t>(sn, "degree", c.synthesizer.degree);
    c.synthesizer.bins = get<std::size_t>(sn, "bins", c.synthesizer.bins);
    c.synthesizer.smoothing = get<double>(sn, "smoothing", c.synthesizer.smoothing);
    c.synthesizer.seed = get<std::uint64_t>(sn, "seed", c.seed);
    if (sn["n_out"]) c.synthesizer.n_out = require<std::size_t>(sn, "n_out");
  } else {
    c.synthesizer.seed = c.seed;
  }

  if (const auto ms = root["models"]) {
    if (!ms.IsSequence()) throw ConfigError("models must be a list");
    for (const auto& m : ms) c.models.push_back(parse_model(m));
  } else {
    for (auto kind : {ModelKind::knn, ModelKind::logreg, ModelKind::nn}) {
      ModelSpec s;
      s.kind = kind;
      c.models.push_back(s);
    }
  }

  if (const auto p = root["probe"]) {
    if (p.IsScalar()) {
      c.probe = parse_probe_spec(p.as<std::string>());
    } else {
      check_keys(p, {"kind", "watts", "trace", "clock", "powercap_root", "max_range_uj"}, "probe");
      const auto kind = get<std::string>(p, "kind", "simulated");
      if (kind == "hardware") {
        c.probe.kind = ProbeConfig::Kind::hardware;
      } else if (kind == "simulated") {
        c.probe.kind = ProbeConfig::Kind::simulated;
      } else {
        throw ConfigError("probe.kind must be hardware or simulated");
      }
      c.probe.watts = get<double>(p, "watts", c.probe.watts);
      if (p["trace"]) c.probe.trace = resolve(base_dir, require<std::string>(p, "trace"));
      const auto clock = get<std::string>(p, "clock", "virtual");
      if (clock != "virtual" && clock != "wall") throw ConfigError("probe.clock must be virtual or wall");
      c.probe.virtual_clock = clock == "virtual";
      c.probe.powercap_root = get<std::string>(p, "powercap_root", c.probe.powercap_root.string());
      c.probe.max_range_uj = get<std::uint64_t>(p, "max_range_uj", c.probe.max_range_uj);
    }
  }

  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text, path.parent_path());
}

Dataset load_dataset(const DatasetConfig& config) {
  CsvOptions options;
  options.delimiter = config.delimiter;
  Dataset d = clean(load_csv(config.path, config.attributes, config.target, options));
  if (config.binarize_threshold) d = binarize_target(d, *config.binarize_threshold);
  return d;
}

std::map<std::string, Hierarchy> build_hierarchies(const ExperimentConfig& config, const Dataset& d) {
  std::map<std::string, Hierarchy> out;
  for (const auto& [name, spec] : config.hierarchies) {
    if (!spec.file.empty()) {
      out.emplace(name, load_hierarchy(spec.file, name));
      continue;
    }
    const auto col = d.index_of(name);
    std::set<std::string> distinct;
    for (const auto& row : d.rows()) distinct.insert(row[col]);
    const std::vector<std::string> values(distinct.begin(), distinct.end());
    if (!spec.intervals.empty()) {
      out.emplace(name, synthesize_interval_hierarchy(name, values, spec.intervals));
    } else {
      out.emplace(name, synthesize_masking_hierarchy(name, values, spec.masking));
    }
  }
  return out;
}

}  // namespace petbench
