#include "petbench/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <utility>

#include "petbench/anonymizer.hpp"
#include "petbench/encoding.hpp"
#include "petbench/error.hpp"
#include "petbench/ml.hpp"
#include "petbench/synthesizer.hpp"

namespace petbench {

namespace {

struct PreparedVariant {
  VariantResult result;
  Dataset train;
  Dataset test;
};

void say(const ProgressFn& progress, const std::string& msg) {
  if (progress) progress(msg);
}

CellResult run_cell(const ExperimentConfig& config, EnergyMeter& meter, const IdleBaseline& idle,
                    const PreparedVariant& v, const ModelSpec& base) {
  CellResult cell;
  cell.variant = v.result.name;
  cell.model = base.name();
  try {
    const Encoder encoder = Encoder::fit(v.train, config.dataset.positive_label, config.dataset.scaling);
    const EncodedData train_data = encoder.transform(v.train);
    const EncodedData test_data = encoder.transform(v.test);
    for (std::size_t r = 0; r < config.replicates; ++r) {
      ModelSpec spec = base;
      spec.nn.seed = config.seed + r;
      Labels predicted;
      auto m = meter.measure(
          [&] {
            const auto model = train(spec, train_data);
            predicted = predict(*model, test_data.features);
          },
          cell.variant + "/" + cell.model, r);
      cell.replicates.push_back(with_baseline(std::move(m), idle));
      cell.accuracies.push_back(accuracy(predicted, test_data.labels));
    }
    double sum = 0.0;
    for (double a : cell.accuracies) sum += a;
    cell.mean_accuracy = sum / static_cast<double>(cell.accuracies.size());
    cell.energy = aggregate(cell.replicates);
  } catch (const std::exception& e) {
    cell.error = e.what();
    cell.replicates.clear();
    cell.accuracies.clear();
    cell.mean_accuracy = 0.0;
    cell.energy = {};
  }
  return cell;
}

}  // namespace

std::string variant_name(std::size_t k) { return "k=" + std::to_string(k); }

bool BenchReport::complete() const {
  for (const auto& v : variants) {
    if (v.error) return false;
  }
  for (const auto& c : cells) {
    if (c.error) return false;
  }
  return true;
}

const CellResult* BenchReport::cell(const std::string& variant_name, const std::string& model) const {
  for (const auto& c : cells) {
    if (c.variant == variant_name && c.model == model) return &c;
  }
  return nullptr;
}

const VariantResult* BenchReport::variant(const std::string& name) const {
  for (const auto& v : variants) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

std::vector<PairwiseTest> pairwise_tests(const std::vector<CellResult>& cells, const std::vector<std::string>& variant_order) {
  std::vector<std::string> models;
  for (const auto& c : cells) {
    if (std::find(models.begin(), models.end(), c.model) == models.end()) models.push_back(c.model);
  }
  auto find = [&](const std::string& variant, const std::string& model) -> const CellResult* {
    for (const auto& c : cells) {
      if (c.variant == variant && c.model == model && c.ok() && !c.replicates.empty()) return &c;
    }
    return nullptr;
  };
  auto energies = [](const CellResult& c) {
    std::vector<double> e;
    for (const auto& m : c.replicates) e.push_back(m.net_energy_j);
    return e;
  };

  std::vector<PairwiseTest> out;
  for (const auto& model : models) {
    for (const auto& row : variant_order) {
      for (const auto& column : variant_order) {
        if (row == column) continue;
        const auto* a = find(row, model);
        const auto* b = find(column, model);
        if (!a || !b) continue;
        const auto ea = energies(*a);
        const auto eb = energies(*b);
        out.push_back({model, row, column, mann_whitney_u(ea, eb, Alternative::greater)});
      }
    }
  }
  return out;
}

BenchReport run_experiment(const ExperimentConfig& config, const ProgressFn& progress) {
  EnergyMeter meter(make_probe(config.probe));
  return run_experiment(config, meter, progress);
}

BenchReport run_experiment(const ExperimentConfig& config, EnergyMeter& meter, const ProgressFn& progress) {
  config.validate();
  BenchReport report;
  report.dataset = config.dataset.name;
  report.probe = meter.probe().description();
  report.replicates = config.replicates;
  report.seed = config.seed;

  say(progress, "loading " + config.dataset.path.string());
  const Dataset data = load_dataset(config.dataset);
  const Split parts = split(data, config.test_fraction, config.seed);
  report.train_rows = parts.train.n();
  report.test_rows = parts.test.n();

  say(progress, "measuring idle baseline");
  const auto sleep = std::chrono::duration_cast<Nanoseconds>(std::chrono::duration<double>(config.idle_sleep_s));
  report.idle = meter.idle_baseline(config.idle_replicates, sleep);

  std::vector<PreparedVariant> variants;
  {
    PreparedVariant bench{{}, parts.train, parts.test};
    bench.result.name = "benchmark";
    bench.result.train_rows = parts.train.n();
    variants.push_back(std::move(bench));
  }

  std::map<std::string, Hierarchy> hierarchies;
  std::optional<std::string> hierarchy_error;
  try {
    hierarchies = build_hierarchies(config, data);
  } catch (const std::exception& e) {
    hierarchy_error = e.what();
  }

  for (const auto k : config.k_values) {
    PreparedVariant v;
    v.result.name = variant_name(k);
    v.result.k = k;
    say(progress, "anonymizing " + v.result.name);
    try {
      if (hierarchy_error) throw HierarchyError(*hierarchy_error);
      AnonymizationConfig ac;
      ac.k = k;
      ac.suppression_limit = config.suppression_limit;
      ac.quasi_identifiers = config.quasi_identifiers();
      ac.hierarchies = hierarchies;
      std::optional<AnonymizationSolution> solution;
      auto m = meter.measure([&] { solution = anonymize(parts.train, ac); }, "prepare/" + v.result.name);
      v.result.preparation = with_baseline(std::move(m), report.idle);
      v.result.suppressed_cell_fraction = solution->suppressed_cell_fraction;
      v.result.suppressed_rows = solution->suppressed_rows.size();
      v.result.node = solution->node.levels;
      v.test = apply_generalization(parts.test, ac, solution->node);
      v.train = std::move(solution->output);
      v.result.train_rows = v.train.n();
    } catch (const std::exception& e) {
      v.result = VariantResult{};
      v.result.name = variant_name(k);
      v.result.k = k;
      v.result.error = e.what();
    }
    variants.push_back(std::move(v));
  }

  if (config.synthetic) {
    PreparedVariant v;
    v.result.name = "synthetic";
    say(progress, "synthesizing");
    try {
      SynthesizerConfig sc = config.synthesizer;
      if (!sc.n_out) sc.n_out = parts.train.n();
      std::optional<Dataset> synthetic;
      auto m = meter.measure([&] { synthetic = synthesize(parts.train, sc); }, "prepare/synthetic");
      v.result.preparation = with_baseline(std::move(m), report.idle);
      v.train = std::move(*synthetic);
      v.test = parts.test;
      v.result.train_rows = v.train.n();
    } catch (const std::exception& e) {
      v.result = VariantResult{};
      v.result.name = "synthetic";
      v.result.error = e.what();
    }
    variants.push_back(std::move(v));
  }

  std::vector<std::string> order;
  for (const auto& v : variants) {
    order.push_back(v.result.name);
    report.variants.push_back(v.result);
    for (const auto& spec : config.models) {
      if (v.result.error) {
        CellResult c;
        c.variant = v.result.name;
        c.model = spec.name();
        c.error = "variant unavailable: " + *v.result.error;
        report.cells.push_back(std::move(c));
        continue;
      }
      say(progress, "training " + spec.name() + " on " + v.result.name);
      report.cells.push_back(run_cell(config, meter, report.idle, v, spec));
    }
  }
  report.tests = pairwise_tests(report.cells, order);
  return report;
}

}  // namespace petbench
