// Command-line front end: runs the full privacy/energy experiment or one of its stages.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "petbench/anonymizer.hpp"
#include "petbench/config.hpp"
#include "petbench/energy.hpp"
#include "petbench/error.hpp"
#include "petbench/experiment.hpp"
#include "petbench/report.hpp"
#include "petbench/synthesizer.hpp"

namespace fs = std::filesystem;
using namespace petbench;

namespace {

struct Options {
  std::string config;
  std::string probe;
  std::string out;
  std::string in;
  std::vector<std::size_t> k_values;
  std::size_t idle_replicates = 10;
  std::optional<std::size_t> n_out;
  bool quiet = false;
};

ExperimentConfig load(const Options& o) {
  ExperimentConfig c = load_config(o.config);
  if (!o.probe.empty()) c.probe = parse_probe_spec(o.probe);
  if (!o.out.empty()) c.output_dir = o.out;
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw ReportError("cannot write " + path.string());
}

int cmd_run(const Options& o) {
  const auto config = load(o);
  ProgressFn progress;
  if (!o.quiet) progress = [](const std::string& msg) { std::cerr << "[bench] " << msg << "\n"; };
  const BenchReport report = run_experiment(config, progress);
  for (auto format : {EmitFormat::json, EmitFormat::csv_tables, EmitFormat::scatter_csv}) {
    for (const auto& p : emit(report, format, config.output_dir)) std::cout << p.string() << "\n";
  }
  for (const auto& v : report.variants) {
    if (v.error) std::cerr << "variant " << v.name << " failed: " << *v.error << "\n";
  }
  for (const auto& c : report.cells) {
    if (c.error) std::cerr << "cell " << c.variant << "/" << c.model << " failed: " << *c.error << "\n";
  }
  return report.complete() ? 0 : 1;
}

int cmd_baseline(const Options& o) {
  ProbeConfig probe;
  double sleep_s = 1.0;
  fs::path out_dir = o.out;
  if (!o.config.empty()) {
    const auto c = load(o);
    probe = c.probe;
    sleep_s = c.idle_sleep_s;
    if (out_dir.empty()) out_dir = c.output_dir;
  } else if (!o.probe.empty()) {
    probe = parse_probe_spec(o.probe);
  } else {
    probe.kind = ProbeConfig::Kind::hardware;
  }
  EnergyMeter meter(make_probe(probe));
  const auto sleep = std::chrono::duration_cast<Nanoseconds>(std::chrono::duration<double>(sleep_s));
  const IdleBaseline b = meter.idle_baseline(o.idle_replicates, sleep);
  std::cout << "probe: " << meter.probe().description() << "\n";
  std::cout << "idle power: " << format_number(b.joules_per_s) << " W over " << b.replicates.size() << " replicates\n";
  if (!out_dir.empty()) {
    std::string csv = "replicate,duration_s,energy_j\n";
    for (const auto& m : b.replicates) {
      csv += std::to_string(m.replicate) + "," + format_number(m.duration_s) + "," + format_number(m.total_energy_j()) + "\n";
    }
    write_text(out_dir / "baseline.csv", csv);
    std::cout << (out_dir / "baseline.csv").string() << "\n";
  }
  return 0;
}

int cmd_anonymize(const Options& o) {
  const auto config = load(o);
  const Dataset data = load_dataset(config.dataset);
  AnonymizationConfig ac;
  ac.suppression_limit = config.suppression_limit;
  ac.quasi_identifiers = config.quasi_identifiers();
  ac.hierarchies = build_hierarchies(config, data);
  const auto ks = o.k_values.empty() ? config.k_values : o.k_values;
  int status = 0;
  for (auto k : ks) {
    ac.k = k;
    try {
      const auto sol = anonymize(data, ac);
      const auto path = config.output_dir / ("anonymized_k" + std::to_string(k) + ".csv");
      fs::create_directories(config.output_dir);
      write_csv(sol.output, path);
      std::string levels;
      for (std::size_t i = 0; i < sol.node.levels.size(); ++i) {
        levels += (i ? "," : "") + ac.quasi_identifiers[i] + "=" + std::to_string(sol.node.levels[i]);
      }
      std::cout << "k=" << k << " levels [" << levels << "] suppressed rows " << sol.suppressed_rows.size()
                << " suppressed cells " << format_number(sol.suppressed_cell_fraction) << " -> " << path.string() << "\n";
    } catch (const Error& e) {
      std::cerr << "k=" << k << ": " << e.what() << "\n";
      status = 1;
    }
  }
  return status;
}

int cmd_synthesize(const Options& o) {
  const auto config = load(o);
  const Dataset data = load_dataset(config.dataset);
  SynthesizerConfig sc = config.synthesizer;
  if (o.n_out) sc.n_out = *o.n_out;
  BayesianNetwork net;
  const Dataset synthetic = synthesize(data, sc, &net);
  fs::create_directories(config.output_dir);
  write_csv(synthetic, config.output_dir / "synthetic.csv");
  write_text(config.output_dir / "network.json", describe(net));
  std::cout << synthetic.n() << " rows -> " << (config.output_dir / "synthetic.csv").string() << "\n";
  return 0;
}

int cmd_report(const Options& o) {
  fs::path in = o.in;
  if (in.empty() && !o.config.empty()) in = load(o).output_dir / "report.json";
  if (in.empty()) throw ConfigError("report needs --in <report.json> or --config");
  const BenchReport r = load_report(in);
  const fs::path out = o.out.empty() ? in.parent_path() : fs::path(o.out);
  for (auto format : {EmitFormat::csv_tables, EmitFormat::scatter_csv}) {
    for (const auto& p : emit(r, format, out)) std::cout << p.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy and accuracy benchmark for k-anonymisation and synthetic data"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", o.config, "Experiment config (YAML)")->check(CLI::ExistingFile);
    if (config_required) opt->required();
    sub->add_option("--probe", o.probe, "Energy probe: hardware | simulated:<watts>[:wall] | trace:<file>");
    sub->add_option("--out", o.out, "Output directory (overrides output_dir)");
  };

  auto* run = app.add_subcommand("run", "Full experiment: prepare variants, train models, emit report and tables");
  add_common(run, true);
  run->add_flag("-q,--quiet", o.quiet, "No progress messages");

  auto* baseline = app.add_subcommand("baseline", "Measure idle power only");
  add_common(baseline, false);
  baseline->add_option("--replicates", o.idle_replicates, "Idle measurements")->check(CLI::PositiveNumber);

  auto* anon = app.add_subcommand("anonymize", "k-anonymise the cleaned dataset");
  add_common(anon, true);
  anon->add_option("--k", o.k_values, "k values (default: from config)");

  auto* synth = app.add_subcommand("synthesize", "Fit the Bayesian network and sample a synthetic dataset");
  add_common(synth, true);
  synth->add_option("--n", o.n_out, "Rows to sample (default: input size)");

  auto* report = app.add_subcommand("report", "Regenerate tables from a saved report.json");
  add_common(report, false);
  report->add_option("--in", o.in, "Saved report.json")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(o);
    if (*baseline) return cmd_baseline(o);
    if (*anon) return cmd_anonymize(o);
    if (*synth) return cmd_synthesize(o);
    if (*report) return cmd_report(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
