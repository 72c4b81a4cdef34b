#include "petbench/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "petbench/dataset.hpp"
#include "petbench/error.hpp"

namespace petbench {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

template <class T>
ordered_json opt(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

template <class T>
std::optional<T> opt_get(const ordered_json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

ordered_json measurement_json(const Measurement& m) {
  ordered_json j;
  j["label"] = m.label;
  j["replicate"] = m.replicate;
  j["duration_s"] = m.duration_s;
  j["energy_j"] = ordered_json::object();
  for (const auto& [d, e] : m.energy_j) j["energy_j"][d] = e;
  j["net_energy_j"] = m.net_energy_j;
  return j;
}

Measurement measurement_from(const ordered_json& j) {
  Measurement m;
  m.label = j.at("label").get<std::string>();
  m.replicate = j.at("replicate").get<std::size_t>();
  m.duration_s = j.at("duration_s").get<double>();
  for (const auto& [d, e] : j.at("energy_j").items()) m.energy_j[d] = e.get<double>();
  m.net_energy_j = j.at("net_energy_j").get<double>();
  return m;
}

Alternative parse_alternative(const std::string& s) {
  if (s == "greater") return Alternative::greater;
  if (s == "less") return Alternative::less;
  throw ReportError("bad alternative '" + s + "'");
}

UTestMethod parse_method(const std::string& s) {
  if (s == "exact") return UTestMethod::exact;
  if (s == "normal") return UTestMethod::normal_approx;
  throw ReportError("bad test method '" + s + "'");
}

std::string num(double v) { return format_number(v); }

std::string num(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ReportError("cannot write " + path.string());
  out << text;
  if (!out) throw ReportError("write failed for " + path.string());
}

std::string join_levels(const std::vector<std::size_t>& levels) {
  std::string s;
  for (std::size_t i = 0; i < levels.size(); ++i) s += (i ? ";" : "") + std::to_string(levels[i]);
  return s;
}

}  // namespace

std::optional<double> percent_deviation(double variant, double benchmark) {
  if (std::abs(benchmark) < 1e-9) return std::nullopt;
  return (variant - benchmark) / benchmark * 100.0;
}

std::vector<DeviationRow> deviation_table(const BenchReport& r) {
  if (!r.variant("benchmark")) throw ReportError("report has no benchmark variant");
  std::vector<DeviationRow> rows;
  for (const auto& c : r.cells) {
    if (c.variant == "benchmark") continue;
    const auto* base = r.cell("benchmark", c.model);
    DeviationRow row{c.variant, c.model, std::nullopt, std::nullopt};
    if (base && base->ok() && c.ok()) {
      row.duration_pct = percent_deviation(c.energy.mean_duration, base->energy.mean_duration);
      row.energy_pct = percent_deviation(c.energy.mean, base->energy.mean);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string to_json(const BenchReport& r) {
  ordered_json j;
  j["dataset"] = r.dataset;
  j["probe"] = r.probe;
  j["replicates"] = r.replicates;
  j["seed"] = r.seed;
  j["train_rows"] = r.train_rows;
  j["test_rows"] = r.test_rows;

  ordered_json idle;
  idle["joules_per_s"] = r.idle.joules_per_s;
  idle["replicates"] = ordered_json::array();
  for (const auto& m : r.idle.replicates) idle["replicates"].push_back(measurement_json(m));
  j["idle"] = idle;

  j["variants"] = ordered_json::array();
  for (const auto& v : r.variants) {
    ordered_json vj;
    vj["name"] = v.name;
    vj["k"] = opt(v.k);
    vj["train_rows"] = v.train_rows;
    vj["preparation"] = v.preparation ? measurement_json(*v.preparation) : ordered_json(nullptr);
    vj["suppressed_cell_fraction"] = opt(v.suppressed_cell_fraction);
    vj["suppressed_rows"] = opt(v.suppressed_rows);
    vj["node"] = v.node;
    vj["error"] = opt(v.error);
    j["variants"].push_back(vj);
  }

  j["cells"] = ordered_json::array();
  for (const auto& c : r.cells) {
    ordered_json cj;
    cj["variant"] = c.variant;
    cj["model"] = c.model;
    cj["replicates"] = ordered_json::array();
    for (const auto& m : c.replicates) cj["replicates"].push_back(measurement_json(m));
    cj["accuracies"] = c.accuracies;
    cj["mean_accuracy"] = c.mean_accuracy;
    cj["energy"] = {{"mean_net_energy_j", c.energy.mean}, {"std_net_energy_j", c.energy.std}, {"mean_duration_s", c.energy.mean_duration}};
    cj["error"] = opt(c.error);
    j["cells"].push_back(cj);
  }

  j["tests"] = ordered_json::array();
  for (const auto& t : r.tests) {
    j["tests"].push_back({{"model", t.model},
                          {"row", t.row},
                          {"column", t.column},
                          {"u_statistic", t.result.u_statistic},
                          {"p_value", t.result.p_value},
                          {"alternative", std::string(to_string(t.result.alternative))},
                          {"method", std::string(to_string(t.result.method))}});
  }

  // Derived from the cells above; ignored when reading a report back.
  j["deviations"] = ordered_json::array();
  if (r.variant("benchmark")) {
    for (const auto& d : deviation_table(r)) {
      j["deviations"].push_back({{"variant", d.variant}, {"model", d.model}, {"duration_pct", opt(d.duration_pct)}, {"energy_pct", opt(d.energy_pct)}});
    }
  }
  return j.dump(2) + "\n";
}

BenchReport report_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw ReportError(std::string("malformed report: ") + e.what());
  }
  try {
    BenchReport r;
    r.dataset = j.at("dataset").get<std::string>();
    r.probe = j.at("probe").get<std::string>();
    r.replicates = j.at("replicates").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.train_rows = j.at("train_rows").get<std::size_t>();
    r.test_rows = j.at("test_rows").get<std::size_t>();
    r.idle.joules_per_s = j.at("idle").at("joules_per_s").get<double>();
    for (const auto& m : j.at("idle").at("replicates")) r.idle.replicates.push_back(measurement_from(m));
    for (const auto& vj : j.at("variants")) {
      VariantResult v;
      v.name = vj.at("name").get<std::string>();
      v.k = opt_get<std::size_t>(vj, "k");
      v.train_rows = vj.at("train_rows").get<std::size_t>();
      if (!vj.at("preparation").is_null()) v.preparation = measurement_from(vj.at("preparation"));
      v.suppressed_cell_fraction = opt_get<double>(vj, "suppressed_cell_fraction");
      v.suppressed_rows = opt_get<std::size_t>(vj, "suppressed_rows");
      v.node = vj.at("node").get<std::vector<std::size_t>>();
      v.error = opt_get<std::string>(vj, "error");
      r.variants.push_back(std::move(v));
    }
    for (const auto& cj : j.at("cells")) {
      CellResult c;
      c.variant = cj.at("variant").get<std::string>();
      c.model = cj.at("model").get<std::string>();
      for (const auto& m : cj.at("replicates")) c.replicates.push_back(measurement_from(m));
      c.accuracies = cj.at("accuracies").get<std::vector<double>>();
      c.mean_accuracy = cj.at("mean_accuracy").get<double>();
      c.energy.mean = cj.at("energy").at("mean_net_energy_j").get<double>();
      c.energy.std = cj.at("energy").at("std_net_energy_j").get<double>();
      c.energy.mean_duration = cj.at("energy").at("mean_duration_s").get<double>();
      c.error = opt_get<std::string>(cj, "error");
      r.cells.push_back(std::move(c));
    }
    for (const auto& tj : j.at("tests")) {
      PairwiseTest t;
      t.model = tj.at("model").get<std::string>();
      t.row = tj.at("row").get<std::string>();
      t.column = tj.at("column").get<std::string>();
      t.result.u_statistic = tj.at("u_statistic").get<double>();
      t.result.p_value = tj.at("p_value").get<double>();
      t.result.alternative = parse_alternative(tj.at("alternative").get<std::string>());
      t.result.method = parse_method(tj.at("method").get<std::string>());
      r.tests.push_back(std::move(t));
    }
    return r;
  } catch (const ordered_json::exception& e) {
    throw ReportError(std::string("incomplete report: ") + e.what());
  }
}

BenchReport load_report(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReportError("cannot open report " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return report_from_json(ss.str());
}

std::vector<fs::path> emit(const BenchReport& r, EmitFormat format, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ReportError("cannot create " + dir.string() + ": " + ec.message());

  std::vector<fs::path> written;
  auto put = [&](const std::string& name, const std::string& text) {
    const auto path = dir / name;
    write_file(path, text);
    written.push_back(path);
  };

  switch (format) {
    case EmitFormat::json:
      put("report.json", to_json(r));
      break;

    case EmitFormat::scatter_csv: {
      std::string s = "variant,model,replicate,duration_s,net_energy_j\n";
      for (const auto& c : r.cells) {
        for (const auto& m : c.replicates) {
          s += c.variant + "," + c.model + "," + std::to_string(m.replicate) + "," + num(m.duration_s) + "," + num(m.net_energy_j) + "\n";
        }
      }
      put("scatter.csv", s);
      break;
    }

    case EmitFormat::csv_tables: {
      std::string prep = "variant,duration_s,energy_j,net_energy_j,error\n";
      std::string supp = "variant,k,suppressed_cell_fraction,suppressed_rows,train_rows,levels\n";
      for (const auto& v : r.variants) {
        if (v.name == "benchmark") continue;
        const auto& p = v.preparation;
        prep += v.name + "," + (p ? num(p->duration_s) : "") + "," + (p ? num(p->total_energy_j()) : "") + "," +
                (p ? num(p->net_energy_j) : "") + "," + format_csv_field(v.error.value_or(""), ',') + "\n";
        if (v.k) {
          supp += v.name + "," + std::to_string(*v.k) + "," + num(v.suppressed_cell_fraction) + "," +
                  (v.suppressed_rows ? std::to_string(*v.suppressed_rows) : "") + "," + std::to_string(v.train_rows) + "," +
                  join_levels(v.node) + "\n";
        }
      }
      put("table_preparation.csv", prep);
      put("table_suppression.csv", supp);

      std::string energy = "variant,model,mean_duration_s,mean_net_energy_j,std_net_energy_j,duration_deviation_pct,energy_deviation_pct\n";
      std::vector<DeviationRow> devs;
      if (r.variant("benchmark")) devs = deviation_table(r);
      for (const auto& c : r.cells) {
        if (!c.ok()) continue;
        std::optional<double> dd, de;
        for (const auto& d : devs) {
          if (d.variant == c.variant && d.model == c.model) {
            dd = d.duration_pct;
            de = d.energy_pct;
          }
        }
        if (c.variant == "benchmark") dd = de = 0.0;
        energy += c.variant + "," + c.model + "," + num(c.energy.mean_duration) + "," + num(c.energy.mean) + "," +
                  num(c.energy.std) + "," + num(dd) + "," + num(de) + "\n";
      }
      put("table_energy.csv", energy);

      std::string tests = "model,row,column,u_statistic,p_value,alternative,method\n";
      for (const auto& t : r.tests) {
        tests += t.model + "," + t.row + "," + t.column + "," + num(t.result.u_statistic) + "," + num(t.result.p_value) + "," +
                 std::string(to_string(t.result.alternative)) + "," + std::string(to_string(t.result.method)) + "\n";
      }
      put("table_utest.csv", tests);

      std::string acc = "variant,model,mean_accuracy,replicate_accuracies,error\n";
      for (const auto& c : r.cells) {
        std::string reps;
        for (std::size_t i = 0; i < c.accuracies.size(); ++i) reps += (i ? ";" : "") + num(c.accuracies[i]);
        acc += c.variant + "," + c.model + "," + (c.ok() ? num(c.mean_accuracy) : "") + "," + reps + "," +
               format_csv_field(c.error.value_or(""), ',') + "\n";
      }
      put("table_accuracy.csv", acc);
      break;
    }
  }
  return written;
}

}  // namespace petbench
