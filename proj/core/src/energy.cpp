#include "petbench/energy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "petbench/dataset.hpp"
#include "petbench/error.hpp"

namespace petbench {

namespace fs = std::filesystem;

namespace {

std::mutex& measurement_token() {
  static std::mutex token;
  return token;
}

std::string read_first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  if (!in || !std::getline(in, line)) throw ProbeError("cannot read " + p.string());
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r' || line.back() == ' ')) line.pop_back();
  return line;
}

std::uint64_t read_counter(const fs::path& p) {
  const std::string s = read_first_line(p);
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ProbeError("malformed counter in " + p.string() + ": '" + s + "'");
  }
}

}  // namespace

Nanoseconds SystemClock::now() {
  return std::chrono::duration_cast<Nanoseconds>(std::chrono::steady_clock::now().time_since_epoch());
}

void SystemClock::sleep_for(Nanoseconds d) { std::this_thread::sleep_for(d); }

Nanoseconds VirtualClock::now() {
  const auto t = now_;
  now_ += tick_;
  return t;
}

// ---------------------------------------------------------------------------

PowercapProbe::PowercapProbe(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  if (!fs::is_directory(root_, ec)) throw ProbeUnavailableError("no powercap interface at " + root_.string());

  std::vector<fs::path> packages;
  for (const auto& entry : fs::directory_iterator(root_, ec)) {
    const auto name = entry.path().filename().string();
    // Top-level zones look like intel-rapl:0; subzones like intel-rapl:0:1.
    if (name.rfind("intel-rapl:", 0) == 0 && std::count(name.begin(), name.end(), ':') == 1) packages.push_back(entry.path());
  }
  std::sort(packages.begin(), packages.end());

  auto add_zone = [&](const fs::path& dir, const std::string& label) {
    try {
      Zone z{label, dir / "energy_uj", read_counter(dir / "max_energy_range_uj")};
      read_counter(z.energy_file);
      zones_.push_back(std::move(z));
    } catch (const ProbeError&) {
      // Unreadable zone (often a permissions issue); skip it.
    }
  };

  for (const auto& pkg : packages) {
    std::string pkg_name;
    try {
      pkg_name = read_first_line(pkg / "name");
    } catch (const ProbeError&) {
      continue;
    }
    if (pkg_name.rfind("package", 0) != 0) continue;
    add_zone(pkg, pkg_name);

    std::vector<fs::path> subs;
    for (const auto& entry : fs::directory_iterator(pkg, ec)) {
      const auto name = entry.path().filename().string();
      if (name.rfind("intel-rapl:", 0) == 0) subs.push_back(entry.path());
    }
    std::sort(subs.begin(), subs.end());
    for (const auto& sub : subs) {
      try {
        if (read_first_line(sub / "name") == "dram") add_zone(sub, pkg_name + "/dram");
      } catch (const ProbeError&) {
      }
    }
  }
  if (zones_.empty()) throw ProbeUnavailableError("no readable RAPL zone under " + root_.string());
}

EnergySample PowercapProbe::read() {
  EnergySample s;
  s.timestamp = clock_.now();
  s.domains.reserve(zones_.size());
  for (const auto& z : zones_) s.domains.push_back({z.name, read_counter(z.energy_file), z.max_range_uj});
  return s;
}

std::string PowercapProbe::description() const {
  std::string d = "powercap:" + root_.string() + " [";
  for (std::size_t i = 0; i < zones_.size(); ++i) d += (i ? "," : "") + zones_[i].name;
  return d + "]";
}

// ---------------------------------------------------------------------------

PowerTrace::PowerTrace(double constant_watts) : PowerTrace(std::vector<std::pair<double, double>>{{0.0, constant_watts}}) {}

PowerTrace::PowerTrace(std::vector<std::pair<double, double>> points) : points_(std::move(points)) {
  if (points_.empty()) throw ProbeError("power trace is empty");
  for (const auto& [t, w] : points_) {
    if (!std::isfinite(t) || !std::isfinite(w) || w < 0.0) throw ProbeError("power trace holds an invalid point");
  }
  std::stable_sort(points_.begin(), points_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
}

PowerTrace PowerTrace::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ProbeError("cannot open power trace " + path.string());
  std::vector<std::pair<double, double>> points;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = parse_csv_line(line, ',');
    if (fields.size() != 2) throw ParseError("power trace rows need timestamp_s,watts", lineno);
    const auto t = parse_number(fields[0]);
    const auto w = parse_number(fields[1]);
    if (!t || !w) {
      if (points.empty() && lineno == 1) continue;  // header
      throw ParseError("non-numeric power trace row", lineno);
    }
    points.emplace_back(*t, *w);
  }
  return PowerTrace(std::move(points));
}

double PowerTrace::watts_at(double t) const {
  auto it = std::upper_bound(points_.begin(), points_.end(), t, [](double v, const auto& p) { return v < p.first; });
  if (it == points_.begin()) return points_.front().second;
  return std::prev(it)->second;
}

double PowerTrace::joules_until(double t) const {
  if (t <= 0.0) return 0.0;
  double joules = 0.0;
  double cursor = 0.0;
  double watts = points_.front().second;
  for (const auto& [pt, pw] : points_) {
    if (pt >= t) break;
    if (pt > cursor) {
      joules += watts * (pt - cursor);
      cursor = pt;
    }
    watts = pw;
  }
  return joules + watts * (t - cursor);
}

SimulatedProbe::SimulatedProbe(PowerTrace trace, std::unique_ptr<Clock> clock, std::uint64_t max_range_uj)
    : trace_(std::move(trace)), clock_(std::move(clock)), max_range_uj_(max_range_uj) {
  if (!clock_) throw ProbeError("simulated probe needs a clock");
  if (max_range_uj_ == 0) throw ProbeError("counter range must be positive");
  origin_ = clock_->now();
}

EnergySample SimulatedProbe::read() {
  EnergySample s;
  s.timestamp = clock_->now();
  const double elapsed = std::chrono::duration<double>(s.timestamp - origin_).count();
  // Integrate in microjoules; rounding keeps constant power exact on a virtual clock.
  const double uj = std::round(trace_.joules_until(elapsed) * 1e6);
  const auto total = static_cast<std::uint64_t>(uj);
  s.domains.push_back({"package", total % max_range_uj_, max_range_uj_});
  return s;
}

std::string SimulatedProbe::description() const { return "simulated"; }

ProbeConfig parse_probe_spec(const std::string& spec) {
  ProbeConfig c;
  if (spec == "hardware" || spec == "rapl" || spec == "powercap") {
    c.kind = ProbeConfig::Kind::hardware;
    return c;
  }
  if (spec.rfind("trace:", 0) == 0) {
    c.kind = ProbeConfig::Kind::simulated;
    c.trace = spec.substr(6);
    if (c.trace.empty()) throw ConfigError("probe spec 'trace:' needs a path");
    return c;
  }
  if (spec.rfind("simulated", 0) == 0) {
    c.kind = ProbeConfig::Kind::simulated;
    std::string rest = spec.substr(9);
    if (rest.empty()) return c;
    if (rest[0] != ':') throw ConfigError("bad probe spec '" + spec + "'");
    rest.erase(0, 1);
    std::string mode;
    if (const auto colon = rest.find(':'); colon != std::string::npos) {
      mode = rest.substr(colon + 1);
      rest.resize(colon);
    }
    const auto w = parse_number(rest);
    if (!w || *w < 0.0) throw ConfigError("bad wattage in probe spec '" + spec + "'");
    c.watts = *w;
    if (mode == "wall") {
      c.virtual_clock = false;
    } else if (!mode.empty() && mode != "virtual") {
      throw ConfigError("bad clock '" + mode + "' in probe spec");
    }
    return c;
  }
  throw ConfigError("unknown probe spec '" + spec + "'");
}

std::unique_ptr<EnergyProbe> make_probe(const ProbeConfig& config) {
  if (config.kind == ProbeConfig::Kind::hardware) return std::make_unique<PowercapProbe>(config.powercap_root);
  PowerTrace trace = config.trace.empty() ? PowerTrace(config.watts) : PowerTrace::load(config.trace);
  std::unique_ptr<Clock> clock;
  if (config.virtual_clock) {
    clock = std::make_unique<VirtualClock>();
  } else {
    clock = std::make_unique<SystemClock>();
  }
  return std::make_unique<SimulatedProbe>(std::move(trace), std::move(clock), config.max_range_uj);
}

std::map<std::string, double> delta(const EnergySample& before, const EnergySample& after) {
  if (before.domains.size() != after.domains.size()) throw ProbeError("samples cover different domains");
  if (after.timestamp < before.timestamp) throw ProbeError("samples are out of order");
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < before.domains.size(); ++i) {
    const auto& a = before.domains[i];
    const auto& b = after.domains[i];
    if (a.name != b.name || a.max_range_uj != b.max_range_uj) throw ProbeError("samples cover different domains");
    const std::uint64_t range = a.max_range_uj;
    if (range == 0 || a.energy_uj >= range || b.energy_uj >= range) throw ProbeError("counter outside its range in " + a.name);
    const std::uint64_t d = b.energy_uj >= a.energy_uj ? b.energy_uj - a.energy_uj : range - a.energy_uj + b.energy_uj;
    out[a.name] = static_cast<double>(d) * 1e-6;
  }
  return out;
}

double Measurement::total_energy_j() const {
  double s = 0.0;
  for (const auto& [_, j] : energy_j) s += j;
  return s;
}

double net_energy(const Measurement& m, const IdleBaseline& b) { return m.total_energy_j() - b.joules_per_s * m.duration_s; }

Measurement with_baseline(Measurement m, const IdleBaseline& b) {
  m.net_energy_j = net_energy(m, b);
  return m;
}

EnergySummary aggregate(std::span<const Measurement> ms) {
  if (ms.empty()) throw std::invalid_argument("aggregate of no measurements");
  const double n = static_cast<double>(ms.size());
  EnergySummary s;
  for (const auto& m : ms) {
    s.mean += m.net_energy_j;
    s.mean_duration += m.duration_s;
  }
  s.mean /= n;
  s.mean_duration /= n;
  if (ms.size() > 1) {
    double ss = 0.0;
    for (const auto& m : ms) ss += (m.net_energy_j - s.mean) * (m.net_energy_j - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

EnergyMeter::EnergyMeter(std::unique_ptr<EnergyProbe> probe) : probe_(std::move(probe)) {
  if (!probe_) throw ProbeError("energy meter needs a probe");
}

Measurement EnergyMeter::measure(const std::function<void()>& task, std::string label, std::size_t replicate) {
  std::lock_guard lock(measurement_token());
  const EnergySample before = probe_->read();
  task();
  const EnergySample after = probe_->read();

  Measurement m;
  m.label = std::move(label);
  m.replicate = replicate;
  m.energy_j = delta(before, after);
  const auto ns = std::max<std::int64_t>((after.timestamp - before.timestamp).count(), 1);
  m.duration_s = static_cast<double>(ns) * 1e-9;
  m.net_energy_j = m.total_energy_j();
  return m;
}

IdleBaseline EnergyMeter::idle_baseline(std::size_t replicates, Nanoseconds sleep) {
  if (replicates == 0) throw std::invalid_argument("idle baseline needs at least one replicate");
  IdleBaseline b;
  double joules = 0.0;
  double seconds = 0.0;
  for (std::size_t r = 0; r < replicates; ++r) {
    auto m = measure([&] { probe_->clock().sleep_for(sleep); }, "idle", r);
    joules += m.total_energy_j();
    seconds += m.duration_s;
    b.replicates.push_back(std::move(m));
  }
  b.joules_per_s = joules / seconds;
  for (auto& m : b.replicates) m.net_energy_j = net_energy(m, b);
  return b;
}

}  // namespace petbench
