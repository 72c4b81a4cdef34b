#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace petbench {

using Nanoseconds = std::chrono::nanoseconds;

/// Time source for timestamps and the idle sleep.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Nanoseconds now() = 0;
  virtual void sleep_for(Nanoseconds d) = 0;
};

class SystemClock final : public Clock {
 public:
  Nanoseconds now() override;
  void sleep_for(Nanoseconds d) override;
};

/// Deterministic clock: every reading advances time by `tick`, sleeping
/// advances it by the requested amount. Used with the simulated probe so
/// seeded runs are reproducible to the bit.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(Nanoseconds tick = std::chrono::milliseconds(1)) : tick_(tick) {}
  Nanoseconds now() override;
  void sleep_for(Nanoseconds d) override { now_ += d; }
  void advance(Nanoseconds d) { now_ += d; }

 private:
  Nanoseconds now_{0};
  Nanoseconds tick_;
};

struct DomainReading {
  std::string name;
  std::uint64_t energy_uj = 0;     ///< cumulative, wraps at max_range_uj
  std::uint64_t max_range_uj = 0;
};

struct EnergySample {
  Nanoseconds timestamp{0};
  std::vector<DomainReading> domains;
};

class EnergyProbe {
 public:
  virtual ~EnergyProbe() = default;
  virtual EnergySample read() = 0;
  virtual Clock& clock() = 0;
  virtual std::string description() const = 0;
};

/// Linux powercap RAPL zones (package and dram) under /sys/class/powercap.
class PowercapProbe final : public EnergyProbe {
 public:
  /// Throws ProbeUnavailableError when no readable intel-rapl zone exists.
  explicit PowercapProbe(std::filesystem::path root = "/sys/class/powercap");

  EnergySample read() override;
  Clock& clock() override { return clock_; }
  std::string description() const override;

 private:
  struct Zone {
    std::string name;
    std::filesystem::path energy_file;
    std::uint64_t max_range_uj = 0;
  };
  std::filesystem::path root_;
  std::vector<Zone> zones_;
  SystemClock clock_;
};

/// Piecewise-constant power: watts(t) = value of the last point with time <= t.
class PowerTrace {
 public:
  explicit PowerTrace(double constant_watts);
  /// Points (seconds since start, watts); sorted on construction.
  explicit PowerTrace(std::vector<std::pair<double, double>> points);
  /// Reads `timestamp_s,watts` rows (an optional header line is skipped).
  static PowerTrace load(const std::filesystem::path& path);

  double watts_at(double t) const;
  /// Energy in joules over [0, t].
  double joules_until(double t) const;

 private:
  std::vector<std::pair<double, double>> points_;
};

/// Software probe integrating a power trace against a clock; one "package" domain.
class SimulatedProbe final : public EnergyProbe {
 public:
  static constexpr std::uint64_t kDefaultMaxRange = 262143328850ULL;

  SimulatedProbe(PowerTrace trace, std::unique_ptr<Clock> clock, std::uint64_t max_range_uj = kDefaultMaxRange);

  EnergySample read() override;
  Clock& clock() override { return *clock_; }
  std::string description() const override;

 private:
  PowerTrace trace_;
  std::unique_ptr<Clock> clock_;
  Nanoseconds origin_;
  std::uint64_t max_range_uj_;
};

struct ProbeConfig {
  enum class Kind { hardware, simulated };
  Kind kind = Kind::simulated;
  double watts = 7.512;
  std::filesystem::path trace;              ///< overrides watts when set
  bool virtual_clock = true;                ///< simulated only
  std::filesystem::path powercap_root = "/sys/class/powercap";
  std::uint64_t max_range_uj = SimulatedProbe::kDefaultMaxRange;
};

/// "hardware", "simulated:<watts>", "simulated:<watts>:wall", "trace:<path>".
ProbeConfig parse_probe_spec(const std::string& spec);
std::unique_ptr<EnergyProbe> make_probe(const ProbeConfig& config);

/// Per-domain joules between two samples, modulo each counter's range.
/// Throws ProbeError for mismatched domain sets or reversed timestamps.
std::map<std::string, double> delta(const EnergySample& before, const EnergySample& after);

struct Measurement {
  std::string label;
  std::size_t replicate = 0;
  double duration_s = 0.0;
  std::map<std::string, double> energy_j;  ///< wrap-corrected per-domain delta
  double net_energy_j = 0.0;               ///< total minus idle power x duration; may be negative

  double total_energy_j() const;
  friend bool operator==(const Measurement&, const Measurement&) = default;
};

struct IdleBaseline {
  double joules_per_s = 0.0;
  std::vector<Measurement> replicates;
  friend bool operator==(const IdleBaseline&, const IdleBaseline&) = default;
};

double net_energy(const Measurement& m, const IdleBaseline& b);
Measurement with_baseline(Measurement m, const IdleBaseline& b);

struct EnergySummary {
  double mean = 0.0;            ///< of net energies, joules
  double std = 0.0;             ///< sample standard deviation; 0 for a single value
  double mean_duration = 0.0;   ///< seconds
  friend bool operator==(const EnergySummary&, const EnergySummary&) = default;
};

/// Throws std::invalid_argument for an empty list.
EnergySummary aggregate(std::span<const Measurement> ms);

/// Runs stages between two counter reads. Only one measured stage may be
/// active per process: measure() holds a process-wide token for its duration.
class EnergyMeter {
 public:
  explicit EnergyMeter(std::unique_ptr<EnergyProbe> probe);

  EnergySample read_counters() { return probe_->read(); }

  /// Exceptions from `task` propagate and no measurement is produced.
  Measurement measure(const std::function<void()>& task, std::string label, std::size_t replicate = 0);

  /// `replicates` measurements of a plain sleep; joules_per_s = mean power.
  IdleBaseline idle_baseline(std::size_t replicates = 10, Nanoseconds sleep = std::chrono::seconds(1));

  EnergyProbe& probe() { return *probe_; }

 private:
  std::unique_ptr<EnergyProbe> probe_;
};

}  // namespace petbench
