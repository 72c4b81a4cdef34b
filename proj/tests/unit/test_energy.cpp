#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "petbench/energy.hpp"
#include "petbench/error.hpp"

using namespace petbench;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

namespace {

std::unique_ptr<EnergyProbe> simulated(double watts, Nanoseconds tick = 1us, std::uint64_t range = SimulatedProbe::kDefaultMaxRange) {
  return std::make_unique<SimulatedProbe>(PowerTrace(watts), std::make_unique<VirtualClock>(tick), range);
}

EnergySample sample_of(std::uint64_t uj, std::uint64_t range, Nanoseconds t = 0ns) {
  return EnergySample{t, {{"package", uj, range}}};
}

Measurement measured(double joules, double seconds) {
  Measurement m;
  m.duration_s = seconds;
  m.energy_j["package"] = joules;
  m.net_energy_j = joules;
  return m;
}

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

}  // namespace

TEST(SimulatedProbe, TenWattsAdvanceTenMicrojoulesPerMicrosecond) {
  auto probe = simulated(10.0);
  const auto a = probe->read();
  const auto b = probe->read();
  EXPECT_EQ(b.timestamp - a.timestamp, 1us);
  EXPECT_EQ(b.domains[0].energy_uj - a.domains[0].energy_uj, 10u);
  EXPECT_LT(a.domains[0].energy_uj, a.domains[0].max_range_uj);
}

TEST(Delta, Arithmetic) {
  EXPECT_DOUBLE_EQ(delta(sample_of(100, 1000), sample_of(250, 1000, 1ns)).at("package"), 1.5e-4);
  EXPECT_DOUBLE_EQ(delta(sample_of(990, 1000), sample_of(5, 1000, 1ns)).at("package"), 15e-6);
  EXPECT_DOUBLE_EQ(delta(sample_of(42, 1000), sample_of(42, 1000, 1ns)).at("package"), 0.0);
}

TEST(Delta, MismatchedDomainsAreAProbeError) {
  EnergySample two{1ns, {{"package", 1, 100}, {"dram", 1, 100}}};
  EXPECT_THROW(delta(sample_of(1, 100), two), ProbeError);
  EnergySample renamed{1ns, {{"dram", 1, 100}}};
  EXPECT_THROW(delta(sample_of(1, 100), renamed), ProbeError);
}

TEST(Delta, WrapAroundIsExactThroughTheMeter) {
  // 10 W with a 1 ms tick adds 10000 uJ per read; the counter wraps at 25000.
  EnergyMeter meter(simulated(10.0, 1ms, 25000));
  for (int i = 0; i < 20; ++i) {
    const auto m = meter.measure([] {}, "noop", static_cast<std::size_t>(i));
    EXPECT_DOUBLE_EQ(m.energy_j.at("package"), 0.01);
  }
}

TEST(Delta, NonnegativeForEveryCounterPair) {
  const std::uint64_t range = 97;
  for (std::uint64_t a = 0; a < range; ++a) {
    for (std::uint64_t b = 0; b < range; ++b) {
      const double d = delta(sample_of(a, range), sample_of(b, range, 1ns)).at("package");
      ASSERT_GE(d, 0.0);
      ASSERT_EQ(static_cast<std::uint64_t>(std::llround(d * 1e6)), (b + range - a) % range);
    }
  }
}

TEST(Measure, OneSecondSleepAtIdlePower) {
  EnergyMeter meter(simulated(7.512));
  const auto m = meter.measure([&] { meter.probe().clock().sleep_for(1s); }, "sleep");
  EXPECT_NEAR(m.total_energy_j(), 7.512, 1e-4);
  EXPECT_NEAR(m.total_energy_j() / m.duration_s, 7.512, 1e-6);  // 1 uJ counter resolution
  EXPECT_EQ(m.label, "sleep");
}

TEST(Measure, EmptyTaskHasPositiveDuration) {
  EnergyMeter meter(simulated(5.0));
  const auto m = meter.measure([] {}, "empty");
  EXPECT_GT(m.duration_s, 0.0);
  EXPECT_GE(m.total_energy_j(), 0.0);
  EnergyMeter wall(make_probe(parse_probe_spec("simulated:5:wall")));
  const auto w = wall.measure([] {}, "empty");
  EXPECT_GT(w.duration_s, 0.0);
  EXPECT_GE(w.total_energy_j(), 0.0);
}

TEST(Measure, DeterministicUnderTheVirtualClock) {
  EnergyMeter meter(simulated(3.0));
  auto task = [&] { meter.probe().clock().sleep_for(250ms); };
  const auto a = meter.measure(task, "t");
  const auto b = meter.measure(task, "t");
  EXPECT_EQ(a.energy_j, b.energy_j);
  EXPECT_EQ(a.duration_s, b.duration_s);
}

TEST(Measure, EnergyEqualsPowerTimesDuration) {
  for (double watts : {1.0, 7.512, 35.0, 120.5}) {
    EnergyMeter meter(simulated(watts));
    for (auto sleep : {3ms, 150ms, 2000ms}) {
      const auto m = meter.measure([&] { meter.probe().clock().sleep_for(sleep); }, "t");
      EXPECT_NEAR(m.total_energy_j(), watts * m.duration_s, 1e-6 + 1e-9 * watts);
    }
  }
}

TEST(Measure, TaskFailurePropagates) {
  EnergyMeter meter(simulated(5.0));
  EXPECT_THROW(meter.measure([] { throw std::runtime_error("boom"); }, "bad"), std::runtime_error);
  EXPECT_NO_THROW(meter.measure([] {}, "after"));
}

TEST(Measure, MeasuredStagesNeverOverlap) {
  std::atomic<int> active{0};
  std::atomic<bool> overlap{false};
  auto body = [&] {
    EnergyMeter meter(make_probe(parse_probe_spec("simulated:5:wall")));
    for (int i = 0; i < 20; ++i) {
      meter.measure(
          [&] {
            if (active.fetch_add(1) != 0) overlap = true;
            std::this_thread::sleep_for(200us);
            active.fetch_sub(1);
          },
          "t");
    }
  };
  std::thread a(body), b(body);
  a.join();
  b.join();
  EXPECT_FALSE(overlap.load());
}

TEST(IdleBaseline, RecoversSimulatedIdlePower) {
  EnergyMeter meter(simulated(7.512));
  const auto b = meter.idle_baseline();
  EXPECT_EQ(b.replicates.size(), 10u);
  EXPECT_NEAR(b.joules_per_s, 7.512, 1e-6);
  const auto one = EnergyMeter(simulated(7.512)).idle_baseline(1);
  EXPECT_DOUBLE_EQ(one.joules_per_s, one.replicates[0].total_energy_j() / one.replicates[0].duration_s);
  const auto summary = aggregate(b.replicates);
  EXPECT_NEAR(summary.std, 0.0, 1e-5);
}

TEST(NetEnergy, SubtractsIdlePower) {
  IdleBaseline b;
  b.joules_per_s = 7.512;
  EXPECT_NEAR(net_energy(measured(100.0, 10.0), b), 24.88, 1e-12);
  EXPECT_NEAR(net_energy(measured(7.512 * 3, 3.0), b), 0.0, 1e-12);
  EXPECT_LT(net_energy(measured(5.0, 1.0), b), 0.0);
  EXPECT_NEAR(with_baseline(measured(5.0, 1.0), b).net_energy_j, 5.0 - 7.512, 1e-12);
}

TEST(Aggregate, Examples) {
  std::vector<Measurement> same{measured(10, 1), measured(10, 1), measured(10, 1)};
  auto s = aggregate(same);
  EXPECT_DOUBLE_EQ(s.mean, 10.0);
  EXPECT_DOUBLE_EQ(s.std, 0.0);
  std::vector<Measurement> pair{measured(8, 1), measured(12, 3)};
  s = aggregate(pair);
  EXPECT_DOUBLE_EQ(s.mean, 10.0);
  EXPECT_NEAR(s.std, 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(s.mean_duration, 2.0);
  std::vector<Measurement> single{measured(4, 1)};
  EXPECT_DOUBLE_EQ(aggregate(single).std, 0.0);
  EXPECT_THROW(aggregate(std::vector<Measurement>{}), std::invalid_argument);
  std::vector<Measurement> reversed{measured(12, 3), measured(8, 1)};
  EXPECT_DOUBLE_EQ(aggregate(reversed).mean, aggregate(pair).mean);
}

TEST(PowerTrace, PiecewiseConstantIntegral) {
  const PowerTrace t({{0.0, 10.0}, {1.0, 20.0}, {3.0, 5.0}});
  EXPECT_DOUBLE_EQ(t.watts_at(0.5), 10.0);
  EXPECT_DOUBLE_EQ(t.watts_at(1.0), 20.0);
  EXPECT_DOUBLE_EQ(t.joules_until(0.5), 5.0);
  EXPECT_DOUBLE_EQ(t.joules_until(2.0), 30.0);
  EXPECT_DOUBLE_EQ(t.joules_until(4.0), 55.0);
}

TEST(PowerTrace, LoadsTimestampWattsFile) {
  const auto path = fs::path(PETBENCH_TEST_TMP) / "trace.csv";
  write(path, "timestamp_s,watts\n0,4\n2,8\n");
  const auto t = PowerTrace::load(path);
  EXPECT_DOUBLE_EQ(t.joules_until(3.0), 16.0);
  ProbeConfig c = parse_probe_spec("trace:" + path.string());
  EnergyMeter meter(make_probe(c));
  const auto m = meter.measure([&] { meter.probe().clock().sleep_for(1s); }, "t");
  EXPECT_GT(m.total_energy_j(), 0.0);
}

TEST(ProbeSpec, Parses) {
  auto c = parse_probe_spec("simulated:12.5");
  EXPECT_EQ(c.kind, ProbeConfig::Kind::simulated);
  EXPECT_DOUBLE_EQ(c.watts, 12.5);
  EXPECT_TRUE(c.virtual_clock);
  EXPECT_FALSE(parse_probe_spec("simulated:3:wall").virtual_clock);
  EXPECT_EQ(parse_probe_spec("hardware").kind, ProbeConfig::Kind::hardware);
  EXPECT_THROW(parse_probe_spec("simulated:abc"), ConfigError);
  EXPECT_THROW(parse_probe_spec("gpu"), ConfigError);
}

TEST(PowercapProbe, ReadsPackageAndDramZones) {
  const auto root = fs::path(PETBENCH_TEST_TMP) / "powercap";
  fs::remove_all(root);
  write(root / "intel-rapl:0/name", "package-0\n");
  write(root / "intel-rapl:0/energy_uj", "1000\n");
  write(root / "intel-rapl:0/max_energy_range_uj", "262143328850\n");
  write(root / "intel-rapl:0/intel-rapl:0:0/name", "dram\n");
  write(root / "intel-rapl:0/intel-rapl:0:0/energy_uj", "50\n");
  write(root / "intel-rapl:0/intel-rapl:0:0/max_energy_range_uj", "65712999613\n");
  write(root / "intel-rapl:0/intel-rapl:0:1/name", "core\n");
  write(root / "intel-rapl:0/intel-rapl:0:1/energy_uj", "7\n");
  write(root / "intel-rapl:0/intel-rapl:0:1/max_energy_range_uj", "100\n");

  PowercapProbe probe(root);
  const auto a = probe.read();
  ASSERT_EQ(a.domains.size(), 2u);
  EXPECT_EQ(a.domains[0].name, "package-0");
  EXPECT_EQ(a.domains[0].energy_uj, 1000u);
  EXPECT_EQ(a.domains[1].name, "package-0/dram");
  write(root / "intel-rapl:0/energy_uj", "4000\n");
  const auto b = probe.read();
  const auto d = delta(a, b);
  EXPECT_DOUBLE_EQ(d.at("package-0"), 3000e-6);
  EXPECT_DOUBLE_EQ(d.at("package-0/dram"), 0.0);
}

TEST(PowercapProbe, AbsentInterfaceIsUnavailable) {
  const auto missing = fs::path(PETBENCH_TEST_TMP) / "no-such-powercap";
  EXPECT_THROW(PowercapProbe{missing}, ProbeUnavailableError);
  ProbeConfig c;
  c.kind = ProbeConfig::Kind::hardware;
  c.powercap_root = missing;
  EXPECT_THROW(make_probe(c), ProbeUnavailableError);
}
