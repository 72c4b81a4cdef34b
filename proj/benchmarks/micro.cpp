// Microbenchmarks of the three hot stages on generated data.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "petbench/anonymizer.hpp"
#include "petbench/encoding.hpp"
#include "petbench/hierarchy.hpp"
#include "petbench/ml.hpp"
#include "petbench/rng.hpp"
#include "petbench/synthesizer.hpp"

using namespace petbench;

namespace {

// age (integer QI), city (QI with 3-level masking), job (categorical), hours, label.
Dataset generated(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<AttributeSchema> schema{
      {"age", AttributeKind::integer, PrivacyClass::quasi_identifying, "?"},
      {"city", AttributeKind::categorical, PrivacyClass::quasi_identifying, "?"},
      {"job", AttributeKind::categorical, PrivacyClass::insensitive, "?"},
      {"hours", AttributeKind::integer, PrivacyClass::insensitive, "?"},
      {"label", AttributeKind::categorical, PrivacyClass::sensitive, "?"},
  };
  std::vector<Row> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto age = 18 + rng.below(60);
    const auto city = rng.below(200);
    const auto job = rng.below(12);
    const auto hours = 10 + rng.below(50);
    const bool yes = rng.uniform() < 0.2 + 0.005 * static_cast<double>(age - 18) + 0.02 * static_cast<double>(job % 3);
    rows.push_back({std::to_string(age), std::to_string(10000 + city * 37), "job" + std::to_string(job),
                    std::to_string(hours), yes ? "yes" : "no"});
  }
  return Dataset(std::move(schema), std::move(rows), "label");
}

AnonymizationConfig anon_config(const Dataset& d, std::size_t k) {
  AnonymizationConfig c;
  c.k = k;
  c.quasi_identifiers = {"age", "city"};
  std::vector<std::string> ages, cities;
  for (const auto& r : d.rows()) {
    ages.push_back(r[0]);
    cities.push_back(r[1]);
  }
  const std::vector<double> widths{5, 10, 20};
  const std::vector<std::size_t> masked{1, 2, 3};
  c.hierarchies.emplace("age", synthesize_interval_hierarchy("age", ages, widths));
  c.hierarchies.emplace("city", synthesize_masking_hierarchy("city", cities, masked));
  return c;
}

void BM_Anonymize(benchmark::State& state) {
  const auto d = generated(static_cast<std::size_t>(state.range(0)), 1);
  const auto c = anon_config(d, 10);
  for (auto _ : state) benchmark::DoNotOptimize(anonymize(d, c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Anonymize)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_GreedyBayes(benchmark::State& state) {
  const auto d = generated(static_cast<std::size_t>(state.range(0)), 2);
  SynthesizerConfig c;
  for (auto _ : state) benchmark::DoNotOptimize(greedy_bayes(d, c));
}
BENCHMARK(BM_GreedyBayes)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Synthesize(benchmark::State& state) {
  const auto d = generated(static_cast<std::size_t>(state.range(0)), 3);
  SynthesizerConfig c;
  for (auto _ : state) benchmark::DoNotOptimize(synthesize(d, c));
}
BENCHMARK(BM_Synthesize)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_KnnPredict(benchmark::State& state) {
  const auto train_rows = generated(static_cast<std::size_t>(state.range(0)), 4);
  const auto test_rows = generated(500, 5);
  const auto enc = Encoder::fit(train_rows, "yes");
  const auto train_x = enc.transform(train_rows);
  const auto test_x = enc.transform(test_rows);
  ModelSpec spec;
  spec.kind = ModelKind::knn;
  const auto model = train(spec, train_x);
  for (auto _ : state) benchmark::DoNotOptimize(model->predict(test_x.features));
}
BENCHMARK(BM_KnnPredict)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_LogRegFit(benchmark::State& state) {
  const auto rows = generated(static_cast<std::size_t>(state.range(0)), 6);
  const auto x = Encoder::fit(rows, "yes").transform(rows);
  ModelSpec spec;
  spec.kind = ModelKind::logreg;
  spec.logreg.epochs = 100;
  for (auto _ : state) benchmark::DoNotOptimize(train(spec, x));
}
BENCHMARK(BM_LogRegFit)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
