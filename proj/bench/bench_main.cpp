// Parallel kernels against the serial reference.

#include <benchmark/benchmark.h>

#include <random>

#include "statemon/scenario.hpp"
#include "statemon/statespace.hpp"

using namespace statemon;

namespace {

const Timestamp kStart{std::chrono::seconds{1294617600}};

struct Fixture {
  ResolvedSpec spec;
  Grid grid;
  Dataset data;
};

const Fixture& scenario_fixture(int days) {
  static std::map<int, Fixture> cache;
  auto it = cache.find(days);
  if (it != cache.end()) return it->second;
  ScenarioConfig cfg;
  cfg.days = days;
  const ScenarioOutput out = generate(cfg);
  ResolveResult base = load_spec(out.spec_text);
  ResolveResult rr = resolve_spec(with_inferred_rules(base.spec->document).document);
  const SensorCsv csv = parse_sensor_csv(out.sensor_csv);
  Fixture f{std::move(*rr.spec), out.grid, preprocess(group_by_sensor(csv.samples), out.grid, {}).dataset};
  return cache.emplace(days, std::move(f)).first->second;
}

std::map<std::string, std::vector<RawSample>> raw_sensors(int sensors, int days) {
  const Grid grid = Grid::days(kStart, days);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> value(15.0, 27.0);
  std::uniform_int_distribution<int> jitter(0, 59);
  std::bernoulli_distribution drop(0.02);
  std::map<std::string, std::vector<RawSample>> out;
  for (int s = 0; s < sensors; ++s) {
    const std::string id = "s" + std::to_string(s);
    auto& v = out[id];
    for (std::size_t k = 0; k < grid.cell_count(); ++k) {
      if (!drop(rng)) v.push_back({id, grid.at(k) + std::chrono::seconds{jitter(rng)}, value(rng)});
    }
  }
  return out;
}

void BM_StateSpaceParallel(benchmark::State& state) {
  const Fixture& f = scenario_fixture(static_cast<int>(state.range(0)));
  EvalContext ctx(f.spec, f.data, f.grid);
  const StateSpaceDef& ss = *f.spec.find_as<StateSpaceDef>(kScenarioStateSpace);
  for (auto _ : state) benchmark::DoNotOptimize(eval_statespace(ss, ctx));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.grid.cell_count()));
}

void BM_StateSpaceReference(benchmark::State& state) {
  const Fixture& f = scenario_fixture(static_cast<int>(state.range(0)));
  EvalContext ctx(f.spec, f.data, f.grid);
  const StateSpaceDef& ss = *f.spec.find_as<StateSpaceDef>(kScenarioStateSpace);
  for (auto _ : state) benchmark::DoNotOptimize(eval_statespace_reference(ss, ctx));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.grid.cell_count()));
}

void BM_RuleParallel(benchmark::State& state) {
  const Fixture& f = scenario_fixture(static_cast<int>(state.range(0)));
  EvalContext ctx(f.spec, f.data, f.grid);
  for (auto _ : state) benchmark::DoNotOptimize(eval_element_series("isRoomControlSatisfied", ctx));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.grid.cell_count()));
}

void BM_RuleReference(benchmark::State& state) {
  const Fixture& f = scenario_fixture(static_cast<int>(state.range(0)));
  EvalContext ctx(f.spec, f.data, f.grid);
  for (auto _ : state) benchmark::DoNotOptimize(eval_element_series_reference("isRoomControlSatisfied", ctx));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.grid.cell_count()));
}

void BM_PreprocessParallel(benchmark::State& state) {
  const auto raw = raw_sensors(static_cast<int>(state.range(0)), 30);
  const Grid grid = Grid::days(kStart, 30);
  for (auto _ : state) benchmark::DoNotOptimize(preprocess(raw, grid, {}));
  state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<std::int64_t>(grid.cell_count()));
}

void BM_PreprocessSerial(benchmark::State& state) {
  const auto raw = raw_sensors(static_cast<int>(state.range(0)), 30);
  const Grid grid = Grid::days(kStart, 30);
  for (auto _ : state) benchmark::DoNotOptimize(preprocess_serial(raw, grid, {}));
  state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<std::int64_t>(grid.cell_count()));
}

}  // namespace

BENCHMARK(BM_StateSpaceParallel)->Arg(7)->Arg(365)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StateSpaceReference)->Arg(7)->Arg(365)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RuleParallel)->Arg(365)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RuleReference)->Arg(365)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PreprocessParallel)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PreprocessSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
