// Serial reference loop against the OpenMP leave-one-out kernel on the
// ridge trainer, the dominant cost of the full-data procedures.

#include <benchmark/benchmark.h>

#include <random>

#include "optcs/kernels.hpp"
#include "optcs/rng.hpp"

namespace {

std::vector<optcs::LabeledSample> make_pool(std::size_t n, std::size_t d) {
  auto rng = optcs::substream(1, "bench");
  std::normal_distribution<double> normal;
  std::vector<optcs::LabeledSample> pool(n);
  for (auto& s : pool) {
    s.x.resize(d);
    for (auto& v : s.x) v = normal(rng);
    s.y = s.x[0] + normal(rng) > 0.0 ? 1.0 : 0.0;
  }
  return pool;
}

optcs::Trainer ridge_trainer() {
  optcs::TrainerSpec spec;
  spec.family = optcs::TrainerFamily::ridge;
  return optcs::make_trainer(spec);
}

void BM_LeaveOneOutSerial(benchmark::State& state) {
  const auto pool = make_pool(static_cast<std::size_t>(state.range(0)), 10);
  const auto trainer = ridge_trainer();
  double sink = 0.0;
  for (auto _ : state) {
    optcs::kernels::serial::leave_one_out(
        trainer, pool, 0, true,
        [&](std::size_t, const optcs::FittedModel& m) { sink += m.predict_mean(pool[0].x); });
  }
  benchmark::DoNotOptimize(sink);
}

void BM_LeaveOneOutOmp(benchmark::State& state) {
  const auto pool = make_pool(static_cast<std::size_t>(state.range(0)), 10);
  const auto trainer = ridge_trainer();
  const int threads = static_cast<int>(state.range(1));
  std::vector<double> out(pool.size());
  for (auto _ : state) {
    optcs::kernels::omp::leave_one_out(
        trainer, pool, 0, true,
        [&](std::size_t slot, const optcs::FittedModel& m) { out[slot] = m.predict_mean(pool[0].x); },
        threads);
  }
  benchmark::DoNotOptimize(out.data());
}

}  // namespace

BENCHMARK(BM_LeaveOneOutSerial)->Arg(100)->Arg(250);
BENCHMARK(BM_LeaveOneOutOmp)->Args({100, 2})->Args({250, 2})->Args({250, 4});
BENCHMARK_MAIN();
