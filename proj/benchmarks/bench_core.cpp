#include <benchmark/benchmark.h>

#include <vector>

#include "ncar/ar_model.hpp"
#include "ncar/estimation.hpp"
#include "ncar/portmanteau.hpp"
#include "ncar/stable.hpp"

namespace {

void BM_StableLogPdf(benchmark::State& state) {
  const ncar::StableDensity density({1.5, 0.3, 1.0, 0.0});
  const double x = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(density.logpdf(x));
}
BENCHMARK(BM_StableLogPdf)->Arg(0)->Arg(15)->Arg(100)->Arg(10000);

void BM_LogLikelihood(benchmark::State& state) {
  const ncar::ArModel model({2.8, -1.6});
  const ncar::StableParams noise{1.5, 0.0, 1.0, 0.0};
  const auto y = ncar::simulate(model, noise, static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(ncar::log_likelihood(y, model, noise));
}
BENCHMARK(BM_LogLikelihood)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_Battery(benchmark::State& state) {
  const auto z = ncar::stable_sample({1.5, 0.0, 1.0, 0.0}, static_cast<std::size_t>(state.range(0)), 11);
  const std::vector<std::size_t> lags{5, 10, 15, 20, 25};
  for (auto _ : state) benchmark::DoNotOptimize(ncar::run_battery(z, lags));
}
BENCHMARK(BM_Battery)->Arg(500)->Arg(5000)->Unit(benchmark::kMicrosecond);

void BM_Simulate(benchmark::State& state) {
  const ncar::ArModel model({2.8, -1.6});
  const ncar::StableParams noise{1.5, 0.0, 1.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(ncar::simulate(model, noise, 500, 3));
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
