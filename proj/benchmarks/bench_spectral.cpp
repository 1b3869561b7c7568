#include <benchmark/benchmark.h>

#include "cqed/device.hpp"
#include "cqed/spectral/coupled.hpp"
#include "cqed/spectral/transmission.hpp"
#include "cqed/spectral/transmon.hpp"

using namespace cqed;

static void BM_TransmonLevels(benchmark::State& state) {
  const auto p = reference_device().transmon;
  const int n_cut = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(spectral::transmon_levels(p.ej_max_ghz, p.ec_ghz, 0.0, n_cut, 5));
}
BENCHMARK(BM_TransmonLevels)->Arg(15)->Arg(30)->Arg(60);

static void BM_CalibrateFromObservables(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(spectral::calibrate_from_observables(7.203, -225.0));
}
BENCHMARK(BM_CalibrateFromObservables);

static void BM_KerrCoefficients(benchmark::State& state) {
  const auto dev = reference_device();
  for (auto _ : state) benchmark::DoNotOptimize(spectral::kerr_coefficients(dev, {0.1}));
}
BENCHMARK(BM_KerrCoefficients);

static void BM_TransmissionSweep(benchmark::State& state) {
  const auto dev = reference_device();
  std::vector<double> flux, freq;
  for (int k = 0; k < 51; ++k) flux.push_back(-0.5 + 0.02 * k);
  for (int k = 0; k < 161; ++k) freq.push_back(5.7 + 0.01 * k);
  for (auto _ : state) benchmark::DoNotOptimize(spectral::transmission_sweep(dev, flux, freq));
}
BENCHMARK(BM_TransmissionSweep)->Unit(benchmark::kMillisecond);
