#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "cqed/device.hpp"
#include "cqed/readout/fits.hpp"
#include "cqed/readout/trace.hpp"
#include "cqed/readout/vh.hpp"
#include "cqed/spectral/coupled.hpp"

using namespace cqed;

static void BM_SynthesizeTrace(benchmark::State& state) {
  const auto spec = spectral::kerr_coefficients(reference_device(), {0.0});
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(readout::synthesize_trace({0.3, 0.7}, spec, 5.0, 2000.0, ++seed));
}
BENCHMARK(BM_SynthesizeTrace);

static void BM_Vh(benchmark::State& state) {
  const auto spec = spectral::kerr_coefficients(reference_device(), {0.0});
  const auto vg = readout::synthesize_trace({1.0, 0.0}, spec, 5.0, 2000.0, 1);
  const auto vs = readout::saturation_reference(spec, 5.0, 2000.0, 2);
  const auto vm = readout::synthesize_trace({0.3, 0.7}, spec, 5.0, 2000.0, 3);
  for (auto _ : state) benchmark::DoNotOptimize(readout::v_h(vg, vs, vm));
}
BENCHMARK(BM_Vh);

static void BM_FitRabi(benchmark::State& state) {
  std::vector<double> t, y;
  for (int k = 0; k <= 80; ++k) {
    t.push_back(5.0 * k);
    y.push_back(0.4 * std::exp(-t.back() / 900.0) * std::cos(2.0 * std::numbers::pi * 0.01 * t.back() + 0.3) + 0.45);
  }
  for (auto _ : state) benchmark::DoNotOptimize(readout::fit_rabi(t, y));
}
BENCHMARK(BM_FitRabi);

static void BM_FitResurgence(benchmark::State& state) {
  std::vector<double> td;
  for (int k = 0; k < 12; ++k) td.push_back(2.64 + k * (8.8 - 2.64) / 11.0);
  const auto a = readout::recovery_amplitude_model({}, td);
  for (auto _ : state) benchmark::DoNotOptimize(readout::fit_resurgence(td, a));
}
BENCHMARK(BM_FitResurgence);
