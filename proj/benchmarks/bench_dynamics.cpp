#include <benchmark/benchmark.h>

#include "cqed/device.hpp"
#include "cqed/lindblad/chevron.hpp"
#include "cqed/lindblad/evolve.hpp"
#include "cqed/pulse/filter.hpp"
#include "cqed/spectral/coupled.hpp"

using namespace cqed;

static void BM_ConstantFluxEvolve(benchmark::State& state) {
  const auto dev = reference_device();
  const lindblad::HilbertSpace space{static_cast<int>(state.range(0)), static_cast<int>(state.range(1))};
  const double phi = spectral::flux_for_detuning(dev, 0.0);
  const lindblad::SystemModel model(dev, space, {phi});
  lindblad::Controls c;
  c.flux = lindblad::FluxSchedule::constant(phi);
  lindblad::EvolveOptions opt;
  opt.report_times = {10.0};
  const auto rho0 = lindblad::DensityMatrix::basis(space, 1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(lindblad::evolve(rho0, c, model, {}, opt));
}
BENCHMARK(BM_ConstantFluxEvolve)->Args({3, 5})->Args({4, 7})->Unit(benchmark::kMillisecond);

static void BM_ChevronRow(benchmark::State& state) {
  const auto dev = reference_device();
  std::vector<double> tau;
  for (int k = 0; k < state.range(0); ++k) tau.push_back(0.2 * k);
  for (auto _ : state) benchmark::DoNotOptimize(lindblad::simulate_chevron(dev, {0.0}, tau, 0.0, {}));
}
BENCHMARK(BM_ChevronRow)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_LineFilter(benchmark::State& state) {
  pulse::Waveform w{0.0, 0.1, std::vector<double>(static_cast<std::size_t>(state.range(0)), 0.0)};
  for (std::size_t k = w.values.size() / 4; k < w.values.size() / 2; ++k) w.values[k] = 0.2;
  for (auto _ : state) benchmark::DoNotOptimize(pulse::apply_line_filter(w, {100.0, 2}));
}
BENCHMARK(BM_LineFilter)->Arg(1000)->Arg(100000);
