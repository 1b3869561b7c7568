#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cqed/lindblad/evolve.hpp"
#include "cqed/pulse/sequence.hpp"

namespace cqed::lindblad {

struct PiCalibration {
  double amplitude_mhz = 0.0;  // peak Rabi frequency
  double p_excited = 0.0;      // lossless verification run
  double leakage = 0.0;        // population outside {g, e}
  double area_rad = 0.0;       // 2 pi * amplitude * envelope area
  double carrier_ghz = 0.0;
};

// Drive amplitude maximizing the excited population from |g,0> under the
// template at the baseline flux (lossless). The template carrier is replaced
// by the dressed qubit frequency when it is zero. Throws ConvergenceError
// with the best value if P_e stays below 0.995.
PiCalibration calibrate_pi_pulse(const DeviceModel& dev, const HilbertSpace& space,
                                 const pulse::GaussEdgeRect& shape, FluxBias baseline = {},
                                 double tol = 1e-9);

struct ChevronOptions {
  HilbertSpace space{3, 5};
  double tol = 1e-8;
  FluxLineOptions line;
  // Start from the dressed |e,0> after the control pulse instead of
  // simulating the pi pulse.
  bool direct_init = true;
  double pi_amplitude_mhz = 0.0;  // calibrated when zero and direct_init is false
  bool with_pump = false;
  pulse::SwapOptions swap;
  bool dissipation = true;
};

struct ChevronResult {
  std::vector<double> detunings_ghz;
  std::vector<double> tau_int_ns;
  std::vector<std::vector<double>> p_excited;  // [detuning][tau_int]
  Diagnostics diagnostics;                     // worst over all runs
  std::vector<std::string> warnings;
  double pi_amplitude_mhz = 0.0;
};

// For each (detuning, tau_int) builds the swap sequence and records the
// dressed excited-state population at the start of the measure segment.
// Runs sharing a detuning reuse the plateau evolution: each branch starts
// from a checkpoint taken where its flux waveform leaves the longest one.
ChevronResult simulate_chevron(const DeviceModel& dev, const std::vector<double>& detuning_grid_ghz,
                               const std::vector<double>& tau_int_grid_ns, double tau_d_ns,
                               const ChevronOptions& opt = {});

// CSV with header detuning_ghz,tau_int_ns,p_excited.
void write_chevron_csv(std::ostream& os, const ChevronResult& r);

}  // namespace cqed::lindblad
