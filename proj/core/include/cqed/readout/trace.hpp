#pragma once

// Ensemble-averaged dispersive readout traces.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cqed/spectral/coupled.hpp"

namespace cqed::readout {

enum class TraceRole { v_g, v_s, v_m };

const char* role_name(TraceRole r);

struct SignalTrace {
  double t0_ns = 0.0;
  double dt_ns = 1.0;
  std::vector<double> i;
  std::vector<double> q;
  TraceRole role = TraceRole::v_m;
  long ensemble = 1;

  std::size_t size() const { return i.size(); }
  double time(std::size_t k) const { return t0_ns + static_cast<double>(k) * dt_ns; }
};

// Throws ConfigError on unequal arrays, dt <= 0 or ensemble < 1.
void validate(const SignalTrace& t);

struct ReadoutOptions {
  double dt_ns = 2.0;
  // Tone offset from the ground-state dressed cavity. The default sits
  // half way between the two pointer states so g and e see -chi/2 and +chi/2.
  double tone_offset_mhz = 0.0;
  bool tone_at_midpoint = true;
  double ringdown_ns = 0.0;     // recorded after the tone switches off
  double single_shot_sigma = 10.0;  // per-sample noise of one shot, field units
  long ensemble = 50000;
  bool include_decay = true;
  bool noise = true;
  TraceRole role = TraceRole::v_m;
};

// Populations p_g, p_e at the start of the readout tone. The cavity field
// (units of sqrt(photons)) rings up toward the state-dependent steady state
// sqrt(nbar) * (kappa / 2) / (kappa / 2 + i delta_s); excited population
// relaxes to ground at 1 / T1 during the window. Noise is white Gaussian per
// sample with sigma = single_shot_sigma / sqrt(ensemble).
SignalTrace synthesize_trace(const std::vector<double>& populations, const spectral::DerivedSpectrum& spec,
                             double readout_nbar, double duration_ns, std::uint64_t noise_seed,
                             const ReadoutOptions& opt = {});

// Equal-mixture reference held by a saturating drive for the whole window:
// average of the ground trace and a non-relaxing excited trace.
SignalTrace saturation_reference(const spectral::DerivedSpectrum& spec, double readout_nbar, double duration_ns,
                                 std::uint64_t noise_seed, const ReadoutOptions& opt = {});

// CSV with header t_ns,i,q. Reading checks the grid is uniform.
void write_trace_csv(std::ostream& os, const SignalTrace& t);
SignalTrace read_trace_csv(std::istream& is, TraceRole role = TraceRole::v_m, long ensemble = 1);

// Independent stream for task `index` derived from a master seed.
std::uint64_t task_seed(std::uint64_t master, std::uint64_t index);

}  // namespace cqed::readout
