#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cqed/device.hpp"
#include "cqed/pulse/filter.hpp"
#include "cqed/pulse/shapes.hpp"

namespace cqed::pulse {

enum class Role { pump, control, flux, measure };

const char* role_name(Role r);
Role role_from_name(const std::string& s);

struct Segment {
  Role role = Role::control;
  double start_ns = 0.0;
  Shape shape;

  double end_ns() const { return start_ns + duration_ns(shape); }
};

struct PulseSequence {
  std::vector<Segment> segments;  // ordered by start time
  double tau_d_ns = 0.0;          // pump end to control start
  double tau_int_ns = 0.0;        // flux plateau length
  FluxBias baseline;              // flux outside flux segments
  double flux_gain = 1.0;         // real flux step = gain * commanded step

  double end_ns() const;
  // First segment with the role, or nullptr.
  const Segment* find(Role r) const;
};

// Throws ConfigError naming the first broken invariant: negative times,
// overlap within a role, tau_int != flux plateau, tau_d != control start -
// pump end.
void validate(const PulseSequence& seq);

// Reduced flux on [t_begin, t_end] sampled at dt, baseline outside pulses.
Waveform flux_waveform(const PulseSequence& seq, double dt_ns, double t_begin_ns, double t_end_ns);

// Line-oriented text format, one segment per line with fields in a fixed
// order and times printed with 17 significant digits.
void write_sequence(std::ostream& os, const PulseSequence& seq);
std::string to_text(const PulseSequence& seq);
PulseSequence read_sequence(std::istream& is);
PulseSequence from_text(const std::string& s);

struct SwapOptions {
  // Real flux = gain * commanded flux (mutual-inductance scale).
  double flux_gain = 1.0;
  double flux_edge_sigma_ns = 1.1;
  // pi pulse; amplitude comes from calibrate_pi_pulse.
  GaussEdgeRect control{35.0, 17.5, 9.0, 0.0, 0.0, 0.0};
  double pump_duration_ns = 2000.0;
  double pump_photons = 2.1e4;
  double settle_ns = 10.0;  // gap around the flux pulse
  double measure_duration_ns = 2000.0;
  double measure_nbar = 5.0;
  FluxBias baseline{0.0};
};

// Optional pump at the bare cavity frequency, delay tau_d, pi pulse, flux
// pulse that brings the bare qubit to omega_bare + target_detuning, measure.
// Throws UnreachableDetuningError if the target lies outside the tuning range.
PulseSequence build_swap_sequence(const DeviceModel& dev, double target_detuning_ghz, double tau_int_ns,
                                  double tau_d_ns, bool with_pump, const SwapOptions& opt = {});

}  // namespace cqed::pulse
