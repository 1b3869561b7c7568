#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cqed::pulse {

// Uniformly sampled waveform; sample k sits at t0 + k * dt.
struct Waveform {
  double t0_ns = 0.0;
  double dt_ns = 0.1;
  std::vector<double> values;

  double time(std::size_t k) const { return t0_ns + static_cast<double>(k) * dt_ns; }
  double t_end_ns() const { return values.empty() ? t0_ns : time(values.size() - 1); }
  // Linear interpolation, clamped to the end samples outside the window.
  double at(double t_ns) const;
};

// Unity-DC-gain low-pass cascade of identical first-order stages; f3db is the
// overall -3 dB frequency of the cascade.
struct LineFilter {
  double f3db_mhz = 100.0;
  int order = 1;

  // Time constant of one stage in ns.
  double stage_tau_ns() const;
};

void validate(const LineFilter& f);

// Largest sample step accepted by apply_line_filter.
double max_filter_dt_ns(const LineFilter& f);

// Exact response of each first-order stage to an input held at x_k over
// (t_{k-1}, t_k]: y_k = a y_{k-1} + (1 - a) x_k, a = exp(-dt / tau). The
// filter starts in steady state at the first sample.
// Throws SamplingTooCoarseError if dt > 0.05 / f3db.
Waveform apply_line_filter(const Waveform& input, const LineFilter& f);

struct Precompensation {
  Waveform waveform;
  double residual = 0.0;  // max |filter(waveform) - target|
  std::size_t clamped_samples = 0;
  std::vector<std::string> warnings;
};

// Inverts the cascade sample by sample and clamps |w| <= clamp.
Precompensation precompensate(const Waveform& target, const LineFilter& f, double clamp);

// CSV with header t_ns,value.
void write_waveform_csv(std::ostream& os, const Waveform& w);

}  // namespace cqed::pulse
