#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cqed/lindblad/dopri5.hpp"
#include "cqed/lindblad/model.hpp"
#include "cqed/pulse/filter.hpp"
#include "cqed/pulse/sequence.hpp"

namespace cqed::lindblad {

inline constexpr double kNoBreak = std::numeric_limits<double>::infinity();

// Reduced flux seen by the SQUID as a function of time.
class FluxSchedule {
 public:
  static FluxSchedule constant(double phi_ratio);
  // Ideal flux pulses taken straight from the sequence envelopes.
  static FluxSchedule analytic(const pulse::PulseSequence& seq);
  // Linear interpolation between samples; the value holds at the end samples
  // outside the window.
  static FluxSchedule sampled(pulse::Waveform w);

  double value(double t_ns) const;
  // Smallest time > t where the schedule is not smooth.
  double next_break(double t_ns) const;
  // True where the flux varies (edges, or anywhere on a sampled window).
  bool varying(double t_ns) const;

  const std::optional<pulse::Waveform>& samples() const { return samples_; }

 private:
  double baseline_ = 0.0;
  double gain_ = 1.0;
  std::vector<std::pair<double, pulse::FluxPulse>> pulses_;  // start, shape
  std::optional<pulse::Waveform> samples_;
};

// Transmon drive from the control segments: b^dag coefficient in GHz in the
// frame rotating at frame_ghz.
class DriveSchedule {
 public:
  DriveSchedule() = default;
  DriveSchedule(const pulse::PulseSequence& seq, double frame_ghz);

  bool empty() const { return pulses_.empty(); }
  cplx coefficient(double t_ns) const;
  double next_break(double t_ns) const;
  bool active(double t_ns) const;

 private:
  double frame_ghz_ = 0.0;
  std::vector<std::pair<double, pulse::GaussEdgeRect>> pulses_;
};

struct FluxLineOptions {
  std::optional<pulse::LineFilter> filter;
  bool precompensate = false;
  double clamp = 0.5;  // bound on the precompensated reduced flux
  double dt_ns = 0.1;
};

struct Controls {
  FluxSchedule flux = FluxSchedule::constant(0.0);
  DriveSchedule drive;
  std::vector<std::string> warnings;
};

// Ideal flux when no filter is set; otherwise the sequence is sampled on
// [t_begin, t_end], optionally precompensated, and filtered.
Controls make_controls(const pulse::PulseSequence& seq, double frame_ghz, const FluxLineOptions& line,
                       double t_begin_ns, double t_end_ns, bool with_drive = true);

inline constexpr double kLocalToleranceFactor = 0.05;

struct EvolveOptions {
  // Accuracy target for reported expectation values. Global error grows to
  // about ten times the per-step tolerance over a chevron branch, so the
  // step controller runs at kLocalToleranceFactor * tol.
  double tol = 1e-8;
  double max_step_edge_ns = 0.05;
  double max_step_ns = 0.5;
  bool dissipation = true;
  std::vector<double> report_times;      // ascending, >= start; empty means end only
  std::vector<double> checkpoint_times;  // states stored here
  double positivity_abort = -1e-6;
};

struct Diagnostics {
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 1.0;
  double min_purity = 1.0;
  StepStats steps;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;  // [observable][time]
  std::vector<DensityMatrix> checkpoints;
  Diagnostics diagnostics;
  DensityMatrix final_state;

  // Values of the named observable; throws if absent.
  const std::vector<double>& series(const std::string& name) const;
};

// Master equation in the frame rotating at the bare cavity frequency:
// d rho/dt = -i[H(t), rho] + sum_k D[L_k] rho, integrated from rho0.time_ns()
// to the last report time.
Trajectory evolve(const DensityMatrix& rho0, const Controls& controls, const SystemModel& model,
                  const std::vector<Operator>& observables, const EvolveOptions& opt);

Trajectory evolve(const DensityMatrix& rho0, const pulse::PulseSequence& seq, const SystemModel& model,
                  const std::vector<Operator>& observables, const EvolveOptions& opt,
                  const FluxLineOptions& line = {});

// Schroedinger evolution of a pure state (no dissipation). Same reporting as
// evolve; checkpoints hold the pure-state density matrices.
Trajectory evolve_closed(const Vector& psi0, double t0_ns, const Controls& controls, const SystemModel& model,
                         const std::vector<Operator>& observables, const EvolveOptions& opt);

}  // namespace cqed::lindblad
