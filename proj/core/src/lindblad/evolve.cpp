#include "cqed/lindblad/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Sparse>
#include <fmt/format.h>

#include "cqed/error.hpp"

namespace cqed::lindblad {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kBreakEps = 1e-9;  // ns

double first_after(double t, std::initializer_list<double> pts) {
  double best = kNoBreak;
  for (double p : pts) {
    if (p > t + kBreakEps) best = std::min(best, p);
  }
  return best;
}

using Sparse = Eigen::SparseMatrix<cplx>;

// Time-dependent pieces shared by the open and closed right-hand sides.
struct Generator {
  const SystemModel& model;
  const Controls& controls;
  Matrix static_part;  // 2 pi * coupling (- i/2 sum L^dag L for open systems), rad/ns
  Matrix b, b_dag;

  Generator(const SystemModel& m, const Controls& c, bool open) : model(m), controls(c) {
    static_part = (kTwoPi * m.coupling()).cast<cplx>();
    if (open) {
      for (const auto& l : m.collapse()) static_part -= cplx(0.0, 0.5) * (l.m.adjoint() * l.m);
    }
    b = m.b().m;
    b_dag = b.adjoint();
  }

  // Effective generator in rad/ns at time t.
  void assemble(double t, Matrix& h) const {
    h = static_part;
    const Eigen::VectorXd d = model.diagonal(controls.flux.value(t));
    h.diagonal() += (kTwoPi * d).cast<cplx>();
    if (!controls.drive.empty()) {
      const cplx c = kTwoPi * controls.drive.coefficient(t);
      if (c != cplx(0.0, 0.0)) {
        h.noalias() += c * b_dag;
        h.noalias() += std::conj(c) * b;
      }
    }
  }
};

struct OpenRhs {
  const Generator* gen;
  std::vector<Sparse> ls;
  std::vector<Sparse> ls_dag;
  mutable Matrix h, x, tmp;

  void operator()(double t, const Matrix& rho, Matrix& out) const {
    gen->assemble(t, h);
    x.noalias() = h * rho;
    x *= cplx(0.0, -1.0);
    out = x + x.adjoint();
    for (std::size_t k = 0; k < ls.size(); ++k) {
      tmp.noalias() = ls[k] * rho;
      out.noalias() += tmp * ls_dag[k];
    }
  }
};

struct ClosedRhs {
  const Generator* gen;
  mutable Matrix h;

  void operator()(double t, const Matrix& psi, Matrix& out) const {
    gen->assemble(t, h);
    out.noalias() = h * psi;
    out *= cplx(0.0, -1.0);
  }
};

std::vector<double> stop_times(double t0, const EvolveOptions& opt) {
  std::vector<double> stops = opt.report_times;
  stops.insert(stops.end(), opt.checkpoint_times.begin(), opt.checkpoint_times.end());
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  if (stops.empty()) throw ConfigError("evolve: no report times");
  if (stops.front() < t0 - kBreakEps) throw ConfigError("evolve: report time before the initial state");
  return stops;
}

bool contains(const std::vector<double>& v, double t) {
  return std::binary_search(v.begin(), v.end(), t);
}

template <class Rhs, class Measure>
void drive_integrator(Dopri5<Rhs>& solver, double t0, Matrix& y, const Controls& controls,
                      const EvolveOptions& opt, Measure&& measure) {
  if (!(opt.tol >= 1e-10 && opt.tol <= 1e-4)) throw ConfigError("evolve: tol must lie in [1e-10, 1e-4]");
  const std::vector<double> stops = stop_times(t0, opt);
  double t = t0;
  for (double stop : stops) {
    while (t < stop - kBreakEps) {
      const double next = std::min({stop, controls.flux.next_break(t), controls.drive.next_break(t)});
      const double mid = 0.5 * (t + next);
      const bool fine = controls.flux.varying(mid) || controls.drive.active(mid);
      const double hmax = fine ? opt.max_step_edge_ns : opt.max_step_ns;
      solver.advance(t, y, next, hmax);
      t = next;
    }
    t = stop;
    measure(stop, y);
  }
}

void record_density(Trajectory& tr, const Matrix& rho, double t, const std::vector<Operator>& obs,
                    const EvolveOptions& opt, bool report, bool checkpoint) {
  DensityMatrix dm(rho, t);
  auto& d = tr.diagnostics;
  const double min_eig = dm.min_eigenvalue();
  d.max_trace_error = std::max(d.max_trace_error, dm.trace_error());
  d.max_hermiticity_error = std::max(d.max_hermiticity_error, dm.hermiticity_error());
  d.min_eigenvalue = std::min(d.min_eigenvalue, min_eig);
  d.min_purity = std::min(d.min_purity, dm.purity());
  if (min_eig < opt.positivity_abort) {
    throw PositivityError(fmt::format(
        "density matrix eigenvalue {:.3g} at t = {:.6g} ns (trace error {:.3g}, hermiticity {:.3g}); lower tol",
        min_eig, t, dm.trace_error(), dm.hermiticity_error()));
  }
  if (report) {
    tr.times.push_back(t);
    for (std::size_t k = 0; k < obs.size(); ++k) tr.values[k].push_back(dm.expectation(obs[k]));
  }
  if (checkpoint) tr.checkpoints.push_back(dm);
  tr.final_state = std::move(dm);
}

Trajectory prepare(const std::vector<Operator>& obs, const SystemModel& model) {
  Trajectory tr;
  for (const auto& o : obs) {
    check(o, model.space());
    tr.names.push_back(o.name);
  }
  tr.values.resize(obs.size());
  return tr;
}

}  // namespace

FluxSchedule FluxSchedule::constant(double phi) {
  FluxSchedule s;
  s.baseline_ = phi;
  return s;
}

FluxSchedule FluxSchedule::analytic(const pulse::PulseSequence& seq) {
  FluxSchedule s;
  s.baseline_ = seq.baseline.phi_ratio;
  s.gain_ = seq.flux_gain;
  for (const auto& seg : seq.segments) {
    if (seg.role == pulse::Role::flux) s.pulses_.emplace_back(seg.start_ns, std::get<pulse::FluxPulse>(seg.shape));
  }
  return s;
}

FluxSchedule FluxSchedule::sampled(pulse::Waveform w) {
  if (w.values.empty()) throw ConfigError("FluxSchedule: empty waveform");
  FluxSchedule s;
  s.baseline_ = w.values.front();
  s.samples_ = std::move(w);
  return s;
}

double FluxSchedule::value(double t) const {
  if (samples_) return samples_->at(t);
  double phi = baseline_;
  for (const auto& [start, fp] : pulses_) {
    const double u = t - start;
    if (u >= 0.0 && u <= fp.length_total_ns()) {
      phi += gain_ * (pulse::sample_envelope(fp, u) - fp.baseline.phi_ratio);
    }
  }
  return phi;
}

double FluxSchedule::next_break(double t) const {
  if (samples_) {
    const auto& w = *samples_;
    const double x = (t + kBreakEps - w.t0_ns) / w.dt_ns;
    if (x < 0.0) return w.t0_ns;
    const auto k = static_cast<std::size_t>(std::floor(x)) + 1;
    return k < w.values.size() ? w.time(k) : kNoBreak;
  }
  double best = kNoBreak;
  for (const auto& [start, fp] : pulses_) {
    const double span = fp.edge_span_ns();
    best = std::min(best, first_after(t, {start, start + span, start + span + fp.plateau_length_ns,
                                          start + fp.length_total_ns()}));
  }
  return best;
}

bool FluxSchedule::varying(double t) const {
  if (samples_) return t >= samples_->t0_ns && t < samples_->t_end_ns();
  for (const auto& [start, fp] : pulses_) {
    const double u = t - start;
    const double span = fp.edge_span_ns();
    if ((u > 0.0 && u < span) || (u > span + fp.plateau_length_ns && u < fp.length_total_ns())) return true;
  }
  return false;
}

DriveSchedule::DriveSchedule(const pulse::PulseSequence& seq, double frame_ghz) : frame_ghz_(frame_ghz) {
  for (const auto& seg : seq.segments) {
    if (seg.role == pulse::Role::control) {
      pulses_.emplace_back(seg.start_ns, std::get<pulse::GaussEdgeRect>(seg.shape));
    }
  }
}

cplx DriveSchedule::coefficient(double t) const {
  cplx c(0.0, 0.0);
  for (const auto& [start, p] : pulses_) {
    const double u = t - start;
    if (u < 0.0 || u > p.length_total_ns) continue;
    // Rabi frequency in MHz -> Omega / 2 in GHz.
    const double half_rabi = 0.5e-3 * pulse::sample_envelope(p, u);
    const double theta = kTwoPi * (p.carrier_freq_ghz - frame_ghz_) * t + p.phase_rad;
    c += half_rabi * std::exp(cplx(0.0, -theta));
  }
  return c;
}

double DriveSchedule::next_break(double t) const {
  double best = kNoBreak;
  for (const auto& [start, p] : pulses_) {
    best = std::min(best, first_after(t, {start, start + p.edge_length_ns,
                                          start + p.length_total_ns - p.edge_length_ns, start + p.length_total_ns}));
  }
  return best;
}

bool DriveSchedule::active(double t) const {
  for (const auto& [start, p] : pulses_) {
    if (t > start && t < start + p.length_total_ns) return true;
  }
  return false;
}

Controls make_controls(const pulse::PulseSequence& seq, double frame_ghz, const FluxLineOptions& line,
                       double t_begin, double t_end, bool with_drive) {
  Controls c;
  if (with_drive) c.drive = DriveSchedule(seq, frame_ghz);
  if (!line.filter) {
    if (line.precompensate) throw ConfigError("precompensation requires a line filter");
    c.flux = FluxSchedule::analytic(seq);
    return c;
  }
  pulse::Waveform w = pulse::flux_waveform(seq, line.dt_ns, t_begin, t_end);
  if (line.precompensate) {
    pulse::Precompensation pc = pulse::precompensate(w, *line.filter, line.clamp);
    c.warnings = pc.warnings;
    w = std::move(pc.waveform);
  }
  c.flux = FluxSchedule::sampled(pulse::apply_line_filter(w, *line.filter));
  return c;
}

const std::vector<double>& Trajectory::series(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == name) return values[k];
  }
  throw NumericError("trajectory has no observable '" + name + "'");
}

Trajectory evolve(const DensityMatrix& rho0, const Controls& controls, const SystemModel& model,
                  const std::vector<Operator>& observables, const EvolveOptions& opt) {
  if (rho0.dim() != model.space().dim()) throw NumericError("evolve: state dimension does not match the space");
  // Checkpoints from an earlier run carry integration error, so positivity
  // is held to the abort threshold rather than the strict state invariant.
  if (rho0.hermiticity_error() > 1e-10 || rho0.trace_error() > 1e-8) rho0.check();
  if (rho0.min_eigenvalue() < opt.positivity_abort) {
    throw PositivityError(fmt::format("initial state eigenvalue {:.3g}", rho0.min_eigenvalue()));
  }
  Trajectory tr = prepare(observables, model);
  const bool open = opt.dissipation && !model.collapse().empty();
  Generator gen(model, controls, open);
  OpenRhs rhs{&gen, {}, {}, {}, {}, {}};
  if (open) {
    for (const auto& l : model.collapse()) {
      rhs.ls.push_back(l.m.sparseView());
      rhs.ls_dag.push_back(Sparse(rhs.ls.back().adjoint()));
    }
  }
  EvolveOptions o = opt;
  if (o.report_times.empty() && o.checkpoint_times.empty()) {
    throw ConfigError("evolve: give at least one report time");
  }
  std::sort(o.report_times.begin(), o.report_times.end());
  std::sort(o.checkpoint_times.begin(), o.checkpoint_times.end());
  Dopri5<OpenRhs> solver(rhs, kLocalToleranceFactor * o.tol);
  Matrix y = rho0.rho();
  drive_integrator(solver, rho0.time_ns(), y, controls, o, [&](double t, const Matrix& rho) {
    record_density(tr, rho, t, observables, o, contains(o.report_times, t), contains(o.checkpoint_times, t));
  });
  tr.diagnostics.steps = solver.stats();
  return tr;
}

Trajectory evolve(const DensityMatrix& rho0, const pulse::PulseSequence& seq, const SystemModel& model,
                  const std::vector<Operator>& observables, const EvolveOptions& opt, const FluxLineOptions& line) {
  double t_end = rho0.time_ns();
  for (double t : opt.report_times) t_end = std::max(t_end, t);
  for (double t : opt.checkpoint_times) t_end = std::max(t_end, t);
  Controls c = make_controls(seq, model.frame_ghz(), line, rho0.time_ns(), t_end);
  return evolve(rho0, c, model, observables, opt);
}

Trajectory evolve_closed(const Vector& psi0, double t0, const Controls& controls, const SystemModel& model,
                         const std::vector<Operator>& observables, const EvolveOptions& opt) {
  if (psi0.size() != model.space().dim()) throw NumericError("evolve_closed: state dimension does not match the space");
  Trajectory tr = prepare(observables, model);
  Generator gen(model, controls, false);
  ClosedRhs rhs{&gen, {}};
  EvolveOptions o = opt;
  std::sort(o.report_times.begin(), o.report_times.end());
  std::sort(o.checkpoint_times.begin(), o.checkpoint_times.end());
  Dopri5<ClosedRhs> solver(rhs, kLocalToleranceFactor * o.tol);
  Matrix y = psi0 / psi0.norm();
  tr.diagnostics.min_eigenvalue = 0.0;
  drive_integrator(solver, t0, y, controls, o, [&](double t, const Matrix& psi) {
    auto& d = tr.diagnostics;
    const double norm_err = std::abs(psi.squaredNorm() - 1.0);
    d.max_trace_error = std::max(d.max_trace_error, norm_err);
    DensityMatrix dm(psi * psi.adjoint(), t);
    if (contains(o.report_times, t)) {
      tr.times.push_back(t);
      for (std::size_t k = 0; k < observables.size(); ++k) tr.values[k].push_back(dm.expectation(observables[k]));
    }
    if (contains(o.checkpoint_times, t)) tr.checkpoints.push_back(dm);
    tr.final_state = std::move(dm);
  });
  tr.diagnostics.steps = solver.stats();
  return tr;
}

}  // namespace cqed::lindblad
