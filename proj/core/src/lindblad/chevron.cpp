#include "cqed/lindblad/chevron.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include "cqed/error.hpp"
#include "cqed/spectral/coupled.hpp"
#include "cqed/spectral/transmon.hpp"

namespace cqed::lindblad {

namespace {

constexpr double kPiTarget = 0.995;

void merge(Diagnostics& into, const Diagnostics& d) {
  into.max_trace_error = std::max(into.max_trace_error, d.max_trace_error);
  into.max_hermiticity_error = std::max(into.max_hermiticity_error, d.max_hermiticity_error);
  into.min_eigenvalue = std::min(into.min_eigenvalue, d.min_eigenvalue);
  into.min_purity = std::min(into.min_purity, d.min_purity);
  into.steps.accepted += d.steps.accepted;
  into.steps.rejected += d.steps.rejected;
  into.steps.rhs_evals += d.steps.rhs_evals;
}

void check_grid(const std::vector<double>& g, const char* name) {
  if (g.empty()) throw ConfigError(fmt::format("simulate_chevron: {} grid is empty", name));
  for (std::size_t k = 1; k < g.size(); ++k) {
    if (!(g[k] > g[k - 1])) throw ConfigError(fmt::format("simulate_chevron: {} grid must be increasing", name));
  }
}

}  // namespace

PiCalibration calibrate_pi_pulse(const DeviceModel& dev, const HilbertSpace& space, const pulse::GaussEdgeRect& shape,
                                 FluxBias baseline, double tol) {
  pulse::validate(shape);
  SystemModel model(dev, space, baseline);
  pulse::GaussEdgeRect p = shape;
  if (p.carrier_freq_ghz == 0.0) p.carrier_freq_ghz = spectral::dressed_qubit_frequency(dev, baseline);

  const Operator pe = model.dressed_transmon_projector(1, baseline.phi_ratio);
  const Operator pg = model.dressed_transmon_projector(0, baseline.phi_ratio);
  Vector psi0 = Vector::Zero(space.dim());
  psi0(space.index(0, 0)) = 1.0;  // the coupled ground state is bare |g,0>

  EvolveOptions eo;
  eo.tol = tol;
  eo.dissipation = false;
  eo.report_times = {p.length_total_ns};

  auto run = [&](double amp) {
    pulse::PulseSequence seq;
    seq.baseline = baseline;
    pulse::GaussEdgeRect q = p;
    q.amplitude = amp;
    seq.segments.push_back({pulse::Role::control, 0.0, q});
    Controls c;
    c.flux = FluxSchedule::constant(baseline.phi_ratio);
    c.drive = DriveSchedule(seq, model.frame_ghz());
    Trajectory tr = evolve_closed(psi0, 0.0, c, model, {pe, pg}, eo);
    return std::pair{tr.values[0].back(), tr.values[1].back()};
  };

  // Area theorem seed: 2 pi * amp * area = pi.
  pulse::GaussEdgeRect unit = p;
  unit.amplitude = 1.0;
  const double seed = 0.5 / (1e-3 * pulse::envelope_area(unit));
  std::uintmax_t iters = 60;
  auto [amp, neg_pe] = boost::math::tools::brent_find_minima([&](double a) { return -run(a).first; }, 0.7 * seed,
                                                             1.3 * seed, 30, iters);
  const auto [pe_best, pg_best] = run(amp);
  PiCalibration out;
  out.amplitude_mhz = amp;
  out.p_excited = pe_best;
  out.leakage = std::max(0.0, 1.0 - pe_best - pg_best);
  out.area_rad = 2.0 * std::numbers::pi * 1e-3 * amp * pulse::envelope_area(unit);
  out.carrier_ghz = p.carrier_freq_ghz;
  (void)neg_pe;
  if (pe_best < kPiTarget) {
    throw ConvergenceError(
        fmt::format("calibrate_pi_pulse: best P_e = {:.5f} at {:.4f} MHz (leakage {:.3g}) below {}", pe_best, amp,
                    out.leakage, kPiTarget),
        kPiTarget - pe_best);
  }
  return out;
}

ChevronResult simulate_chevron(const DeviceModel& dev, const std::vector<double>& detuning_grid,
                               const std::vector<double>& tau_grid, double tau_d_ns, const ChevronOptions& opt) {
  check_grid(detuning_grid, "detuning");
  check_grid(tau_grid, "tau_int");
  if (tau_grid.front() < 0.0) throw ConfigError("simulate_chevron: tau_int must be >= 0");

  ChevronResult res;
  res.detunings_ghz = detuning_grid;
  res.tau_int_ns = tau_grid;
  res.diagnostics.min_eigenvalue = 1.0;

  pulse::SwapOptions swap = opt.swap;
  const FluxBias baseline{spectral::fold_flux(swap.baseline.phi_ratio)};
  SystemModel model(dev, opt.space, baseline);
  if (!opt.direct_init) {
    double amp = opt.pi_amplitude_mhz;
    if (amp == 0.0) amp = calibrate_pi_pulse(dev, opt.space, swap.control, baseline).amplitude_mhz;
    swap.control.amplitude = amp;
    res.pi_amplitude_mhz = amp;
  }
  const Operator pe = model.dressed_transmon_projector(1, baseline.phi_ratio);
  const SystemModel::Dressed dressed = model.dressed(baseline.phi_ratio);

  EvolveOptions eo;
  eo.tol = opt.tol;
  eo.dissipation = opt.dissipation;

  for (double det : detuning_grid) {
    std::vector<pulse::PulseSequence> seqs;
    seqs.reserve(tau_grid.size());
    for (double tau : tau_grid) seqs.push_back(pulse::build_swap_sequence(dev, det, tau, tau_d_ns, opt.with_pump, swap));

    const pulse::PulseSequence& master = seqs.back();
    const pulse::Segment* ctrl = master.find(pulse::Role::control);
    const pulse::Segment* flux = master.find(pulse::Role::flux);
    const double t_begin = opt.direct_init ? ctrl->end_ns() : ctrl->start_ns;
    const double span = std::get<pulse::FluxPulse>(flux->shape).edge_span_ns();

    auto measure_time = [](const pulse::PulseSequence& s) { return s.find(pulse::Role::measure)->start_ns; };
    std::vector<double> branch(tau_grid.size());
    for (std::size_t j = 0; j < tau_grid.size(); ++j) {
      const double fall_start = flux->start_ns + span + tau_grid[j];
      if (opt.line.filter) {
        // Last sample at or before the fall start: the sampled waveforms agree up to it.
        const double m = std::floor((fall_start - t_begin) / opt.line.dt_ns + 1e-9);
        branch[j] = t_begin + m * opt.line.dt_ns;
      } else {
        branch[j] = fall_start;
      }
    }

    DensityMatrix rho0 = opt.direct_init ? DensityMatrix::pure(dressed.state(1, 0), t_begin)
                                         : DensityMatrix::basis(opt.space, 0, 0, t_begin);
    Controls mc = make_controls(master, model.frame_ghz(), opt.line, t_begin, measure_time(master), !opt.direct_init);
    for (const auto& w : mc.warnings) res.warnings.push_back(fmt::format("detuning {} GHz: {}", det, w));
    EvolveOptions mo = eo;
    mo.checkpoint_times = branch;
    Trajectory trunk = evolve(rho0, mc, model, {}, mo);
    merge(res.diagnostics, trunk.diagnostics);

    std::vector<double> row(tau_grid.size());
    for (std::size_t j = 0; j < tau_grid.size(); ++j) {
      const auto it = std::find_if(trunk.checkpoints.begin(), trunk.checkpoints.end(),
                                   [&](const DensityMatrix& d) { return d.time_ns() == branch[j]; });
      if (it == trunk.checkpoints.end()) throw NumericError("simulate_chevron: missing branch checkpoint");
      Controls bc = make_controls(seqs[j], model.frame_ghz(), opt.line, t_begin, measure_time(seqs[j]), !opt.direct_init);
      EvolveOptions bo = eo;
      bo.report_times = {measure_time(seqs[j])};
      Trajectory tr = evolve(*it, bc, model, {pe}, bo);
      merge(res.diagnostics, tr.diagnostics);
      row[j] = tr.values[0].back();
    }
    res.p_excited.push_back(std::move(row));
  }
  return res;
}

void write_chevron_csv(std::ostream& os, const ChevronResult& r) {
  os << "detuning_ghz,tau_int_ns,p_excited\n";
  for (std::size_t i = 0; i < r.detunings_ghz.size(); ++i) {
    for (std::size_t j = 0; j < r.tau_int_ns.size(); ++j) {
      os << fmt::format("{:.10g},{:.10g},{:.12g}\n", r.detunings_ghz[i], r.tau_int_ns[j], r.p_excited[i][j]);
    }
  }
}

}  // namespace cqed::lindblad
