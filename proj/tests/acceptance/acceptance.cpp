// One line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cqed/device.hpp"
#include "cqed/lindblad/chevron.hpp"
#include "cqed/lindblad/evolve.hpp"
#include "cqed/readout/fits.hpp"
#include "cqed/readout/trace.hpp"
#include "cqed/readout/vh.hpp"
#include "cqed/spectral/coupled.hpp"
#include "cqed/spectral/transmon.hpp"

using namespace cqed;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Hygiene {
  double trace = 0.0, herm = 0.0, min_eig = 1.0;
  void add(const lindblad::Diagnostics& d) {
    trace = std::max(trace, d.max_trace_error);
    herm = std::max(herm, d.max_hermiticity_error);
    min_eig = std::min(min_eig, d.min_eigenvalue);
  }
  bool ok() const { return trace < 1e-8 && herm < 1e-9 && min_eig >= -1e-8; }
};

Hygiene g_hygiene;
int g_failures = 0;

void report(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, fmt::format("exception: {}", e.what())};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = limit_s <= 0.0 || s < limit_s;
  if (!in_time) o.detail += fmt::format("; runtime limit {} s exceeded", limit_s);
  const bool pass = o.pass && in_time;
  if (!pass) ++g_failures;
  std::printf("criterion %2d: %s  %-26s %s [%.2f s]\n", id, pass ? "PASS" : "FAIL", name, o.detail.c_str(), s);
  std::fflush(stdout);
}

double fitted_mhz(const std::vector<double>& tau, const std::vector<double>& p) {
  return readout::fit_rabi(tau, p).frequency * 1e3;
}

}  // namespace

int main() {
  const DeviceModel dev = reference_device();
  const double g = dev.coupling.g_mhz;

  report(1, "dressed cavity frequency", 1.0, [&] {
    const auto l = spectral::coupled_spectrum(dev, {0.0});
    const double wc = l.energy(0, 1) - l.energy(0, 0);
    return Outcome{std::abs(wc - 5.996) < 0.5e-3, fmt::format("omega_c = {:.6f} GHz (target 5.996 +- 0.0005)", wc)};
  });

  report(2, "E_J from f01 and alpha", 1.0, [&] {
    const auto c = spectral::calibrate_from_observables(7.203, -225.0);
    return Outcome{std::abs(c.ej_ghz / 30.65 - 1.0) < 0.01,
                   fmt::format("E_J = {:.4f} GHz, E_C = {:.5f} GHz (target E_J 30.65 +- 1%)", c.ej_ghz, c.ec_ghz)};
  });

  report(3, "confined states", 1.0, [&] {
    const int n = spectral::confined_state_count(dev.transmon, {0.0});
    return Outcome{std::abs(n - 10) <= 2, fmt::format("count = {} (target 10 +- 2)", n)};
  });

  report(4, "swap time", 10.0, [&] {
    const lindblad::HilbertSpace space{3, 5};
    const double phi = spectral::flux_for_detuning(dev, 0.0);
    const lindblad::SystemModel model(dev, space, {phi});
    lindblad::Controls c;
    c.flux = lindblad::FluxSchedule::constant(phi);
    const auto target = lindblad::projector({lindblad::Vector::Unit(space.dim(), space.index(0, 1))}, "g1");
    lindblad::EvolveOptions opt;
    opt.tol = 1e-10;
    opt.dissipation = false;
    const double dt = 0.005;
    for (int k = 1; k <= 1200; ++k) opt.report_times.push_back(dt * k);
    const auto rho0 = lindblad::DensityMatrix::basis(space, 1, 0);
    const auto tr = lindblad::evolve(rho0, c, model, {target}, opt);
    g_hygiene.add(tr.diagnostics);
    const auto& p = tr.values[0];
    std::size_t k = 1;
    while (k + 1 < p.size() && !(p[k] >= p[k - 1] && p[k] >= p[k + 1])) ++k;
    const double y0 = p[k - 1], y1 = p[k], y2 = p[k + 1];
    const double t = tr.times[k] + dt * 0.5 * (y0 - y2) / (y0 - 2.0 * y1 + y2);
    const double analytic = 1.0 / (4.0 * g * 1e-3);
    return Outcome{std::abs(t / analytic - 1.0) < 0.01,
                   fmt::format("t_swap = {:.4f} ns, 1/(4g) = {:.4f} ns, peak transfer {:.4f}", t, analytic, y1)};
  });

  report(5, "chevron law", 300.0, [&] {
    std::vector<double> det, tau;
    for (double d : {0.0, 50.0, 100.0, 150.0, 200.0}) det.push_back(d * 1e-3);
    for (int k = 0; k < 200; ++k) tau.push_back(0.2 * k);
    const auto r = lindblad::simulate_chevron(dev, det, tau, 0.0, {});
    g_hygiene.add(r.diagnostics);
    double worst = 0.0;
    std::string rows;
    for (std::size_t i = 0; i < det.size(); ++i) {
      const double f = fitted_mhz(tau, r.p_excited[i]);
      const double expected = std::sqrt(4.0 * g * g + std::pow(det[i] * 1e3, 2));
      worst = std::max(worst, std::abs(f / expected - 1.0));
      rows += fmt::format(" {:.0f}:{:.2f}/{:.2f}", det[i] * 1e3, f, expected);
    }
    return Outcome{worst < 0.01, fmt::format("worst rel. error {:.2e}; MHz fit/expected{}", worst, rows)};
  });

  report(6, "flux-line distortion", 0.0, [&] {
    std::vector<double> tau;
    for (int k = 0; k <= 160; ++k) tau.push_back(0.5 * k);
    lindblad::ChevronOptions ideal, filtered, comp;
    filtered.line.filter = pulse::LineFilter{100.0, 1};
    comp.line.filter = pulse::LineFilter{100.0, 1};
    comp.line.precompensate = true;
    const auto r0 = lindblad::simulate_chevron(dev, {0.0}, tau, 0.0, ideal);
    const auto r1 = lindblad::simulate_chevron(dev, {0.0}, tau, 0.0, filtered);
    const auto r2 = lindblad::simulate_chevron(dev, {0.0}, tau, 0.0, comp);
    for (const auto* r : {&r0, &r1, &r2}) g_hygiene.add(r->diagnostics);
    double short_dev = 0.0, long_dev = 0.0, comp10 = NAN;
    for (std::size_t j = 0; j < tau.size(); ++j) {
      const double d = std::abs(r1.p_excited[0][j] - r0.p_excited[0][j]);
      if (tau[j] < 10.0) short_dev = std::max(short_dev, d);
      if (tau[j] > 50.0) long_dev = std::max(long_dev, d);
      if (tau[j] == 10.0) comp10 = std::abs(r2.p_excited[0][j] - r0.p_excited[0][j]);
    }
    const bool a = short_dev > 0.05, b = long_dev < 0.01, c = comp10 < 0.01;
    return Outcome{a && b && c,
                   fmt::format("max|dP| tau<10: {:.3f} (>0.05 {}); tau>50: {:.3f} (<0.01 {}); precomp at 10 ns: "
                               "{:.2e} (<0.01 {})",
                               short_dev, a ? "ok" : "no", long_dev, b ? "ok" : "no", comp10, c ? "ok" : "no")};
  });

  report(7, "Kerr trend", 30.0, [&] {
    const auto near = spectral::kerr_coefficients(dev, {spectral::flux_for_detuning(dev, -0.6)});
    const auto far = spectral::kerr_coefficients(dev, {spectral::flux_for_detuning(dev, 1.2)});
    const double an = std::abs(near.alpha_c_khz), af = std::abs(far.alpha_c_khz);
    const bool ok = an > af && an > 27.8 / 2 && an < 27.8 * 2 && af > 3.2 / 2 && af < 3.2 * 2;
    return Outcome{ok, fmt::format("|alpha_c| = {:.2f} kHz at -600 MHz (27.8), {:.2f} kHz at +1.2 GHz (3.2)", an, af)};
  });

  report(8, "resurgence pipeline", 10.0, [&] {
    std::vector<double> td;
    for (int k = 0; k < 12; ++k) td.push_back(2.64 + k * (8.8 - 2.64) / 11.0);
    const auto m = readout::tune_recovery_model(readout::PumpRecoveryModel{}, td, 4.8);
    const auto clean = readout::recovery_amplitude_model(m, td);
    double sum = 0.0;
    int fitted = 0, close = 0, ill = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      std::mt19937_64 rng(readout::task_seed(2024, seed));
      std::normal_distribution<double> noise(0.0, 0.02 * m.f_max);
      std::vector<double> a = clean;
      for (double& v : a) v += noise(rng);
      try {
        const auto f = readout::fit_resurgence(td, a);
        if (f.ill_posed) ++ill;
        sum += f.recovery_time();
        ++fitted;
        if (std::abs(f.recovery_time() / 4.8 - 1.0) < 0.05) ++close;
      } catch (const NumericError&) {
      }
    }
    const double mean = fitted ? sum / fitted : NAN;
    return Outcome{fitted == 100 && std::abs(mean / 4.8 - 1.0) < 0.05,
                   fmt::format("t_u = {:.4f} us; mean t0+tau = {:.3f} us over {} fits (target 4.8 +- 5%); "
                               "{} of 100 individually within 5%, {} flagged ill-posed",
                               m.t_unconfined_us, mean, fitted, close, ill)};
  });

  report(9, "readout estimator", 0.0, [&] {
    const auto spec = spectral::kerr_coefficients(dev, {0.0});
    const auto vg = readout::synthesize_trace({1.0, 0.0}, spec, 5.0, 2000.0, 1);
    const auto vs = readout::saturation_reference(spec, 5.0, 2000.0, 2);
    const auto vm = readout::synthesize_trace({0.4, 0.6}, spec, 5.0, 2000.0, 3);
    const double zero = readout::v_h(vg, vs, vg), half = readout::v_h(vg, vs, vs);
    const double ref = readout::v_h(vg, vs, vm);
    double affine = 0.0, interp = 0.0;
    for (auto [a, b] : {std::pair{3.0, -2.0}, {-0.25, 7.5}}) {
      auto tf = [&](readout::SignalTrace t) {
        for (auto& v : t.i) v = a * v + b;
        for (auto& v : t.q) v = a * v + b;
        return t;
      };
      affine = std::max(affine, std::abs(readout::v_h(tf(vg), tf(vs), tf(vm)) - ref));
    }
    for (double lambda : {0.0, 0.2, 0.5, 0.8, 1.0}) {
      auto mix = vg;
      for (std::size_t k = 0; k < mix.size(); ++k) {
        mix.i[k] = lambda * vg.i[k] + (1.0 - lambda) * vs.i[k];
        mix.q[k] = lambda * vg.q[k] + (1.0 - lambda) * vs.q[k];
      }
      interp = std::max(interp, std::abs(readout::v_h(vg, vs, mix) - 0.5 * (1.0 - lambda)));
    }
    const bool ok = zero == 0.0 && half == 0.5 && affine < 1e-12 && interp < 1e-12;
    return Outcome{ok, fmt::format("V_H(vg) = {}, V_H(vs) = {}, affine dev {:.1e}, interpolation dev {:.1e}", zero,
                                   half, affine, interp)};
  });

  report(10, "numerical hygiene", 0.0, [&] {
    std::vector<double> tau;
    for (int k = 0; k <= 20; ++k) tau.push_back(1.0 * k);
    lindblad::ChevronOptions coarse, fine;
    fine.tol = 0.5 * coarse.tol;
    const auto rc = lindblad::simulate_chevron(dev, {0.0, 0.1}, tau, 0.0, coarse);
    const auto rf = lindblad::simulate_chevron(dev, {0.0, 0.1}, tau, 0.0, fine);
    g_hygiene.add(rc.diagnostics);
    g_hygiene.add(rf.diagnostics);
    double worst = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < tau.size(); ++j) worst = std::max(worst, std::abs(rc.p_excited[i][j] - rf.p_excited[i][j]));
    const bool ok = g_hygiene.ok() && worst < coarse.tol;
    return Outcome{ok, fmt::format("trace err {:.1e}, hermiticity {:.1e}, min eig {:.1e}; tol halving dP {:.1e} (< {:.0e})",
                                   g_hygiene.trace, g_hygiene.herm, g_hygiene.min_eig, worst, coarse.tol)};
  });

  std::printf("%d of 10 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
