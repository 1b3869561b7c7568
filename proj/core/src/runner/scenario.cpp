#include "cqed/runner/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "cqed/error.hpp"
#include "cqed/lindblad/chevron.hpp"
#include "cqed/readout/fits.hpp"
#include "cqed/readout/trace.hpp"
#include "cqed/readout/vh.hpp"
#include "cqed/runner/config.hpp"
#include "cqed/spectral/coupled.hpp"
#include "cqed/spectral/transmission.hpp"
#include "cqed/spectral/transmon.hpp"
#include "cqed/version.hpp"
#include "svg.hpp"

namespace cqed::runner {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct GridDefault {
  const char* name;
  Grid grid;
  const char* unit;
};

const std::map<std::string, std::vector<GridDefault>>& grid_defaults() {
  static const std::map<std::string, std::vector<GridDefault>> d = {
      {"spectrum-flux-sweep", {{"phi", {-0.5, 0.5, 201}, "Phi/Phi0"}, {"freq_ghz", {5.7, 7.3, 321}, "GHz"}}},
      {"kerr-power-sweep", {{"detuning_mhz", {-600.0, 1200.0, 2}, "MHz"}, {"power_dbm", {-135.0, -115.0, 11}, "dBm"}}},
      {"rabi-resurgence", {{"tau_d_us", {2.64, 8.8, 12}, "us"}, {"pulse_ns", {0.0, 400.0, 81}, "ns"}}},
      {"swap-chevron",
       {{"detuning_mhz", {0.0, 200.0, 5}, "MHz"}, {"tau_int_ns", {0.0, 39.8, 200}, "ns"}, {"tau_d_us", {0.0, 0.0, 1}, "us"}}},
      {"calibrate", {}},
  };
  return d;
}

// Fixed scenario constants, echoed into the manifest.
constexpr double kStarkReferenceDbm = -129.0;
constexpr double kStarkReferenceNbar = 0.17;
constexpr double kReadoutNbar = 5.0;
constexpr double kReadoutNs = 2000.0;
constexpr double kRabiFrequencyMhz = 10.0;
constexpr double kRecoveryTargetUs = 4.8;
constexpr double kPumpPhotons = 2.1e4;

std::string utc_label() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

struct Run {
  const ScenarioConfig& cfg;
  DeviceConfig dc;
  fs::path dir;
  RunManifest& man;
  Clock::time_point stage_start = Clock::now();

  void param(const std::string& key, const std::string& value) { man.parameters.emplace_back(key, value); }
  void param(const std::string& key, double value) { param(key, num(value)); }

  std::vector<double> grid(const std::string& name) {
    Grid g;
    for (const auto& d : grid_defaults().at(cfg.name)) {
      if (name == d.name) g = d.grid;
    }
    if (auto it = cfg.grids.find(name); it != cfg.grids.end()) g = it->second;
    param("grid." + name, fmt::format("{}:{}:{}", num(g.start), num(g.stop), g.count));
    return g.values();
  }

  void stage(const std::string& name) {
    const auto now = Clock::now();
    man.timings_s.emplace_back(name, std::chrono::duration<double>(now - stage_start).count());
    stage_start = now;
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", (dir / name).string()));
    body(out);
    out.flush();
    if (!out) throw IoError(fmt::format("write to '{}' failed", (dir / name).string()));
  }

  void plot(const std::string& name, const std::function<void(const fs::path&)>& body) {
    if (!cfg.plots) return;
    try {
      body(dir / name);
    } catch (const std::exception& e) {
      std::error_code ec;
      fs::remove(dir / name, ec);
      man.warnings.push_back(fmt::format("plot {} skipped: {}", name, e.what()));
    }
  }

  void warn(const std::string& w) { man.warnings.push_back(w); }
};

// ---- spectrum-flux-sweep -----------------------------------------------------

void spectrum_flux_sweep(Run& run) {
  const DeviceModel& dev = run.dc.device;
  const auto phi = run.grid("phi");
  const auto freq = run.grid("freq_ghz");
  spectral::TransmissionMap map = spectral::transmission_sweep(dev, phi, freq);
  run.stage("transmission");
  run.write("transmission.csv", [&](std::ostream& os) { spectral::write_transmission_csv(os, map); });
  run.write("branches.csv", [&](std::ostream& os) { spectral::write_branch_csv(os, map.branches); });

  // One crossing per flux half-period where the tuning range covers the cavity.
  std::vector<spectral::BranchPair> crossings;
  const double lo = phi.front(), hi = phi.back();
  for (double a = std::floor(lo * 2.0) / 2.0; a < hi; a += 0.5) {
    const double l = std::max(a, lo), h = std::min(a + 0.5, hi);
    if (h - l < 1e-9) continue;
    spectral::BranchPair b = spectral::minimum_splitting(dev, l, h);
    // Skip windows whose minimum is pinned to an edge: no crossing inside.
    if (std::abs(b.phi_ratio - l) < 1e-6 || std::abs(b.phi_ratio - h) < 1e-6) continue;
    crossings.push_back(b);
  }
  run.stage("avoided crossings");
  if (crossings.empty()) run.warn("no avoided crossing inside the flux grid");
  run.write("avoided_crossings.csv", [&](std::ostream& os) {
    os << "phi_ratio,lower_ghz,upper_ghz,splitting_mhz\n";
    for (const auto& b : crossings) {
      os << fmt::format("{:.12g},{:.12g},{:.12g},{:.9g}\n", b.phi_ratio, b.lower_ghz, b.upper_ghz,
                        b.splitting_ghz() * 1e3);
    }
  });

  run.plot("transmission.svg", [&](const fs::path& p) {
    // rows are frequencies for the image
    std::vector<double> z(freq.size() * phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) {
      for (std::size_t j = 0; j < freq.size(); ++j) z[j * phi.size() + i] = map.at(i, j);
    }
    svg::heatmap(p, {"|S21| vs flux", "flux (Phi/Phi0)", "frequency (GHz)"}, phi, freq, z);
  });
  run.plot("branches.svg", [&](const fs::path& p) {
    svg::Series lower{"lower branch", {}, {}}, upper{"upper branch", {}, {}};
    for (const auto& b : map.branches) {
      lower.x.push_back(b.phi_ratio);
      lower.y.push_back(b.lower_ghz);
      upper.x.push_back(b.phi_ratio);
      upper.y.push_back(b.upper_ghz);
    }
    svg::line_plot(p, {"single-excitation branches", "flux (Phi/Phi0)", "frequency (GHz)"}, {lower, upper});
  });
}

// ---- kerr-power-sweep --------------------------------------------------------

// Cavity transition E(g, n+1) - E(g, n) interpolated linearly in photon number.
double ladder_frequency(const spectral::DressedLadder& ladder, double nbar) {
  const int n0 = static_cast<int>(std::floor(nbar));
  const double frac = nbar - n0;
  auto step = [&](int n) { return ladder.energy(0, n + 1) - ladder.energy(0, n); };
  const double f0 = step(n0);
  return frac == 0.0 ? f0 : f0 + frac * (step(n0 + 1) - f0);
}

void kerr_power_sweep(Run& run) {
  const DeviceModel& dev = run.dc.device;
  const auto det = run.grid("detuning_mhz");
  const auto power = run.grid("power_dbm");
  run.param("stark.reference_dbm", kStarkReferenceDbm);
  run.param("stark.reference_nbar", kStarkReferenceNbar);

  struct Row {
    double det_mhz, p_dbm, nbar, shift_mhz, nbar_stark, omega;
  };
  struct FitRow {
    double det_mhz;
    readout::KerrFit fit;
    double model_khz;
    double chi_mhz;
  };
  std::vector<Row> rows;
  std::vector<FitRow> fits;
  for (double d : det) {
    const FluxBias f{spectral::flux_for_detuning(dev, d * 1e-3)};
    const spectral::DerivedSpectrum spec = spectral::kerr_coefficients(dev, f);
    for (const auto& w : spec.warnings) run.warn(fmt::format("detuning {} MHz: {}", d, w));
    const readout::StarkCalibration cal = readout::calibrate_stark(
        spec.chi_mhz, spec.omega_c_dressed_ghz, dev.cavity.kappa_mhz, kStarkReferenceDbm, kStarkReferenceNbar);
    std::vector<double> nbar, omega;
    for (double p : power) nbar.push_back(readout::photons_from_power(p, cal));
    const int n_top = static_cast<int>(std::ceil(*std::max_element(nbar.begin(), nbar.end()))) + 1;
    const spectral::DressedLadder ladder =
        spectral::coupled_spectrum(dev, f, spectral::kDefaultSpectralLevels, std::max(n_top + 2, 6));
    for (std::size_t k = 0; k < power.size(); ++k) {
      const double shift = 2.0 * spec.chi_mhz * nbar[k];
      const double n_stark = readout::photons_from_stark(shift, cal);
      omega.push_back(ladder_frequency(ladder, n_stark));
      rows.push_back({d, power[k], nbar[k], shift, n_stark, omega.back()});
    }
    fits.push_back({d, readout::fit_kerr_slope(nbar, omega), spec.alpha_c_khz, spec.chi_mhz});
    for (const auto& w : fits.back().fit.warnings) run.warn(fmt::format("detuning {} MHz: {}", d, w));
  }
  run.stage("kerr sweep");

  run.write("kerr_sweep.csv", [&](std::ostream& os) {
    os << "detuning_mhz,power_dbm,nbar_power,stark_shift_mhz,nbar_stark,omega_c_ghz\n";
    for (const auto& r : rows) {
      os << fmt::format("{:.10g},{:.10g},{:.12g},{:.12g},{:.12g},{:.15g}\n", r.det_mhz, r.p_dbm, r.nbar, r.shift_mhz,
                        r.nbar_stark, r.omega);
    }
  });
  run.write("kerr_fits.csv", [&](std::ostream& os) {
    os << "detuning_mhz,alpha_c_khz,alpha_c_stderr_khz,alpha_c_spectrum_khz,omega0_ghz,chi_mhz,nonlinear\n";
    for (const auto& f : fits) {
      os << fmt::format("{:.10g},{:.9g},{:.4g},{:.9g},{:.15g},{:.9g},{}\n", f.det_mhz, f.fit.alpha_c_khz,
                        f.fit.alpha_c_stderr_khz, f.model_khz, f.fit.omega0_ghz, f.chi_mhz, f.fit.nonlinear ? 1 : 0);
    }
  });
  run.plot("kerr_sweep.svg", [&](const fs::path& p) {
    std::vector<svg::Series> s;
    for (double d : det) {
      svg::Series ser{fmt::format("detuning {} MHz", d), {}, {}};
      for (const auto& r : rows) {
        if (r.det_mhz == d) {
          ser.x.push_back(r.nbar);
          ser.y.push_back(r.omega);
        }
      }
      s.push_back(std::move(ser));
    }
    svg::line_plot(p, {"dressed cavity vs photon number", "nbar", "frequency (GHz)"}, s, true);
  });
}

// ---- rabi-resurgence ---------------------------------------------------------

void rabi_resurgence(Run& run) {
  const DeviceModel& dev = run.dc.device;
  const auto td = run.grid("tau_d_us");
  const auto pulse = run.grid("pulse_ns");
  const spectral::DerivedSpectrum spec = spectral::kerr_coefficients(dev, run.dc.baseline);

  readout::PumpRecoveryModel model;
  model.n_d = kPumpPhotons;
  model.kappa_mhz = dev.cavity.kappa_mhz;
  model = readout::tune_recovery_model(model, td, kRecoveryTargetUs);
  run.param("recovery.n_d", model.n_d);
  run.param("recovery.kappa_mhz", model.kappa_mhz);
  run.param("recovery.dephasing_s", model.dephasing_s);
  run.param("recovery.t_unconfined_us", model.t_unconfined_us);
  run.param("recovery.target_t0_plus_tau_us", kRecoveryTargetUs);
  run.param("rabi.frequency_mhz", kRabiFrequencyMhz);
  run.param("rabi.decay_us", 2.0 * dev.dissipation.t1_q_us);
  run.param("readout.nbar", kReadoutNbar);
  run.param("readout.duration_ns", kReadoutNs);
  const readout::ReadoutOptions ro;
  run.param("readout.dt_ns", ro.dt_ns);
  run.param("readout.ensemble", static_cast<double>(ro.ensemble));
  run.param("readout.single_shot_sigma", ro.single_shot_sigma);
  run.param("resurgence.exponent", readout::ResurgenceFit::kExponentNote);
  const std::vector<double> amp_model = readout::recovery_amplitude_model(model, td);

  // Series index 0 is the pump-off reference, then one per delay.
  std::uint64_t task = 0;
  auto series = [&](double contrast) {
    readout::ReadoutOptions o;
    o.role = readout::TraceRole::v_g;
    const auto vg = readout::synthesize_trace({1.0, 0.0}, spec, kReadoutNbar, kReadoutNs,
                                              readout::task_seed(run.cfg.seed, task++), o);
    const auto vs = readout::saturation_reference(spec, kReadoutNbar, kReadoutNs,
                                                  readout::task_seed(run.cfg.seed, task++), o);
    std::vector<double> vh;
    for (double len : pulse) {
      const double pe = 0.5 * contrast *
                        (1.0 - std::exp(-len * 1e-3 / (2.0 * dev.dissipation.t1_q_us)) *
                                   std::cos(2.0 * std::numbers::pi * kRabiFrequencyMhz * 1e-3 * len));
      const auto vm = readout::synthesize_trace({1.0 - pe, pe}, spec, kReadoutNbar, kReadoutNs,
                                                readout::task_seed(run.cfg.seed, task++), o);
      vh.push_back(readout::v_h(vg, vs, vm));
    }
    return vh;
  };

  std::vector<std::vector<double>> vh;
  vh.push_back(series(1.0));
  for (double a : amp_model) vh.push_back(series(a));
  run.stage("traces");

  std::vector<readout::RabiFit> fits;
  for (const auto& s : vh) fits.push_back(readout::fit_rabi(pulse, s));
  std::vector<double> amps;
  for (std::size_t k = 1; k < fits.size(); ++k) amps.push_back(fits[k].amplitude);
  const readout::ResurgenceFit rf = readout::fit_resurgence(td, amps);
  for (const auto& w : rf.warnings) run.warn("resurgence fit: " + w);
  run.stage("fits");

  run.write("rabi_vh.csv", [&](std::ostream& os) {
    os << "tau_d_us,pulse_ns,v_h\n";
    for (std::size_t k = 0; k < vh.size(); ++k) {
      const std::string label = k == 0 ? "off" : fmt::format("{:.10g}", td[k - 1]);
      for (std::size_t j = 0; j < pulse.size(); ++j) os << fmt::format("{},{:.10g},{:.12g}\n", label, pulse[j], vh[k][j]);
    }
  });
  run.write("rabi_fits.csv", [&](std::ostream& os) {
    os << "tau_d_us,model_amplitude,amplitude,amplitude_stderr,frequency_mhz,decay_per_us,offset\n";
    for (std::size_t k = 0; k < fits.size(); ++k) {
      const auto& f = fits[k];
      os << fmt::format("{},{:.10g},{:.10g},{:.4g},{:.10g},{:.6g},{:.10g}\n",
                        k == 0 ? std::string("off") : fmt::format("{:.10g}", td[k - 1]),
                        k == 0 ? 1.0 : amp_model[k - 1], f.amplitude, f.stderr_(0), f.frequency * 1e3,
                        f.decay * 1e3, f.offset);
    }
  });
  run.write("resurgence_fit.csv", [&](std::ostream& os) { readout::write_fit_report(os, rf.report()); });

  run.plot("rabi_amplitude.svg", [&](const fs::path& p) {
    svg::Series pts{"fitted Rabi amplitude", td, amps};
    svg::Series curve{"resurgence fit", {}, {}};
    for (int k = 0; k <= 100; ++k) {
      const double t = td.front() + (td.back() - td.front()) * k / 100.0;
      curve.x.push_back(t);
      curve.y.push_back(t > rf.t0 ? rf.f_max * -std::expm1(-(t - rf.t0) / rf.tau) : 0.0);
    }
    svg::line_plot(p, {"Rabi amplitude vs delay", "delay (us)", "amplitude"}, {pts, curve}, false);
  });
}

// ---- swap-chevron ------------------------------------------------------------

void swap_chevron(Run& run) {
  const DeviceModel& dev = run.dc.device;
  const auto det_mhz = run.grid("detuning_mhz");
  const auto tau = run.grid("tau_int_ns");
  const auto td = run.grid("tau_d_us");
  if (td.size() != 1) throw ConfigError("swap-chevron: tau_d_us takes a single value");

  lindblad::ChevronOptions opt;
  opt.space = run.dc.space;
  opt.swap.baseline = run.dc.baseline;
  opt.with_pump = td.front() > 0.0;
  if (run.cfg.filter_f3db_mhz) opt.line.filter = pulse::LineFilter{*run.cfg.filter_f3db_mhz, 1};
  opt.line.precompensate = run.cfg.precompensate;
  run.param("chevron.tol", opt.tol);
  run.param("chevron.direct_init", opt.direct_init ? "true" : "false");
  run.param("chevron.dissipation", opt.dissipation ? "true" : "false");
  run.param("chevron.with_pump", opt.with_pump ? "true" : "false");
  run.param("line.filter_f3db_mhz", opt.line.filter ? num(opt.line.filter->f3db_mhz) : std::string("none"));
  run.param("line.precompensate", opt.line.precompensate ? "true" : "false");
  run.param("line.dt_ns", opt.line.dt_ns);
  run.param("swap.flux_edge_sigma_ns", opt.swap.flux_edge_sigma_ns);
  run.param("swap.settle_ns", opt.swap.settle_ns);

  std::vector<double> det_ghz;
  for (double d : det_mhz) det_ghz.push_back(d * 1e-3);
  const lindblad::ChevronResult res = lindblad::simulate_chevron(dev, det_ghz, tau, td.front() * 1e3, opt);
  for (const auto& w : res.warnings) run.warn(w);
  run.stage("chevron");

  run.write("chevron.csv", [&](std::ostream& os) { lindblad::write_chevron_csv(os, res); });
  const double g = dev.coupling.g_mhz;
  run.write("chevron_fits.csv", [&](std::ostream& os) {
    os << "detuning_mhz,frequency_mhz,frequency_stderr_mhz,expected_mhz,relative_error,amplitude\n";
    for (std::size_t i = 0; i < det_mhz.size(); ++i) {
      const double expected = std::sqrt(4.0 * g * g + det_mhz[i] * det_mhz[i]);
      try {
        const readout::RabiFit f = readout::fit_rabi(tau, res.p_excited[i]);
        os << fmt::format("{:.10g},{:.10g},{:.4g},{:.10g},{:.6g},{:.8g}\n", det_mhz[i], f.frequency * 1e3,
                          f.stderr_(1) * 1e3, expected, f.frequency * 1e3 / expected - 1.0, f.amplitude);
      } catch (const Error& e) {
        run.warn(fmt::format("detuning {} MHz: oscillation fit failed: {}", det_mhz[i], e.what()));
        os << fmt::format("{:.10g},nan,nan,{:.10g},nan,nan\n", det_mhz[i], expected);
      }
    }
  });
  run.write("chevron_metadata.json", [&](std::ostream& os) {
    nlohmann::ordered_json j;
    j["observable"] = "dressed excited-state population at the start of the measure segment";
    j["initial_state"] = opt.direct_init ? "dressed |e,0> at the end of the control pulse" : "|g,0> before the pi pulse";
    j["space"] = {{"n_q", opt.space.n_q}, {"n_c", opt.space.n_c}};
    j["tol"] = opt.tol;
    j["tau_d_us"] = td.front();
    j["filter_f3db_mhz"] = opt.line.filter ? nlohmann::json(opt.line.filter->f3db_mhz) : nlohmann::json(nullptr);
    j["precompensate"] = opt.line.precompensate;
    j["diagnostics"] = {{"max_trace_error", res.diagnostics.max_trace_error},
                        {"max_hermiticity_error", res.diagnostics.max_hermiticity_error},
                        {"min_eigenvalue", res.diagnostics.min_eigenvalue},
                        {"accepted_steps", res.diagnostics.steps.accepted},
                        {"rejected_steps", res.diagnostics.steps.rejected}};
    j["warnings"] = res.warnings;
    os << j.dump(2) << "\n";
  });
  run.plot("chevron.svg", [&](const fs::path& p) {
    std::vector<double> z;
    for (const auto& row : res.p_excited) z.insert(z.end(), row.begin(), row.end());
    svg::heatmap(p, {"excited population", "interaction time (ns)", "detuning (MHz)"}, tau, det_mhz, z);
  });
}

// ---- calibrate ---------------------------------------------------------------

void calibrate(Run& run) {
  const DeviceModel& dev = run.dc.device;
  const FluxBias base = run.dc.baseline;
  const auto obs = spectral::observables(spectral::ej_of_flux(dev.transmon, base), dev.transmon.ec_ghz,
                                         dev.transmon.ng, dev.transmon.n_cut);
  const spectral::DerivedSpectrum spec = spectral::kerr_coefficients(dev, base);
  for (const auto& w : spec.warnings) run.warn(w);
  const spectral::DressedLadder ladder = spectral::coupled_spectrum(dev, base);
  const int confined = spectral::confined_state_count(dev.transmon, base);
  run.stage("spectrum");
  const lindblad::PiCalibration pi =
      lindblad::calibrate_pi_pulse(dev, run.dc.space, pulse::SwapOptions{}.control, base);
  run.stage("pi pulse");

  struct Row {
    const char* name;
    double value;
    const char* unit;
  };
  const std::vector<Row> rows = {
      {"ej_max", dev.transmon.ej_max_ghz, "GHz"},
      {"ec", dev.transmon.ec_ghz, "GHz"},
      {"ej_over_ec", dev.transmon.ej_max_ghz / dev.transmon.ec_ghz, ""},
      {"f01_bare", obs.f01_ghz, "GHz"},
      {"alpha_q", obs.alpha_mhz, "MHz"},
      {"omega_q_dressed", spec.omega_q_ghz, "GHz"},
      {"omega_c_dressed", spec.omega_c_dressed_ghz, "GHz"},
      {"omega_c_bare", dev.cavity.omega_bare_ghz, "GHz"},
      {"chi", spec.chi_mhz, "MHz"},
      {"alpha_c", spec.alpha_c_khz, "kHz"},
      {"alpha_c_signed", spec.alpha_c_signed_khz(), "kHz"},
      {"confined_states", static_cast<double>(confined), ""},
      {"swap_time_resonant", 1.0 / (4.0 * dev.coupling.g_mhz * 1e-3), "ns"},
      {"pi_amplitude", pi.amplitude_mhz, "MHz"},
      {"pi_p_excited", pi.p_excited, ""},
      {"pi_leakage", pi.leakage, ""},
      {"pi_area_over_pi", pi.area_rad / std::numbers::pi, ""},
      {"e10_minus_g1", ladder.energy(1, 0) - ladder.energy(0, 1), "GHz"},
  };
  run.write("calibration.csv", [&](std::ostream& os) {
    os << "parameter,value,unit\n";
    for (const auto& r : rows) os << fmt::format("{},{:.12g},{}\n", r.name, r.value, r.unit);
  });
  run.plot("levels.svg", [&](const fs::path& p) {
    svg::Series s{"transmon levels", {}, {}};
    const auto lv = spectral::transmon_spectrum(dev.transmon, base, std::min(confined + 2, dev.transmon.basis_dim()));
    for (std::size_t k = 0; k < lv.size(); ++k) {
      s.x.push_back(static_cast<double>(k));
      s.y.push_back(lv[k]);
    }
    svg::Series ej{"E_J", {0.0, static_cast<double>(lv.size() - 1)},
                   {spectral::ej_of_flux(dev.transmon, base), spectral::ej_of_flux(dev.transmon, base)}};
    svg::line_plot(p, {"transmon ladder", "level", "energy above ground (GHz)"}, {s, ej}, true);
  });
}

using Pipeline = void (*)(Run&);

Pipeline pipeline(const std::string& name) {
  if (name == "spectrum-flux-sweep") return spectrum_flux_sweep;
  if (name == "kerr-power-sweep") return kerr_power_sweep;
  if (name == "rabi-resurgence") return rabi_resurgence;
  if (name == "swap-chevron") return swap_chevron;
  if (name == "calibrate") return calibrate;
  return nullptr;
}

[[noreturn]] void rethrow_with_context(const std::string& scenario, const Error& e) {
  const std::string what = fmt::format("{}: {}", scenario, e.what());
  switch (e.error_class()) {
    case ErrorClass::config: throw ConfigError(what);
    case ErrorClass::io: throw IoError(what);
    case ErrorClass::numeric: break;
  }
  throw NumericError(what);
}

fs::path make_run_dir(const ScenarioConfig& cfg) {
  const fs::path parent = cfg.out_dir / cfg.name;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", parent.string(), ec.message()));
  const std::string base = cfg.run_label.empty() ? utc_label() : cfg.run_label;
  fs::path dir = parent / base;
  for (int k = 2; fs::exists(dir); ++k) dir = parent / fmt::format("{}-{}", base, k);
  fs::create_directory(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  return dir;
}

void update_latest(const fs::path& run_dir) {
  const fs::path link = run_dir.parent_path() / "latest";
  std::error_code ec;
  if (fs::is_symlink(fs::symlink_status(link, ec))) fs::remove(link, ec);
  if (fs::exists(fs::symlink_status(link, ec))) throw IoError(fmt::format("'{}' exists and is not a link", link.string()));
  fs::create_directory_symlink(run_dir.filename(), link, ec);
  if (ec) throw IoError(fmt::format("cannot link '{}': {}", link.string(), ec.message()));
}

void write_manifest(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["scenario"] = m.scenario;
  j["version"] = m.version;
  j["contract_version"] = m.contract_version;
  j["seed"] = m.seed;
  j["config_hash"] = m.config_hash;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.parameters) params[k] = v;
  j["parameters"] = params;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& f : m.files) {
    files.push_back({{"path", f.path},
                     {"sha256", f.sha256.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(f.sha256)},
                     {"bytes", f.bytes}});
  }
  j["files"] = files;
  nlohmann::ordered_json t = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.timings_s) t[k] = v;
  j["timings_s"] = t;
  j["total_seconds"] = m.total_seconds;
  j["warnings"] = m.warnings;
  std::ofstream out(m.run_dir / "manifest.json", std::ios::binary);
  out << j.dump(2) << "\n";
  if (!out) throw IoError(fmt::format("cannot write manifest in '{}'", m.run_dir.string()));
}

}  // namespace

std::vector<double> Grid::values() const {
  std::vector<double> v;
  if (count == 1) return {start};
  for (int k = 0; k < count; ++k) {
    // Exact end points; interior points by interpolation.
    v.push_back(k == count - 1 ? stop : start + (stop - start) * static_cast<double>(k) / (count - 1));
  }
  return v;
}

Grid parse_grid(const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? std::string::npos : text.find(':', a + 1);
  if (b == std::string::npos) throw ConfigError(fmt::format("grid '{}': expected start:stop:count", text));
  Grid g;
  try {
    std::size_t used = 0;
    const std::string s0 = text.substr(0, a), s1 = text.substr(a + 1, b - a - 1), s2 = text.substr(b + 1);
    g.start = std::stod(s0, &used);
    if (used != s0.size()) throw std::invalid_argument(s0);
    g.stop = std::stod(s1, &used);
    if (used != s1.size()) throw std::invalid_argument(s1);
    g.count = std::stoi(s2, &used);
    if (used != s2.size()) throw std::invalid_argument(s2);
  } catch (const std::logic_error&) {
    throw ConfigError(fmt::format("grid '{}': expected start:stop:count with numbers", text));
  }
  if (g.count < 1) throw ConfigError(fmt::format("grid '{}': count must be >= 1", text));
  if (g.count > 1 && !(g.stop > g.start)) throw ConfigError(fmt::format("grid '{}': stop must exceed start", text));
  if (!std::isfinite(g.start) || !std::isfinite(g.stop)) throw ConfigError(fmt::format("grid '{}': non-finite", text));
  return g;
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"spectrum-flux-sweep", "kerr-power-sweep", "rabi-resurgence",
                                                 "swap-chevron", "calibrate"};
  return names;
}

std::vector<std::string> check_scenario(const ScenarioConfig& cfg) {
  std::vector<std::string> errs;
  const auto it = grid_defaults().find(cfg.name);
  if (it == grid_defaults().end()) {
    errs.push_back(fmt::format("unknown scenario '{}'", cfg.name));
  } else {
    for (const auto& [name, g] : cfg.grids) {
      const bool known = std::any_of(it->second.begin(), it->second.end(),
                                     [&](const GridDefault& d) { return name == d.name; });
      if (!known) {
        std::string allowed;
        for (const auto& d : it->second) allowed += std::string(allowed.empty() ? "" : ", ") + d.name;
        errs.push_back(fmt::format("grid '{}' not used by {} (accepted: {})", name, cfg.name,
                                   allowed.empty() ? "none" : allowed));
      } else if (g.count < 1 || (g.count > 1 && !(g.stop > g.start))) {
        errs.push_back(fmt::format("grid '{}': need count >= 1 and stop > start", name));
      }
    }
  }
  if (cfg.filter_f3db_mhz && !(*cfg.filter_f3db_mhz > 0.0)) errs.push_back("filter f3db must be > 0");
  if (cfg.precompensate && !cfg.filter_f3db_mhz) errs.push_back("precompensation requires a filter");
  if ((cfg.filter_f3db_mhz || cfg.precompensate) && cfg.name != "swap-chevron") {
    errs.push_back("flux-line filter settings only apply to swap-chevron");
  }
  std::error_code ec;
  if (cfg.device_path.empty()) {
    errs.push_back("device file not given");
  } else if (!fs::is_regular_file(cfg.device_path, ec)) {
    errs.push_back(fmt::format("device file '{}' not found", cfg.device_path.string()));
  }
  fs::path probe = cfg.out_dir;
  while (!probe.empty() && !fs::exists(probe, ec)) probe = probe.parent_path();
  if (probe.empty()) probe = fs::current_path(ec);
  if (!fs::is_directory(probe, ec)) {
    errs.push_back(fmt::format("output path '{}' is not a directory", probe.string()));
  } else if (const auto perms = fs::status(probe, ec).permissions();
             (perms & (fs::perms::owner_write | fs::perms::group_write | fs::perms::others_write)) == fs::perms::none) {
    errs.push_back(fmt::format("output directory '{}' is not writable", probe.string()));
  }
  return errs;
}

RunManifest run_scenario(const ScenarioConfig& cfg) {
  const auto t_start = Clock::now();
  if (auto errs = check_scenario(cfg); !errs.empty()) {
    std::string msg = "invalid scenario configuration";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ConfigError(msg);
  }

  RunManifest man;
  man.scenario = cfg.name;
  man.version = kVersion;
  man.contract_version = kContractVersion;
  man.seed = cfg.seed;

  DeviceConfig dc;
  try {
    dc = load_device(cfg.device_path);
  } catch (const Error& e) {
    rethrow_with_context(cfg.name, e);
  }
  for (const auto& w : dc.warnings) man.warnings.push_back("device: " + w);
  for (const auto& e : dc.resolved) man.parameters.emplace_back("device." + e.key, num(e.value));

  man.run_dir = make_run_dir(cfg);
  Run run{cfg, dc, man.run_dir, man};
  run.param("seed", std::to_string(cfg.seed));
  try {
    pipeline(cfg.name)(run);
  } catch (const Error& e) {
    rethrow_with_context(cfg.name, e);
  }

  std::string canon = fmt::format("scenario = {}\n", cfg.name) + canonical_text(dc.resolved);
  for (const auto& [k, v] : man.parameters) canon += k + " = " + v + "\n";
  man.config_hash = sha256_hex(canon);

  std::vector<fs::path> produced;
  for (const auto& entry : fs::recursive_directory_iterator(man.run_dir)) {
    if (entry.is_regular_file()) produced.push_back(fs::relative(entry.path(), man.run_dir));
  }
  std::sort(produced.begin(), produced.end());
  for (const auto& rel : produced) {
    man.files.push_back({rel.generic_string(), sha256_file(man.run_dir / rel), fs::file_size(man.run_dir / rel)});
  }
  man.files.push_back({"manifest.json", "", 0});
  man.total_seconds = std::chrono::duration<double>(Clock::now() - t_start).count();
  write_manifest(man);
  update_latest(man.run_dir);
  return man;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 digest failed");
  }
  std::string out;
  for (unsigned int k = 0; k < len; ++k) out += fmt::format("{:02x}", md[k]);
  return out;
}

std::string sha256_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read '{}' for checksum", p.string()));
  std::ostringstream os;
  os << in.rdbuf();
  return sha256_hex(os.str());
}

}  // namespace cqed::runner
