#include "cqed/device.hpp"

#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "cqed/error.hpp"
#include "cqed/spectral/transmon.hpp"

namespace cqed {

namespace {

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

std::vector<Violation> check_invariants(const TransmonParams& p) {
  std::vector<Violation> v;
  if (!finite_positive(p.ej_max_ghz)) v.push_back({"ej_max_ghz", "must be > 0"});
  if (!finite_positive(p.ec_ghz)) v.push_back({"ec_ghz", "must be > 0"});
  if (!(p.asym >= 0.0 && p.asym <= 1.0)) v.push_back({"asym", "must lie in [0, 1]"});
  if (!std::isfinite(p.ng)) v.push_back({"ng", "must be finite"});
  if (p.n_cut < 10) v.push_back({"n_cut", "must be >= 10"});
  return v;
}

std::vector<Violation> check_invariants(const CavityParams& p) {
  std::vector<Violation> v;
  if (!finite_positive(p.omega_bare_ghz)) v.push_back({"omega_c_ghz", "must be > 0"});
  if (!finite_positive(p.kappa_mhz)) v.push_back({"kappa_mhz", "must be > 0"});
  if (p.n_cav_cut < 2) v.push_back({"n_cav_cut", "must be >= 2"});
  return v;
}

std::vector<Violation> check_invariants(const CouplingParams& p, const CavityParams&) {
  std::vector<Violation> v;
  if (!finite_positive(p.g_mhz)) v.push_back({"g_mhz", "must be > 0"});
  return v;
}

std::vector<Violation> check_invariants(const DissipationParams& p) {
  std::vector<Violation> v;
  if (!finite_positive(p.t1_q_us)) v.push_back({"t1_us", "must be > 0"});
  if (!finite_positive(p.kappa_mhz)) v.push_back({"kappa_mhz", "must be > 0"});
  if (!(std::isfinite(p.gamma_phi_mhz) && p.gamma_phi_mhz >= 0.0)) {
    v.push_back({"gamma_phi_mhz", "must be >= 0"});
  }
  return v;
}

std::vector<Violation> check_invariants(const DeviceModel& dev) {
  std::vector<Violation> all = check_invariants(dev.transmon);
  for (auto&& x : check_invariants(dev.cavity)) all.push_back(x);
  for (auto&& x : check_invariants(dev.coupling, dev.cavity)) all.push_back(x);
  for (auto&& x : check_invariants(dev.dissipation)) all.push_back(x);
  return all;
}

std::vector<std::string> device_warnings(const DeviceModel& dev) {
  std::vector<std::string> w;
  if (dev.cavity.omega_bare_ghz > 0.0 && dev.coupling.g_mhz * 1e-3 / dev.cavity.omega_bare_ghz > 0.1) {
    w.push_back(fmt::format("g / omega_c = {:.3f} exceeds 0.1; rotating-wave coupling is inaccurate",
                            dev.coupling.g_mhz * 1e-3 / dev.cavity.omega_bare_ghz));
  }
  if (dev.dissipation.kappa_mhz != dev.cavity.kappa_mhz) {
    w.push_back("dissipation kappa differs from cavity kappa");
  }
  return w;
}

void validate(const DeviceModel& dev) {
  auto v = check_invariants(dev);
  if (v.empty()) return;
  std::ostringstream os;
  os << "invalid device model:";
  for (const auto& x : v) os << "\n  " << x.field << ": " << x.reason;
  throw ConfigError(os.str());
}

DeviceModel reference_device() {
  constexpr double kF01Ghz = 7.203;
  constexpr double kAlphaMhz = -225.0;
  // Junction asymmetry giving a 4 GHz minimum qubit frequency at half flux.
  constexpr double kAsymmetry = 0.3238;

  spectral::Calibration cal = spectral::calibrate_from_observables(kF01Ghz, kAlphaMhz);
  DeviceModel dev;
  dev.transmon = {cal.ej_ghz, cal.ec_ghz, kAsymmetry, 0.0, 30};
  dev.cavity = {6.002, 1.38, 6};
  dev.coupling = {87.0};
  dev.dissipation = {2.11, 1.38, 0.0};
  return dev;
}

}  // namespace cqed
