#pragma once

// Static device description: transmon, SQUID, cavity, coupling and losses.
//
// Units follow the laboratory convention: frequencies are f = omega / 2pi,
// energies are E / h. Each field name carries its unit.

#include <string>
#include <vector>

namespace cqed {

struct TransmonParams {
  double ej_max_ghz = 0.0;  // E_J at zero flux
  double ec_ghz = 0.0;      // charging energy
  double asym = 0.0;        // junction asymmetry d in [0, 1]
  double ng = 0.0;          // offset charge
  int n_cut = 30;           // charge states -n_cut..n_cut

  int basis_dim() const { return 2 * n_cut + 1; }
};

// Reduced flux Phi / Phi_0 threaded through the SQUID loop.
struct FluxBias {
  double phi_ratio = 0.0;
};

struct CavityParams {
  double omega_bare_ghz = 0.0;
  double kappa_mhz = 0.0;  // total linewidth kappa / 2pi
  int n_cav_cut = 6;
};

struct CouplingParams {
  double g_mhz = 0.0;  // 0-1 transmon / cavity coupling g / 2pi
};

struct DissipationParams {
  double t1_q_us = 0.0;
  double kappa_mhz = 0.0;      // mirrors CavityParams::kappa_mhz
  double gamma_phi_mhz = 0.0;  // pure dephasing rate in 1/us
};

struct DeviceModel {
  TransmonParams transmon;
  CavityParams cavity;
  CouplingParams coupling;
  DissipationParams dissipation;
};

// Collects every invariant violation instead of stopping at the first.
struct Violation {
  std::string field;
  std::string reason;
};

std::vector<Violation> check_invariants(const TransmonParams& p);
std::vector<Violation> check_invariants(const CavityParams& p);
std::vector<Violation> check_invariants(const CouplingParams& p, const CavityParams& cavity);
std::vector<Violation> check_invariants(const DissipationParams& p);
std::vector<Violation> check_invariants(const DeviceModel& dev);

// Soft warnings, e.g. g / omega_c > 0.1.
std::vector<std::string> device_warnings(const DeviceModel& dev);

// Throws ConfigError listing all violations.
void validate(const DeviceModel& dev);

// Table 1 parameters with the transmon calibrated from the measured
// f01 = 7.203 GHz and alpha_q = -225 MHz.
DeviceModel reference_device();

}  // namespace cqed
