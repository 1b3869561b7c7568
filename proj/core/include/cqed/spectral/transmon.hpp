#pragma once

// Charge-basis transmon: H = 4 E_C (n - n_g)^2 - E_J(Phi) cos(phi).

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "cqed/device.hpp"

namespace cqed::spectral {

// Asymmetric-SQUID Josephson energy, E_J0 * sqrt(cos^2 + d^2 sin^2) of pi*Phi/Phi0.
// Same value as E_J0 |cos| sqrt(1 + d^2 tan^2) but finite at half flux.
double ej_of_flux(const TransmonParams& p, FluxBias f);

// Dense charge-basis Hamiltonian (GHz) for a given Josephson energy.
Eigen::MatrixXd charge_hamiltonian(double ej_ghz, double ec_ghz, double ng, int n_cut);

struct TransmonEigensystem {
  Eigen::VectorXd energies;  // absolute, ascending
  Eigen::MatrixXd vectors;   // columns in charge basis
  Eigen::VectorXd charges;   // diagonal of n in charge basis
};

TransmonEigensystem diagonalize(double ej_ghz, double ec_ghz, double ng, int n_cut);

// Lowest n_levels eigenenergies referenced to the ground state.
// Throws CutoffError when the top level moves by more than 1 kHz on n_cut + 5.
std::vector<double> transmon_spectrum(const TransmonParams& p, FluxBias f, int n_levels);

// Ground-referenced levels for a raw Josephson energy; no cutoff check.
std::vector<double> transmon_levels(double ej_ghz, double ec_ghz, double ng, int n_cut, int n_levels);

struct TransmonObservables {
  double f01_ghz;
  double alpha_mhz;  // (E2 - E1) - (E1 - E0)
};

TransmonObservables observables(double ej_ghz, double ec_ghz, double ng = 0.0, int n_cut = 30);

struct Calibration {
  double ej_ghz;
  double ec_ghz;
  int iterations;
  double residual;  // max relative mismatch in (f01, alpha)
};

// Inverts the exact spectrum: finds (E_J, E_C) reproducing f01 and alpha_q.
// Requires f01 > 0, alpha < 0 and |alpha| < f01.
Calibration calibrate_from_observables(double f01_ghz, double alpha_q_mhz, int n_cut = 30);

// Levels with absolute energy below the top of the cosine well (+E_J).
int confined_state_count(const TransmonParams& p, FluxBias f);

// |E_level(n_g = 1/2) - E_level(n_g = 0)| in MHz.
double charge_dispersion(const TransmonParams& p, FluxBias f, int level);

// Charge matrix <i|n|j> between the lowest n_levels eigenstates.
// Phases are fixed so that the nearest-neighbour elements <l|n|l+1> are positive.
Eigen::MatrixXd charge_matrix_elements(const TransmonParams& p, FluxBias f, int n_levels);

// Reduced flux in [0, 1/2] equivalent to phi_ratio under periodicity and parity.
double fold_flux(double phi_ratio);

// Flux in [0, 1/2] where f01 equals target; throws UnreachableDetuningError.
double flux_for_f01(const TransmonParams& p, double target_f01_ghz);

}  // namespace cqed::spectral
