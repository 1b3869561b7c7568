#pragma once

// Multilevel Jaynes-Cummings spectrum of the transmon / cavity system.
//
// H = sum_l E_l |l><l| + omega_c a^dag a
//     + g sum_l (n_{l,l+1} / n_{01}) ( |l><l+1| a^dag + h.c. )
//
// The coupling keeps only excitation-conserving nearest-neighbour charge
// elements, so the 0-1 element equals the configured g at every flux and the
// Hamiltonian is block diagonal in the total excitation number.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cqed/device.hpp"

namespace cqed::spectral {

inline constexpr int kDefaultSpectralLevels = 5;
inline constexpr int kDefaultSpectralPhotons = 6;
inline constexpr double kLabelOverlapThreshold = 0.6;

struct BareLabel {
  int q = -1;  // transmon level
  int n = -1;  // photon number
  bool valid() const { return q >= 0 && n >= 0; }
  friend bool operator==(const BareLabel&, const BareLabel&) = default;
};

struct DressedLevel {
  double energy_ghz = 0.0;  // ground state at zero
  BareLabel label;          // invalid when no bare state overlaps by >= threshold
  double overlap = 0.0;     // |<bare|dressed>|^2 of the assigned label
};

class DressedLadder {
 public:
  DressedLadder(int n_q, int n_c, std::vector<DressedLevel> levels, Eigen::MatrixXd vectors);

  int n_q() const { return n_q_; }
  int n_c() const { return n_c_; }
  const std::vector<DressedLevel>& levels() const { return levels_; }
  // Columns are dressed states in the bare product basis (index q * n_c + n).
  const Eigen::MatrixXd& vectors() const { return vectors_; }

  // Throws LabelingAmbiguityError when the label is not assigned.
  double energy(int q, int n) const;
  Eigen::VectorXd state(int q, int n) const;
  int index_of(int q, int n) const;

 private:
  int n_q_;
  int n_c_;
  std::vector<DressedLevel> levels_;
  Eigen::MatrixXd vectors_;
};

inline int bare_index(int q, int n, int n_c) { return q * n_c + n; }

// Normalized charge couplings n_{l,l+1} / n_{01}, size n_q - 1.
std::vector<double> coupling_ratios(const TransmonParams& p, FluxBias f, int n_q);

// Lab-frame coupled Hamiltonian in GHz, transmon ground at zero.
Eigen::MatrixXd coupled_hamiltonian(const DeviceModel& dev, FluxBias f, int n_q, int n_c);

// Diagonalizes and labels by maximum overlap with bare product states.
DressedLadder coupled_spectrum(const DeviceModel& dev, FluxBias f, int n_q = kDefaultSpectralLevels,
                               int n_c = kDefaultSpectralPhotons);

// Labels by maximum overlap with the previous ladder's dressed states, for
// flux sweeps through near-degenerate crossings.
DressedLadder coupled_spectrum_continued(const DeviceModel& dev, FluxBias f,
                                         const DressedLadder& previous);

struct DerivedSpectrum {
  double omega_q_ghz = 0.0;          // dressed E(e,0) - E(g,0)
  double omega_c_dressed_ghz = 0.0;  // dressed E(g,1) - E(g,0)
  double alpha_q_mhz = 0.0;          // bare transmon anharmonicity
  // Cavity frequency law omega_c(nbar) = omega_c(0) - 2 alpha_c nbar; positive
  // alpha_c means the cavity shifts down with photon number.
  double alpha_c_khz = 0.0;
  double chi_mhz = 0.0;             // [E(e,1) - E(e,0)] - [E(g,1) - E(g,0)]
  double detuning_ghz = 0.0;        // omega_q - omega_c_dressed
  double bare_detuning_ghz = 0.0;   // f01 - omega_bare
  double kappa_mhz = 0.0;
  double t1_us = 0.0;
  std::vector<std::string> warnings;

  // The quoted experimental values carry the opposite sign to alpha_c_khz.
  static constexpr int kSignedConventionFlag = -1;
  double alpha_c_signed_khz() const { return kSignedConventionFlag * alpha_c_khz; }
  static constexpr const char* kAlphaCConvention =
      "alpha_c = -(E(g,2) - 2E(g,1) + E(g,0)) / 2 so that omega_c(nbar) = omega_c(0) - 2 alpha_c nbar; "
      "positive = downward shift; signed form uses sign flag -1";
};

DerivedSpectrum kerr_coefficients(const DeviceModel& dev, FluxBias f, int n_q = kDefaultSpectralLevels,
                                  int n_c = kDefaultSpectralPhotons);

// omega_c(0) - 2 alpha_c nbar for each grid point (GHz).
std::vector<double> dressed_shift_vs_photons(const DerivedSpectrum& spec, const std::vector<double>& nbar_grid);

// Dressed |e,0> - |g,0> from the exact single-excitation 2x2 block.
double dressed_qubit_frequency(const DeviceModel& dev, FluxBias f);

// Flux at which the bare qubit sits at omega_bare + detuning.
double flux_for_detuning(const DeviceModel& dev, double bare_detuning_ghz);

}  // namespace cqed::spectral
