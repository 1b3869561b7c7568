#pragma once

#include <iosfwd>
#include <vector>

#include "cqed/device.hpp"

namespace cqed::spectral {

// Single-excitation dressed branches {|g,1>, |e,0>} at one flux point.
struct BranchPair {
  double phi_ratio = 0.0;
  double lower_ghz = 0.0;
  double upper_ghz = 0.0;
  double lower_cavity_weight = 0.0;  // |<g,1|branch>|^2
  double upper_cavity_weight = 0.0;
  double splitting_ghz() const { return upper_ghz - lower_ghz; }
};

BranchPair single_excitation_branches(const DeviceModel& dev, FluxBias f);

struct TransmissionMap {
  std::vector<double> flux;
  std::vector<double> freq_ghz;
  std::vector<double> s21_abs;  // row-major [flux][freq]
  std::vector<BranchPair> branches;

  double at(std::size_t i_flux, std::size_t i_freq) const { return s21_abs[i_flux * freq_ghz.size() + i_freq]; }
};

// Lorentzian |S21| of FWHM kappa per single-excitation branch, weighted by its
// photon content relative to the most cavity-like branch; the dominant peak is
// unity at the ground-state dressed cavity frequency.
TransmissionMap transmission_sweep(const DeviceModel& dev, const std::vector<double>& flux_grid,
                                   const std::vector<double>& freq_grid_ghz);

// CSV with header phi_ratio,freq_ghz,s21_abs.
void write_transmission_csv(std::ostream& os, const TransmissionMap& map);

// CSV with header phi_ratio,lower_ghz,upper_ghz,lower_cavity_weight,upper_cavity_weight.
void write_branch_csv(std::ostream& os, const std::vector<BranchPair>& branches);

// Minimum branch splitting: grid scan followed by golden-section refinement
// on [lo, hi] in reduced flux.
BranchPair minimum_splitting(const DeviceModel& dev, double lo, double hi, int scan_points = 201);

}  // namespace cqed::spectral
