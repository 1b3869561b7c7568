#include "cqed/spectral/transmission.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include "cqed/error.hpp"
#include "cqed/spectral/transmon.hpp"

namespace cqed::spectral {

namespace {

void check_monotone(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) throw NumericError(fmt::format("transmission_sweep: {} grid is empty", name));
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) {
      throw NumericError(fmt::format("transmission_sweep: {} grid must be strictly increasing", name));
    }
  }
}

}  // namespace

BranchPair single_excitation_branches(const DeviceModel& dev, FluxBias f) {
  // The multilevel coupling conserves excitation number, so the N = 1 block
  // is exactly the 2x2 problem {|g,1>, |e,0>}.
  const std::vector<double> e = transmon_spectrum(dev.transmon, f, 2);
  const double wc = dev.cavity.omega_bare_ghz;
  const double g = dev.coupling.g_mhz * 1e-3;
  const double mean = 0.5 * (wc + e[1]);
  const double half_gap = 0.5 * (e[1] - wc);
  const double root = std::hypot(half_gap, g);

  BranchPair b;
  b.phi_ratio = f.phi_ratio;
  b.lower_ghz = mean - root;
  b.upper_ghz = mean + root;
  // Cavity content of the lower branch: cos^2 of the mixing angle.
  const double cavity_lower = root > 0.0 ? 0.5 * (1.0 + half_gap / root) : 0.5;
  b.lower_cavity_weight = cavity_lower;
  b.upper_cavity_weight = 1.0 - cavity_lower;
  return b;
}

TransmissionMap transmission_sweep(const DeviceModel& dev, const std::vector<double>& flux_grid,
                                   const std::vector<double>& freq_grid_ghz) {
  check_monotone(flux_grid, "flux");
  check_monotone(freq_grid_ghz, "frequency");
  TransmissionMap map;
  map.flux = flux_grid;
  map.freq_ghz = freq_grid_ghz;
  map.s21_abs.resize(flux_grid.size() * freq_grid_ghz.size());
  map.branches.reserve(flux_grid.size());
  const double half_width = 0.5 * dev.cavity.kappa_mhz * 1e-3;

  for (std::size_t i = 0; i < flux_grid.size(); ++i) {
    BranchPair b = single_excitation_branches(dev, FluxBias{flux_grid[i]});
    map.branches.push_back(b);
    const double wmax = std::max(b.lower_cavity_weight, b.upper_cavity_weight);
    for (std::size_t j = 0; j < freq_grid_ghz.size(); ++j) {
      const double w = freq_grid_ghz[j];
      std::complex<double> s = 0.0;
      s += (b.lower_cavity_weight / wmax) * half_width /
           std::complex<double>(half_width, w - b.lower_ghz);
      s += (b.upper_cavity_weight / wmax) * half_width /
           std::complex<double>(half_width, w - b.upper_ghz);
      map.s21_abs[i * freq_grid_ghz.size() + j] = std::abs(s);
    }
  }
  return map;
}

void write_transmission_csv(std::ostream& os, const TransmissionMap& map) {
  os << "phi_ratio,freq_ghz,s21_abs\n";
  for (std::size_t i = 0; i < map.flux.size(); ++i) {
    for (std::size_t j = 0; j < map.freq_ghz.size(); ++j) {
      os << fmt::format("{:.10g},{:.12g},{:.10g}\n", map.flux[i], map.freq_ghz[j], map.at(i, j));
    }
  }
}

void write_branch_csv(std::ostream& os, const std::vector<BranchPair>& branches) {
  os << "phi_ratio,lower_ghz,upper_ghz,lower_cavity_weight,upper_cavity_weight\n";
  for (const auto& b : branches) {
    os << fmt::format("{:.10g},{:.12g},{:.12g},{:.8g},{:.8g}\n", b.phi_ratio, b.lower_ghz, b.upper_ghz,
                      b.lower_cavity_weight, b.upper_cavity_weight);
  }
}

BranchPair minimum_splitting(const DeviceModel& dev, double lo, double hi, int scan_points) {
  if (!(hi > lo) || scan_points < 3) throw NumericError("minimum_splitting: invalid interval");
  auto splitting = [&](double phi) { return single_excitation_branches(dev, FluxBias{phi}).splitting_ghz(); };
  int best = 0;
  double best_val = splitting(lo);
  const double step = (hi - lo) / (scan_points - 1);
  for (int k = 1; k < scan_points; ++k) {
    const double v = splitting(lo + k * step);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  const double a = std::max(lo, lo + (best - 1) * step);
  const double b = std::min(hi, lo + (best + 1) * step);
  auto [phi, val] = boost::math::tools::brent_find_minima(splitting, a, b, 50);
  (void)val;
  return single_excitation_branches(dev, FluxBias{phi});
}

}  // namespace cqed::spectral
