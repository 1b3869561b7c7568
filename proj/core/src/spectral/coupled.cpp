#include "cqed/spectral/coupled.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cqed/error.hpp"
#include "cqed/spectral/transmon.hpp"

namespace cqed::spectral {

namespace {

std::vector<DressedLevel> label_by_overlap(const Eigen::VectorXd& energies, const Eigen::MatrixXd& vectors,
                                           int n_c, const std::vector<BareLabel>& reference_labels,
                                           const Eigen::MatrixXd* reference_vectors) {
  const int dim = static_cast<int>(energies.size());
  std::vector<DressedLevel> out(dim);
  for (int k = 0; k < dim; ++k) {
    Eigen::VectorXd overlaps;
    if (reference_vectors) {
      overlaps = (reference_vectors->transpose() * vectors.col(k)).array().square();
    } else {
      overlaps = vectors.col(k).array().square();
    }
    Eigen::Index best = 0;
    const double max_overlap = overlaps.maxCoeff(&best);
    out[k].energy_ghz = energies(k) - energies(0);
    out[k].overlap = max_overlap;
    if (max_overlap >= kLabelOverlapThreshold) {
      out[k].label = reference_vectors ? reference_labels[best]
                                       : BareLabel{static_cast<int>(best) / n_c, static_cast<int>(best) % n_c};
    }
  }
  return out;
}

void check_truncation(int n_q, int n_c) {
  if (n_q < 3 || n_c < 3) throw NumericError("coupled_spectrum: truncations must satisfy n_q >= 3, n_c >= 3");
}

}  // namespace

DressedLadder::DressedLadder(int n_q, int n_c, std::vector<DressedLevel> levels, Eigen::MatrixXd vectors)
    : n_q_(n_q), n_c_(n_c), levels_(std::move(levels)), vectors_(std::move(vectors)) {}

int DressedLadder::index_of(int q, int n) const {
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    if (levels_[k].label == BareLabel{q, n}) return static_cast<int>(k);
  }
  std::ostringstream os;
  os << "no dressed state unambiguously connected to bare |" << q << "," << n
     << "> (overlap below " << kLabelOverlapThreshold << "); refine the flux grid";
  throw LabelingAmbiguityError(os.str());
}

double DressedLadder::energy(int q, int n) const { return levels_[index_of(q, n)].energy_ghz; }

Eigen::VectorXd DressedLadder::state(int q, int n) const { return vectors_.col(index_of(q, n)); }

std::vector<double> coupling_ratios(const TransmonParams& p, FluxBias f, int n_q) {
  Eigen::MatrixXd n = charge_matrix_elements(p, f, n_q);
  std::vector<double> r(std::max(0, n_q - 1));
  for (int l = 0; l + 1 < n_q; ++l) r[l] = n(l, l + 1) / n(0, 1);
  return r;
}

Eigen::MatrixXd coupled_hamiltonian(const DeviceModel& dev, FluxBias f, int n_q, int n_c) {
  const std::vector<double> e = transmon_spectrum(dev.transmon, f, n_q);
  const std::vector<double> ratio = coupling_ratios(dev.transmon, f, n_q);
  const double wc = dev.cavity.omega_bare_ghz;
  const double g = dev.coupling.g_mhz * 1e-3;
  const int dim = n_q * n_c;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int q = 0; q < n_q; ++q) {
    for (int n = 0; n < n_c; ++n) {
      h(bare_index(q, n, n_c), bare_index(q, n, n_c)) = e[q] + wc * n;
      // |q, n+1><q+1, n| : transmon down, photon up.
      if (q + 1 < n_q && n + 1 < n_c) {
        const double el = g * ratio[q] * std::sqrt(static_cast<double>(n + 1));
        const int i = bare_index(q, n + 1, n_c);
        const int j = bare_index(q + 1, n, n_c);
        h(i, j) = el;
        h(j, i) = el;
      }
    }
  }
  return h;
}

DressedLadder coupled_spectrum(const DeviceModel& dev, FluxBias f, int n_q, int n_c) {
  check_truncation(n_q, n_c);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(coupled_hamiltonian(dev, f, n_q, n_c));
  auto levels = label_by_overlap(solver.eigenvalues(), solver.eigenvectors(), n_c, {}, nullptr);
  return DressedLadder(n_q, n_c, std::move(levels), solver.eigenvectors());
}

DressedLadder coupled_spectrum_continued(const DeviceModel& dev, FluxBias f, const DressedLadder& previous) {
  check_truncation(previous.n_q(), previous.n_c());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      coupled_hamiltonian(dev, f, previous.n_q(), previous.n_c()));
  std::vector<BareLabel> ref;
  ref.reserve(previous.levels().size());
  for (const auto& l : previous.levels()) ref.push_back(l.label);
  auto levels = label_by_overlap(solver.eigenvalues(), solver.eigenvectors(), previous.n_c(), ref,
                                 &previous.vectors());
  return DressedLadder(previous.n_q(), previous.n_c(), std::move(levels), solver.eigenvectors());
}

DerivedSpectrum kerr_coefficients(const DeviceModel& dev, FluxBias f, int n_q, int n_c) {
  DressedLadder ladder = coupled_spectrum(dev, f, n_q, n_c);
  const double e_g0 = ladder.energy(0, 0);
  const double e_g1 = ladder.energy(0, 1);
  const double e_g2 = ladder.energy(0, 2);
  const double e_e0 = ladder.energy(1, 0);
  const double e_e1 = ladder.energy(1, 1);

  DerivedSpectrum s;
  s.omega_q_ghz = e_e0 - e_g0;
  s.omega_c_dressed_ghz = e_g1 - e_g0;
  s.chi_mhz = ((e_e1 - e_e0) - (e_g1 - e_g0)) * 1e3;
  s.alpha_c_khz = -0.5 * (e_g2 - 2.0 * e_g1 + e_g0) * 1e6;
  s.detuning_ghz = s.omega_q_ghz - s.omega_c_dressed_ghz;
  s.kappa_mhz = dev.cavity.kappa_mhz;
  s.t1_us = dev.dissipation.t1_q_us;

  const std::vector<double> bare = transmon_spectrum(dev.transmon, f, 3);
  s.alpha_q_mhz = (bare[2] - 2.0 * bare[1]) * 1e3;
  s.bare_detuning_ghz = bare[1] - dev.cavity.omega_bare_ghz;
  const double g = dev.coupling.g_mhz * 1e-3;
  if (std::abs(s.bare_detuning_ghz) < 3.0 * g) {
    std::ostringstream os;
    os << "not dispersive: |detuning| = " << std::abs(s.bare_detuning_ghz) * 1e3 << " MHz < 3g";
    s.warnings.push_back(os.str());
  }
  return s;
}

std::vector<double> dressed_shift_vs_photons(const DerivedSpectrum& spec, const std::vector<double>& nbar_grid) {
  std::vector<double> out;
  out.reserve(nbar_grid.size());
  const double slope = -2.0 * spec.alpha_c_khz * 1e-6;
  for (double nbar : nbar_grid) {
    if (nbar < 0.0) throw NumericError("dressed_shift_vs_photons: nbar must be non-negative");
    out.push_back(spec.omega_c_dressed_ghz + slope * nbar);
  }
  return out;
}

double dressed_qubit_frequency(const DeviceModel& dev, FluxBias f) {
  const double f01 = transmon_spectrum(dev.transmon, f, 2)[1];
  const double wc = dev.cavity.omega_bare_ghz;
  const double g = dev.coupling.g_mhz * 1e-3;
  const double half = 0.5 * (f01 - wc);
  const double root = std::sqrt(half * half + g * g);
  // The branch that tends to the bare qubit as g -> 0.
  return 0.5 * (f01 + wc) + (half >= 0.0 ? root : -root);
}

double flux_for_detuning(const DeviceModel& dev, double bare_detuning_ghz) {
  return flux_for_f01(dev.transmon, dev.cavity.omega_bare_ghz + bare_detuning_ghz);
}

}  // namespace cqed::spectral
