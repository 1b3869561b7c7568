#include "cqed/lindblad/model.hpp"

#include <cmath>
#include <numbers>

#include "cqed/error.hpp"
#include "cqed/spectral/coupled.hpp"
#include "cqed/spectral/transmon.hpp"

namespace cqed::lindblad {

namespace {

constexpr double kFoldedSpan = 0.5;

Eigen::MatrixXd coupling_matrix(const HilbertSpace& s, double g_ghz, const std::vector<double>& ratio) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(s.dim(), s.dim());
  for (int q = 0; q + 1 < s.n_q; ++q) {
    for (int n = 0; n + 1 < s.n_c; ++n) {
      const double el = g_ghz * ratio[q] * std::sqrt(n + 1.0);
      const int i = s.index(q, n + 1);
      const int j = s.index(q + 1, n);
      c(i, j) = el;
      c(j, i) = el;
    }
  }
  return c;
}

Eigen::VectorXd diagonal_from_levels(const HilbertSpace& s, const std::vector<double>& e, double wc, Frame frame) {
  Eigen::VectorXd d(s.dim());
  for (int q = 0; q < s.n_q; ++q) {
    for (int n = 0; n < s.n_c; ++n) {
      d(s.index(q, n)) = frame == Frame::lab ? e[q] + wc * n : e[q] - wc * q;
    }
  }
  return d;
}

std::vector<double> ratios_for(const TransmonParams& p, FluxBias f, int n_q) {
  // coupling_ratios needs at least two levels; n_q = 2 gives the single 0-1 ratio.
  return spectral::coupling_ratios(p, f, n_q);
}

const DeviceModel& checked(const DeviceModel& d) {
  cqed::validate(d);
  return d;
}

const HilbertSpace& checked(const HilbertSpace& s) {
  validate(s);
  return s;
}

}  // namespace

TransmonLookup::TransmonLookup(const TransmonParams& p, int n_levels, int n_points)
    : p_(p), n_levels_(n_levels) {
  if (n_levels < 1) throw ConfigError("TransmonLookup: n_levels must be >= 1");
  if (n_points < 4) throw ConfigError("TransmonLookup: need at least 4 points");
  // Surfaces cutoff problems once, at the deepest well.
  (void)spectral::transmon_spectrum(p, FluxBias{0.0}, n_levels);
  const double h = kFoldedSpan / (n_points - 1);
  std::vector<std::vector<double>> table(n_levels, std::vector<double>(n_points));
  for (int k = 0; k < n_points; ++k) {
    const double phi = k * h;
    const auto e = spectral::transmon_levels(spectral::ej_of_flux(p, FluxBias{phi}), p.ec_ghz, p.ng, p.n_cut, n_levels);
    for (int q = 0; q < n_levels; ++q) table[q][k] = e[q];
  }
  splines_.reserve(n_levels);
  for (int q = 0; q < n_levels; ++q) {
    // Levels are even about both 0 and 1/2, so the end slopes vanish.
    splines_.emplace_back(table[q].data(), table[q].size(), 0.0, h, 0.0, 0.0);
  }
}

double TransmonLookup::level(int q, double phi_ratio) const {
  if (q == 0) return 0.0;
  return splines_.at(q)(spectral::fold_flux(phi_ratio));
}

double TransmonLookup::audit_max_error_khz(int n_audit) const {
  double worst = 0.0;
  for (int i = 0; i < n_audit; ++i) {
    const double phi = kFoldedSpan * (i + 0.37) / n_audit;
    const auto e = spectral::transmon_levels(spectral::ej_of_flux(p_, FluxBias{phi}), p_.ec_ghz, p_.ng, p_.n_cut, n_levels_);
    for (int q = 1; q < n_levels_; ++q) worst = std::max(worst, std::abs(level(q, phi) - e[q]) * 1e6);
  }
  return worst;
}

SystemModel::SystemModel(const DeviceModel& dev, const HilbertSpace& space, FluxBias reference)
    : dev_(checked(dev)), space_(checked(space)), reference_(reference), lookup_(dev.transmon, space.n_q) {
  const std::vector<double> ratio = ratios_for(dev.transmon, reference, space.n_q);
  coupling_ = coupling_matrix(space, dev.coupling.g_mhz * 1e-3, ratio);
  a_ = annihilation_a(space);
  b_ = lowering_b(space, ratio);

  const double kappa = 2.0 * std::numbers::pi * dev.dissipation.kappa_mhz * 1e-3;
  const double gamma1 = 1.0 / (dev.dissipation.t1_q_us * 1e3);
  const double gphi = dev.dissipation.gamma_phi_mhz * 1e-3;
  if (kappa > 0.0) collapse_.push_back({std::sqrt(kappa) * a_.m, OperatorRole::collapse, "sqrt_kappa_a"});
  if (gamma1 > 0.0) collapse_.push_back({std::sqrt(gamma1) * b_.m, OperatorRole::collapse, "sqrt_gamma1_b"});
  if (gphi > 0.0) {
    collapse_.push_back({std::sqrt(2.0 * gphi) * (b_.m.adjoint() * b_.m), OperatorRole::collapse, "sqrt_2gphi_bdb"});
  }
}

Eigen::VectorXd SystemModel::diagonal(double phi_ratio, Frame frame) const {
  std::vector<double> e(space_.n_q);
  for (int q = 0; q < space_.n_q; ++q) e[q] = lookup_.level(q, phi_ratio);
  return diagonal_from_levels(space_, e, frame_ghz(), frame);
}

Operator SystemModel::hamiltonian(double phi_ratio, Frame frame) const {
  Eigen::MatrixXd h = coupling_;
  h.diagonal() += diagonal(phi_ratio, frame);
  return {h.cast<cplx>(), OperatorRole::hamiltonian, "H"};
}

Vector SystemModel::Dressed::state(int q_, int n_) const {
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (q[k] == q_ && n[k] == n_) return states[k];
  }
  throw LabelingAmbiguityError("dressed state not found");
}

SystemModel::Dressed SystemModel::dressed(double phi_ratio) const {
  Eigen::MatrixXd h = coupling_;
  h.diagonal() += diagonal(phi_ratio, Frame::lab);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  Dressed d;
  const int dim = space_.dim();
  d.energies_ghz.resize(dim);
  std::vector<bool> taken(dim, false);
  for (int k = 0; k < dim; ++k) {
    Eigen::Index best = 0;
    es.eigenvectors().col(k).cwiseAbs2().maxCoeff(&best);
    if (taken[best]) throw LabelingAmbiguityError("two dressed states share a bare label; flux too close to a crossing");
    taken[best] = true;
    const int q = static_cast<int>(best) / space_.n_c;
    const int n = static_cast<int>(best) % space_.n_c;
    d.q.push_back(q);
    d.n.push_back(n);
    d.states.push_back(es.eigenvectors().col(k).cast<cplx>());
    d.energies_ghz(k) = es.eigenvalues()(k) - frame_ghz() * (q + n);
  }
  return d;
}

Operator SystemModel::dressed_transmon_projector(int q, double phi_ratio) const {
  Dressed d = dressed(phi_ratio);
  std::vector<Vector> sel;
  for (std::size_t k = 0; k < d.states.size(); ++k) {
    if (d.q[k] == q) sel.push_back(d.states[k]);
  }
  return projector(sel, "P_dressed_q" + std::to_string(q));
}

Operator build_hamiltonian(const DeviceModel& dev, const HilbertSpace& space, FluxBias flux, Frame frame) {
  validate(space);
  const std::vector<double> e = spectral::transmon_spectrum(dev.transmon, flux, space.n_q);
  const std::vector<double> ratio = ratios_for(dev.transmon, flux, space.n_q);
  Eigen::MatrixXd h = coupling_matrix(space, dev.coupling.g_mhz * 1e-3, ratio);
  h.diagonal() += diagonal_from_levels(space, e, dev.cavity.omega_bare_ghz, frame);
  Operator op{h.cast<cplx>(), OperatorRole::hamiltonian, "H"};
  check(op, space);
  return op;
}

}  // namespace cqed::lindblad
