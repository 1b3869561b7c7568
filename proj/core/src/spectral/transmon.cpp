#include "cqed/spectral/transmon.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cqed/error.hpp"

namespace cqed::spectral {

namespace {

constexpr double kCutoffToleranceGhz = 1e-6;  // 1 kHz
constexpr int kCutoffProbe = 5;

Eigen::VectorXd charge_grid(double ng, int n_cut) {
  Eigen::VectorXd n(2 * n_cut + 1);
  for (int k = 0; k < n.size(); ++k) n(k) = static_cast<double>(k - n_cut) - ng;
  return n;
}

// The charge-basis Hamiltonian is tridiagonal, so skip the reduction step.
Eigen::VectorXd eigenvalues(double ej, double ec, double ng, int n_cut) {
  Eigen::VectorXd n = charge_grid(ng, n_cut);
  Eigen::VectorXd diag = 4.0 * ec * n.array().square();
  Eigen::VectorXd sub = Eigen::VectorXd::Constant(n.size() - 1, -0.5 * ej);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    // The implicit QL sweep occasionally stalls on the near-degenerate
    // high-charge pairs; the dense path is slower but robust.
    solver.compute(charge_hamiltonian(ej, ec, ng, n_cut), Eigen::EigenvaluesOnly);
  }
  return solver.eigenvalues();
}

// Checks the top requested level against a larger basis.
void check_cutoff(const Eigen::VectorXd& base, double ej, double ec, double ng, int n_cut,
                  int top_level) {
  Eigen::VectorXd wide = eigenvalues(ej, ec, ng, n_cut + kCutoffProbe);
  double shift = std::abs((wide(top_level) - wide(0)) - (base(top_level) - base(0)));
  if (shift > kCutoffToleranceGhz) {
    std::ostringstream os;
    os << "charge cutoff n_cut=" << n_cut << " too small: level " << top_level << " moves by "
       << shift * 1e6 << " kHz when n_cut grows by " << kCutoffProbe;
    throw CutoffError(os.str());
  }
}

}  // namespace

double ej_of_flux(const TransmonParams& p, FluxBias f) {
  const double x = std::numbers::pi * f.phi_ratio;
  const double c = std::cos(x);
  const double s = std::sin(x);
  return p.ej_max_ghz * std::sqrt(c * c + p.asym * p.asym * s * s);
}

Eigen::MatrixXd charge_hamiltonian(double ej_ghz, double ec_ghz, double ng, int n_cut) {
  const int dim = 2 * n_cut + 1;
  Eigen::VectorXd n = charge_grid(ng, n_cut);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    h(k, k) = 4.0 * ec_ghz * n(k) * n(k);
    if (k + 1 < dim) {
      h(k, k + 1) = -0.5 * ej_ghz;
      h(k + 1, k) = -0.5 * ej_ghz;
    }
  }
  return h;
}

TransmonEigensystem diagonalize(double ej_ghz, double ec_ghz, double ng, int n_cut) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(charge_hamiltonian(ej_ghz, ec_ghz, ng, n_cut));
  return {solver.eigenvalues(), solver.eigenvectors(), charge_grid(ng, n_cut)};
}

std::vector<double> transmon_spectrum(const TransmonParams& p, FluxBias f, int n_levels) {
  if (n_levels < 1 || n_levels > p.basis_dim()) {
    throw NumericError("transmon_spectrum: n_levels must lie in [1, 2*n_cut+1]");
  }
  const double ej = ej_of_flux(p, f);
  Eigen::VectorXd w = eigenvalues(ej, p.ec_ghz, p.ng, p.n_cut);
  check_cutoff(w, ej, p.ec_ghz, p.ng, p.n_cut, n_levels - 1);
  std::vector<double> out(n_levels);
  for (int k = 0; k < n_levels; ++k) out[k] = w(k) - w(0);
  return out;
}

std::vector<double> transmon_levels(double ej_ghz, double ec_ghz, double ng, int n_cut, int n_levels) {
  Eigen::VectorXd w = eigenvalues(ej_ghz, ec_ghz, ng, n_cut);
  std::vector<double> out(n_levels);
  for (int k = 0; k < n_levels; ++k) out[k] = w(k) - w(0);
  return out;
}

TransmonObservables observables(double ej_ghz, double ec_ghz, double ng, int n_cut) {
  Eigen::VectorXd w = eigenvalues(ej_ghz, ec_ghz, ng, n_cut);
  const double e1 = w(1) - w(0);
  const double e2 = w(2) - w(0);
  return {e1, (e2 - 2.0 * e1) * 1e3};
}

Calibration calibrate_from_observables(double f01_ghz, double alpha_q_mhz, int n_cut) {
  const double alpha_ghz = alpha_q_mhz * 1e-3;
  if (!(f01_ghz > 0.0) || !(alpha_ghz < 0.0) || !(std::abs(alpha_ghz) < f01_ghz)) {
    throw ConfigError("calibrate_from_observables: need f01 > 0, alpha_q < 0, |alpha_q| < f01");
  }
  constexpr int kMaxIterations = 50;
  constexpr double kTarget = 1e-3;

  // Asymptotic transmon relations as the seed.
  double ec = -alpha_ghz;
  double ej = (f01_ghz - alpha_ghz) * (f01_ghz - alpha_ghz) / (-8.0 * alpha_ghz);

  auto residual = [&](double x_ej, double x_ec) {
    TransmonObservables o = observables(x_ej, x_ec, 0.0, n_cut);
    return Eigen::Vector2d(o.f01_ghz - f01_ghz, o.alpha_mhz * 1e-3 - alpha_ghz);
  };
  auto rel_norm = [&](const Eigen::Vector2d& r) {
    return std::max(std::abs(r(0) / f01_ghz), std::abs(r(1) / alpha_ghz));
  };

  Eigen::Vector2d r = residual(ej, ec);
  double best = rel_norm(r);
  int it = 0;
  for (; it < kMaxIterations && best > 1e-12; ++it) {
    const double hj = 1e-6 * ej;
    const double hc = 1e-6 * ec;
    Eigen::Matrix2d jac;
    jac.col(0) = (residual(ej + hj, ec) - residual(ej - hj, ec)) / (2.0 * hj);
    jac.col(1) = (residual(ej, ec + hc) - residual(ej, ec - hc)) / (2.0 * hc);
    Eigen::Vector2d step = jac.fullPivLu().solve(-r);

    // Damped Newton: halve until the residual decreases and the iterate stays physical.
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k) {
      const double tj = ej + lambda * step(0);
      const double tc = ec + lambda * step(1);
      if (tj > 0.0 && tc > 0.0) {
        Eigen::Vector2d tr = residual(tj, tc);
        if (rel_norm(tr) < best) {
          ej = tj;
          ec = tc;
          r = tr;
          best = rel_norm(tr);
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
  }
  if (best > kTarget) {
    std::ostringstream os;
    os << "calibrate_from_observables: residual " << best << " after " << it << " iterations";
    throw ConvergenceError(os.str(), best);
  }
  return {ej, ec, it, best};
}

int confined_state_count(const TransmonParams& p, FluxBias f) {
  const double ej = ej_of_flux(p, f);
  Eigen::VectorXd w = eigenvalues(ej, p.ec_ghz, p.ng, p.n_cut);
  int count = 0;
  while (count < w.size() && w(count) < ej) ++count;
  if (count > 0) check_cutoff(w, ej, p.ec_ghz, p.ng, p.n_cut, std::min<int>(count, w.size() - 1));
  return count;
}

double charge_dispersion(const TransmonParams& p, FluxBias f, int level) {
  if (level < 0 || level >= p.basis_dim()) throw NumericError("charge_dispersion: level out of range");
  const double ej = ej_of_flux(p, f);
  Eigen::VectorXd w0 = eigenvalues(ej, p.ec_ghz, 0.0, p.n_cut);
  Eigen::VectorXd w5 = eigenvalues(ej, p.ec_ghz, 0.5, p.n_cut);
  check_cutoff(w0, ej, p.ec_ghz, 0.0, p.n_cut, level);
  return std::abs(w5(level) - w0(level)) * 1e3;
}

Eigen::MatrixXd charge_matrix_elements(const TransmonParams& p, FluxBias f, int n_levels) {
  TransmonEigensystem es = diagonalize(ej_of_flux(p, f), p.ec_ghz, p.ng, p.n_cut);
  Eigen::MatrixXd v = es.vectors.leftCols(n_levels);
  Eigen::MatrixXd n = v.transpose() * es.charges.asDiagonal() * v;
  // Flip eigenvector signs so consecutive elements are positive.
  for (int l = 0; l + 1 < n_levels; ++l) {
    if (n(l, l + 1) < 0.0) {
      n.row(l + 1) *= -1.0;
      n.col(l + 1) *= -1.0;
    }
  }
  return n;
}

double fold_flux(double phi_ratio) {
  double x = std::fmod(phi_ratio, 1.0);
  if (x < 0.0) x += 1.0;
  return x > 0.5 ? 1.0 - x : x;
}

double flux_for_f01(const TransmonParams& p, double target_f01_ghz) {
  auto f01_at = [&](double phi) {
    return observables(ej_of_flux(p, FluxBias{phi}), p.ec_ghz, p.ng, p.n_cut).f01_ghz;
  };
  const double hi = f01_at(0.0);
  const double lo = f01_at(0.5);
  if (target_f01_ghz > hi || target_f01_ghz < lo) {
    std::ostringstream os;
    os << "target qubit frequency " << target_f01_ghz << " GHz outside reachable range [" << lo
       << ", " << hi << "] GHz";
    throw UnreachableDetuningError(os.str());
  }
  if (target_f01_ghz == hi) return 0.0;
  if (target_f01_ghz == lo) return 0.5;
  std::uintmax_t max_iter = 200;
  auto tol = [](double a, double b) { return std::abs(a - b) < 1e-14; };
  auto [a, b] = boost::math::tools::toms748_solve(
      [&](double phi) { return f01_at(phi) - target_f01_ghz; }, 0.0, 0.5, hi - target_f01_ghz,
      lo - target_f01_ghz, tol, max_iter);
  return 0.5 * (a + b);
}

}  // namespace cqed::spectral
