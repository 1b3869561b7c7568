#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "cqed/device.hpp"
#include "cqed/error.hpp"
#include "cqed/lindblad/chevron.hpp"
#include "cqed/lindblad/evolve.hpp"
#include "cqed/lindblad/model.hpp"
#include "cqed/spectral/coupled.hpp"

#include "approx.hpp"

using namespace cqed;
using namespace cqed::lindblad;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Column-stacked Liouvillian for constant H (GHz) and collapse operators (1/sqrt(ns)).
Matrix liouvillian(const Matrix& h_ghz, const std::vector<Operator>& collapse) {
  const auto d = h_ghz.rows();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix h = kTwoPi * h_ghz;
  auto kron = [](const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };
  const cplx im(0.0, 1.0);
  Matrix l = -im * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& c : collapse) {
    const Matrix& m = c.m;
    const Matrix mm = m.adjoint() * m;
    l += kron(m.conjugate(), m) - 0.5 * kron(id, mm) - 0.5 * kron(mm.transpose(), id);
  }
  return l;
}

Matrix oracle_state(const Matrix& rho0, const Matrix& l, double t) {
  const auto d = rho0.rows();
  const Matrix prop = (l * t).exp();
  Eigen::Map<const Eigen::VectorXcd> v0(rho0.data(), d * d);
  Eigen::VectorXcd v = prop * v0;
  return Eigen::Map<Matrix>(v.data(), d, d);
}

DeviceModel lossy_device() {
  auto dev = reference_device();
  dev.dissipation.gamma_phi_mhz = 0.05;
  // Shorter lifetimes make the dissipator visible over tens of ns.
  dev.dissipation.t1_q_us = 0.05;
  dev.cavity.kappa_mhz = dev.dissipation.kappa_mhz = 5.0;
  return dev;
}

}  // namespace

TEST_CASE("constant-flux master equation matches the Liouvillian exponential") {
  const auto dev = lossy_device();
  const HilbertSpace space{3, 4};
  const SystemModel model(dev, space);
  const double phi = spectral::flux_for_detuning(dev, 0.03);
  Controls c;
  c.flux = FluxSchedule::constant(phi);
  Vector psi = Vector::Zero(space.dim());
  psi(space.index(1, 0)) = 1.0;
  psi(space.index(0, 2)) = cplx(0.3, 0.4);
  const auto rho0 = DensityMatrix::pure(psi / psi.norm());

  EvolveOptions opt;
  opt.tol = 1e-9;
  opt.report_times = {7.0, 25.0};
  opt.checkpoint_times = {7.0, 25.0};
  const auto tr = evolve(rho0, c, model, {}, opt);
  REQUIRE(tr.checkpoints.size() == 2);
  const Matrix l = liouvillian(model.hamiltonian(phi).m, model.collapse());
  for (int k = 0; k < 2; ++k) {
    const Matrix ref = oracle_state(rho0.rho(), l, opt.report_times[k]);
    CHECK((tr.checkpoints[k].rho() - ref).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("state invariants hold along a swap with dissipation") {
  const auto dev = reference_device();
  const auto seq = pulse::build_swap_sequence(dev, 0.02, 25.0, 0.0, false);
  const SystemModel model(dev, {3, 5});
  const auto* flux = seq.find(pulse::Role::flux);
  auto rho0 = DensityMatrix(model.dressed(0.0).state(1, 0) * model.dressed(0.0).state(1, 0).adjoint(), flux->start_ns - 2.0);
  EvolveOptions opt;
  opt.tol = 1e-8;
  for (double t = flux->start_ns; t <= flux->end_ns() + 2.0; t += 1.0) {
    opt.report_times.push_back(t);
    opt.checkpoint_times.push_back(t);
  }
  const auto tr = evolve(rho0, seq, model, {}, opt);
  CHECK(tr.diagnostics.max_trace_error < 1e-8);
  CHECK(tr.diagnostics.max_hermiticity_error < 1e-9);
  CHECK(tr.diagnostics.min_eigenvalue >= -1e-8);
  for (const auto& cp : tr.checkpoints) {
    CHECK(cp.trace_error() < 1e-8);
    CHECK(cp.hermiticity_error() < 1e-9);
    CHECK(cp.min_eigenvalue() >= -1e-8);
  }
}

TEST_CASE("closed evolution keeps purity and energy at constant flux") {
  const auto dev = reference_device();
  const HilbertSpace space{3, 5};
  const SystemModel model(dev, space);
  const double phi = spectral::flux_for_detuning(dev, 0.0);
  Controls c;
  c.flux = FluxSchedule::constant(phi);
  Vector psi = Vector::Zero(space.dim());
  psi(space.index(1, 0)) = 1.0;
  psi(space.index(0, 1)) = 0.5;
  psi(space.index(1, 1)) = cplx(0.0, 0.5);
  const Operator h = model.hamiltonian(phi);
  // Shift so the energy is far from zero and the relative check is meaningful.
  Operator hs = h;
  hs.m += dev.cavity.omega_bare_ghz * Matrix::Identity(space.dim(), space.dim());
  hs.name = "H";
  EvolveOptions opt;
  opt.dissipation = false;
  for (int k = 1; k <= 40; ++k) opt.report_times.push_back(0.5 * k);
  const auto tr = evolve(DensityMatrix::pure(psi / psi.norm()), c, model, {hs}, opt);
  const auto& e = tr.series("H");
  for (double v : e) CHECK(std::abs(v - e.front()) < 1e-8 * std::abs(e.front()));
  CHECK(std::abs(tr.final_state.purity() - 1.0) < 1e-8);
  CHECK(tr.diagnostics.min_purity > 1.0 - 1e-8);
}

TEST_CASE("Hamiltonians are hermitian") {
  const auto dev = reference_device();
  for (double phi : {0.0, 0.2, 0.4}) {
    const auto h = build_hamiltonian(dev, {4, 6}, {phi});
    CHECK((h.m - h.m.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * h.m.cwiseAbs().maxCoeff());
    CHECK_NOTHROW(check(h, {4, 6}));
  }
}

TEST_CASE("resonant swap time is 1/(4g)") {
  const auto dev = reference_device();
  const HilbertSpace space{3, 5};
  const double phi = spectral::flux_for_detuning(dev, 0.0);
  const SystemModel model(dev, space, {phi});
  Controls c;
  c.flux = FluxSchedule::constant(phi);
  const auto p_g1 = projector({Vector::Unit(space.dim(), space.index(0, 1))}, "g1");
  EvolveOptions opt;
  opt.tol = 1e-10;
  for (int k = 1; k <= 600; ++k) opt.report_times.push_back(0.01 * k);
  const auto tr = evolve_closed(Vector::Unit(space.dim(), space.index(1, 0)), 0.0, c, model, {p_g1}, opt);
  const auto& p = tr.series("g1");
  std::size_t best = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] > p[best]) best = k;
  }
  REQUIRE(best > 0);
  REQUIRE(best + 1 < p.size());
  // Parabolic refinement of the first maximum.
  const double y0 = p[best - 1], y1 = p[best], y2 = p[best + 1];
  const double t_peak = tr.times[best] + 0.01 * 0.5 * (y0 - y2) / (y0 - 2.0 * y1 + y2);
  const double analytic = 1.0 / (4.0 * dev.coupling.g_mhz * 1e-3);
  CHECK(analytic == rel_approx(2.87, 0.002));
  CHECK(t_peak == rel_approx(analytic, 0.01));
  CHECK(y1 > 0.99);
}

TEST_CASE("pi pulse calibration") {
  const auto dev = reference_device();
  const pulse::GaussEdgeRect shape{35.0, 17.5, 9.0, 0.0, 0.0, 0.0};
  SUBCASE("reaches the excited state and the double pulse returns") {
    const HilbertSpace space{3, 5};
    const auto cal = calibrate_pi_pulse(dev, space, shape);
    CHECK(cal.p_excited >= 0.995);
    const SystemModel model(dev, space);
    pulse::PulseSequence seq;
    auto twice = shape;
    twice.amplitude = 2.0 * cal.amplitude_mhz;
    twice.carrier_freq_ghz = cal.carrier_ghz;
    seq.segments.push_back({pulse::Role::control, 0.0, twice});
    EvolveOptions opt;
    opt.dissipation = false;
    opt.report_times = {35.0};
    const auto pe = model.dressed_transmon_projector(1, 0.0);
    const auto tr = evolve(DensityMatrix::basis(space, 0, 0), seq, model, {pe}, opt);
    CHECK(tr.values[0].back() < 0.05);
  }
  SUBCASE("two-level truncation gives area pi") {
    const auto cal = calibrate_pi_pulse(dev, {2, 3}, shape);
    CHECK(cal.area_rad == rel_approx(std::numbers::pi, 0.01));
  }
}

TEST_CASE("halving the tolerance moves populations by less than the tolerance") {
  const auto dev = reference_device();
  const std::vector<double> det{0.0, 0.1}, tau{0.0, 3.0, 7.5, 12.0, 20.0};
  ChevronOptions a;
  a.tol = 1e-6;
  ChevronOptions b = a;
  b.tol = 0.5e-6;
  const auto ra = simulate_chevron(dev, det, tau, 0.0, a);
  const auto rb = simulate_chevron(dev, det, tau, 0.0, b);
  for (std::size_t i = 0; i < det.size(); ++i)
    for (std::size_t j = 0; j < tau.size(); ++j) CHECK(std::abs(ra.p_excited[i][j] - rb.p_excited[i][j]) < a.tol);
}

TEST_CASE("larger truncation leaves chevron populations unchanged") {
  const auto dev = reference_device();
  const std::vector<double> det{0.0, 0.15}, tau{2.0, 6.0, 15.0};
  ChevronOptions small;
  ChevronOptions big;
  big.space = {4, 7};
  const auto rs = simulate_chevron(dev, det, tau, 0.0, small);
  const auto rb = simulate_chevron(dev, det, tau, 0.0, big);
  for (std::size_t i = 0; i < det.size(); ++i)
    for (std::size_t j = 0; j < tau.size(); ++j) CHECK(std::abs(rs.p_excited[i][j] - rb.p_excited[i][j]) < 1e-4);
}

TEST_CASE("a very wide flux line reproduces the ideal pulse") {
  const auto dev = reference_device();
  const std::vector<double> det{0.0}, tau{1.0, 4.0, 9.0, 16.0};
  ChevronOptions ideal;
  ChevronOptions wide;
  // Ten times the inverse edge sigma.
  wide.line.filter = pulse::LineFilter{10.0 / wide.swap.flux_edge_sigma_ns * 1e3, 1};
  wide.line.dt_ns = 0.005;
  const auto r0 = simulate_chevron(dev, det, tau, 0.0, ideal);
  const auto r1 = simulate_chevron(dev, det, tau, 0.0, wide);
  for (std::size_t j = 0; j < tau.size(); ++j) CHECK(std::abs(r0.p_excited[0][j] - r1.p_excited[0][j]) < 5e-3);
}

TEST_CASE("density matrix helpers") {
  const HilbertSpace s{3, 4};
  const auto rho = DensityMatrix::basis(s, 1, 2);
  CHECK(rho.trace_error() == 0.0);
  CHECK(rho.purity() == rel_approx(1.0));
  CHECK(rho.expectation(photon_number(s)) == rel_approx(2.0));
  CHECK(rho.expectation(transmon_number(s)) == rel_approx(1.0));
  CHECK_NOTHROW(rho.check());
  Matrix bad = rho.rho();
  bad(0, 0) = -0.1;
  bad(s.index(1, 2), s.index(1, 2)) = 1.1;
  CHECK_THROWS_AS(DensityMatrix(bad, 0.0).check(), NumericError);

  std::stringstream ss;
  Matrix m = Matrix::Random(4, 4);
  write_complex_matrix(ss, m);
  CHECK(read_complex_matrix(ss) == m);

  CHECK_THROWS_AS(validate(HilbertSpace{1, 4}), ConfigError);
  CHECK_THROWS_AS(validate(HilbertSpace{20, 20}), ConfigError);
}

TEST_CASE("transmon level lookup agrees with direct diagonalization") {
  const TransmonLookup lookup(reference_device().transmon, 4);
  CHECK(lookup.audit_max_error_khz() < 1.0);
}
