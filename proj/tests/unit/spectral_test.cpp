#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "cqed/device.hpp"
#include "cqed/error.hpp"
#include "cqed/spectral/coupled.hpp"
#include "cqed/spectral/transmission.hpp"
#include "cqed/spectral/transmon.hpp"

#include "approx.hpp"

using namespace cqed;
using namespace cqed::spectral;

namespace {

// Independent dense oracle: 4 E_C (n - n_g)^2 on the diagonal, -E_J / 2 off it.
std::vector<double> oracle_levels(double ej, double ec, double ng, int n_cut, int n_levels) {
  const int dim = 2 * n_cut + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    const double n = k - n_cut;
    h(k, k) = 4.0 * ec * (n - ng) * (n - ng);
    if (k + 1 < dim) h(k, k + 1) = h(k + 1, k) = -0.5 * ej;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  std::vector<double> out;
  for (int l = 0; l < n_levels; ++l) out.push_back(es.eigenvalues()(l) - es.eigenvalues()(0));
  return out;
}

double oracle_ej(double ej_max, double d, double phi) {
  const double c = std::cos(M_PI * phi), s = std::sin(M_PI * phi);
  return ej_max * std::sqrt(c * c + d * d * s * s);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("SQUID Josephson energy") {
  const TransmonParams p{30.65, 0.225, 0.324, 0.0, 30};
  CHECK(ej_of_flux(p, {0.0}) == rel_approx(30.65, 1e-14));
  CHECK(ej_of_flux(p, {0.5}) == rel_approx(0.324 * 30.65, 1e-14));
  for (double phi : {-0.7, -0.3, 0.11, 0.37, 0.49, 1.2}) {
    CHECK(rel(ej_of_flux(p, {phi}), oracle_ej(30.65, 0.324, phi)) < 1e-14);
  }
}

TEST_CASE("asymmetry that puts the flux minimum of f01 at 4 GHz is near 0.32") {
  // Bisect with the dense oracle only.
  double lo = 0.05, hi = 0.9;
  for (int it = 0; it < 60; ++it) {
    const double d = 0.5 * (lo + hi);
    const double f = oracle_levels(oracle_ej(30.65, d, 0.5), 0.225, 0.0, 30, 2)[1];
    (f < 4.0 ? lo : hi) = d;
  }
  CHECK(lo == rel_approx(0.32, 0.03));
  const TransmonParams p{30.65, 0.225, lo, 0.0, 30};
  CHECK(transmon_spectrum(p, {0.5}, 2)[1] == rel_approx(4.0, 1e-8));
}

TEST_CASE("transmon spectrum matches the dense charge-basis oracle") {
  for (auto [ej, ec, ng] : {std::tuple{30.65, 0.225, 0.0}, {12.0, 0.3, 0.25}, {2.0, 0.5, 0.5}, {50.0, 0.15, 0.1}}) {
    const auto levels = transmon_levels(ej, ec, ng, 30, 8);
    const auto ref = oracle_levels(ej, ec, ng, 30, 8);
    for (int l = 1; l < 8; ++l) CHECK(std::abs(levels[l] - ref[l]) < 1e-9 * ref[l]);
  }
}

TEST_CASE("charge Hamiltonian is hermitian") {
  const auto h = charge_hamiltonian(30.65, 0.225, 0.17, 30);
  CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-12 * h.cwiseAbs().maxCoeff());
}

TEST_CASE("calibrated reference transmon reproduces f01 and anharmonicity") {
  const auto dev = reference_device();
  const auto lv = transmon_spectrum(dev.transmon, {0.0}, 3);
  CHECK(lv[1] == rel_approx(7.203, 0.01));
  CHECK((lv[2] - 2.0 * lv[1]) * 1e3 == rel_approx(-225.0, 0.05));
  // Frozen from the oracle: the exact inversion lands at E_J = 32.8188, E_C = 0.209645.
  CHECK(dev.transmon.ej_max_ghz == rel_approx(32.8188, 1e-5));
  CHECK(dev.transmon.ec_ghz == rel_approx(0.209645, 1e-5));
}

TEST_CASE("deep transmon approaches the sqrt(8 E_J E_C) - E_C asymptote") {
  const double ec = 0.2, ej = 136 * ec;
  const auto f01 = oracle_levels(ej, ec, 0.0, 30, 2)[1];
  CHECK(transmon_spectrum({ej, ec, 0.0, 0.0, 30}, {0.0}, 2)[1] == rel_approx(f01, 1e-10));
  CHECK(rel(f01, std::sqrt(8.0 * ej * ec) - ec) < 0.01);
}

TEST_CASE("calibrate_from_observables inverts the forward spectrum") {
  for (auto [f01, alpha] : {std::pair{7.203, -225.0}, {4.0, -260.0}, {5.5, -300.0}}) {
    const auto c = calibrate_from_observables(f01, alpha);
    const auto lv = oracle_levels(c.ej_ghz, c.ec_ghz, 0.0, 30, 3);
    CHECK(lv[1] == rel_approx(f01, 1e-8));
    CHECK((lv[2] - 2.0 * lv[1]) * 1e3 == rel_approx(alpha, 1e-7));
  }
  CHECK(calibrate_from_observables(4.0, -260.0).ej_ghz == rel_approx(9.9, 0.02));
  CHECK_THROWS_AS(calibrate_from_observables(5.0, 20.0), ConfigError);
  CHECK_THROWS_AS(calibrate_from_observables(-1.0, -200.0), ConfigError);
}

TEST_CASE("confined state count") {
  const auto dev = reference_device();
  const int n0 = confined_state_count(dev.transmon, {0.0});
  CHECK(n0 >= 8);
  CHECK(n0 <= 12);
  CHECK(confined_state_count({0.3, 0.3, 0.0, 0.0, 30}, {0.0}) <= 2);
  int prev = n0;
  for (int k = 1; k <= 50; ++k) {
    const int n = confined_state_count(dev.transmon, {0.01 * k});
    CHECK(n <= prev);
    prev = n;
  }
}

TEST_CASE("charge dispersion") {
  const auto dev = reference_device();
  CHECK(charge_dispersion(dev.transmon, {0.0}, 0) < 1e-3);
  // Free rotor: 4 E_C (n - n_g)^2 gives a ground shift of exactly E_C between n_g = 0 and 1/2.
  CHECK(charge_dispersion({0.0, 0.2, 0.0, 0.0, 30}, {0.0}, 0) == rel_approx(200.0, 1e-12));
}

TEST_CASE("truncation convergence at the reference device") {
  auto p = reference_device().transmon;
  const auto a = transmon_spectrum(p, {0.0}, 10);
  p.n_cut += 5;
  const auto b = transmon_spectrum(p, {0.0}, 10);
  for (int l = 0; l < 10; ++l) CHECK(std::abs(a[l] - b[l]) < 1e-6);
}

TEST_CASE("flux periodicity and parity") {
  const auto dev = reference_device();
  // Dyadic fluxes so that phi + 1 and -phi are exact inputs.
  for (double phi : {0.0625, 0.21875, 0.3125, 0.46875}) {
    const auto a = transmon_spectrum(dev.transmon, {phi}, 4);
    const auto b = transmon_spectrum(dev.transmon, {phi + 1.0}, 4);
    const auto c = transmon_spectrum(dev.transmon, {-phi}, 4);
    for (int l = 1; l < 4; ++l) {
      CHECK(rel(b[l], a[l]) < 1e-10);
      CHECK(rel(c[l], a[l]) < 1e-10);
    }
    const auto ka = kerr_coefficients(dev, {phi});
    const auto kb = kerr_coefficients(dev, {-phi - 1.0});
    CHECK(rel(kb.chi_mhz, ka.chi_mhz) < 1e-10);
    CHECK(rel(kb.alpha_c_khz, ka.alpha_c_khz) < 1e-10);
  }
}

TEST_CASE("ground-state dressed cavity frequency of the reference device") {
  const auto ladder = coupled_spectrum(reference_device(), {0.0});
  const double wc = ladder.energy(0, 1) - ladder.energy(0, 0);
  CHECK(std::abs(wc - 5.996) < 0.5e-3);
  // Frozen from the independent 2x2 estimate plus higher levels: 5.995730 GHz.
  CHECK(wc == rel_approx(5.995730, 1e-6));
}

TEST_CASE("coupled Hamiltonian is hermitian") {
  const auto h = coupled_hamiltonian(reference_device(), {0.2}, 5, 6);
  CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-12 * h.cwiseAbs().maxCoeff());
}

TEST_CASE("decoupled limit gives bare energies, no chi and no Kerr") {
  auto dev = reference_device();
  dev.coupling.g_mhz = 0.0;
  const auto ladder = coupled_spectrum(dev, {0.1}, 4, 5);
  const auto lv = transmon_spectrum(dev.transmon, {0.1}, 4);
  for (int q = 0; q < 4; ++q) {
    for (int n = 0; n < 5; ++n) {
      CHECK(std::abs(ladder.energy(q, n) - ladder.energy(0, 0) - (lv[q] + n * dev.cavity.omega_bare_ghz)) < 1e-12);
    }
  }
  const auto s = kerr_coefficients(dev, {0.1});
  CHECK(std::abs(s.chi_mhz) < 1e-6);
  CHECK(std::abs(s.alpha_c_khz) < 1e-3);
}

TEST_CASE("single-excitation block matches the closed-form Jaynes-Cummings splitting") {
  auto dev = reference_device();
  for (double phi : {0.0, 0.15, 0.25}) {
    const double wq = transmon_spectrum(dev.transmon, {phi}, 2)[1];
    const double wc = dev.cavity.omega_bare_ghz, g = dev.coupling.g_mhz * 1e-3;
    const double mid = 0.5 * (wq + wc), half = std::sqrt(g * g + 0.25 * (wq - wc) * (wq - wc));
    const auto b = single_excitation_branches(dev, {phi});
    CHECK(rel(b.lower_ghz, mid - half) < 1e-10);
    CHECK(rel(b.upper_ghz, mid + half) < 1e-10);
    // Higher transmon levels do not enter the one-excitation block of the full ladder.
    const auto ladder = coupled_spectrum(dev, {phi}, 3, 3);
    CHECK(rel(ladder.energy(0, 1) - ladder.energy(0, 0), mid - half) < 1e-10);
    CHECK(rel(ladder.energy(1, 0) - ladder.energy(0, 0), mid + half) < 1e-10);
  }
}

TEST_CASE("dispersive shift against the perturbative estimate") {
  const auto dev = reference_device();
  const auto s = kerr_coefficients(dev, {0.0});
  const double g = dev.coupling.g_mhz, delta = s.bare_detuning_ghz * 1e3, alpha = s.alpha_q_mhz;
  CHECK(g * g / delta == rel_approx(6.3, 0.01));
  // Cavity pull difference between e and g for a multilevel transmon.
  const double oracle = 2.0 * g * g * alpha / (delta * (delta + alpha));
  CHECK(std::abs(s.chi_mhz - oracle) < 0.25 * std::abs(oracle));
  CHECK(s.chi_mhz == rel_approx(-2.35701, 1e-4));
}

TEST_CASE("Kerr coefficient at the two quoted operating points") {
  const auto dev = reference_device();
  const auto far = kerr_coefficients(dev, {flux_for_detuning(dev, 1.2)});
  const auto near = kerr_coefficients(dev, {flux_for_detuning(dev, -0.6)});
  CHECK(far.alpha_c_signed_khz() < 0.0);
  CHECK(near.alpha_c_signed_khz() < 0.0);
  CHECK(near.alpha_c_khz > far.alpha_c_khz);
  CHECK(far.alpha_c_khz > 3.2 / 2);
  CHECK(far.alpha_c_khz < 3.2 * 2);
  CHECK(near.alpha_c_khz > 27.8 / 2);
  CHECK(near.alpha_c_khz < 27.8 * 2);
}

TEST_CASE("Kerr magnitude grows toward resonance") {
  const auto dev = reference_device();
  double prev = 0.0;
  for (double det = 1.2; det >= 0.4 - 1e-12; det -= 0.05) {
    const double a = std::abs(kerr_coefficients(dev, {flux_for_detuning(dev, det)}).alpha_c_khz);
    CHECK(a > prev);
    prev = a;
  }
}

TEST_CASE("dressed shift versus photon number") {
  DerivedSpectrum s;
  s.omega_c_dressed_ghz = 5.996;
  s.alpha_c_khz = 3.2;
  const auto w = dressed_shift_vs_photons(s, {0.0, 1000.0});
  CHECK(w[0] == 5.996);
  CHECK((w[0] - w[1]) * 1e3 == rel_approx(6.4, 1e-12));
}

TEST_CASE("transmission sweep is even in flux and peaks at the dressed cavity") {
  const auto dev = reference_device();
  std::vector<double> flux{-0.4, -0.2, 0.0, 0.2, 0.4};
  std::vector<double> freq;
  for (int k = 0; k <= 200; ++k) freq.push_back(5.99 + 1e-4 * k);
  const auto m = transmission_sweep(dev, flux, freq);
  for (std::size_t i = 0; i < freq.size(); ++i) {
    CHECK(m.at(0, i) == rel_approx(m.at(4, i), 1e-10));
    CHECK(m.at(1, i) == rel_approx(m.at(3, i), 1e-10));
  }
  std::size_t best = 0;
  for (std::size_t i = 0; i < freq.size(); ++i) {
    if (m.at(2, i) > m.at(2, best)) best = i;
  }
  CHECK(std::abs(freq[best] - 5.99573) < 1.1e-4);
}

TEST_CASE("minimum avoided-crossing splitting is 2g") {
  const auto b = minimum_splitting(reference_device(), 0.0, 0.5);
  CHECK(b.splitting_ghz() * 1e3 == rel_approx(174.0, 0.02));
}

TEST_CASE("device invariants collect every violation") {
  auto dev = reference_device();
  dev.transmon.asym = 1.3;
  dev.cavity.kappa_mhz = -1.0;
  const auto v = check_invariants(dev);
  CHECK(v.size() >= 2);
  CHECK(std::any_of(v.begin(), v.end(), [](const Violation& x) { return x.field == "asym"; }));
  CHECK_THROWS_AS(validate(dev), ConfigError);
  CHECK_THROWS_AS(flux_for_f01(reference_device().transmon, 9.0), UnreachableDetuningError);
}
