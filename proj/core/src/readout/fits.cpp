#include "cqed/readout/fits.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "cqed/error.hpp"
#include "least_squares.hpp"

namespace cqed::readout {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPlanck = 6.62607015e-34;  // J s

void check_series(const std::vector<double>& t, const std::vector<double>& y, std::size_t min_points,
                  const char* who) {
  if (t.size() != y.size()) throw ConfigError(fmt::format("{}: time and value series differ in length", who));
  if (t.size() < min_points) throw ConfigError(fmt::format("{}: need at least {} points, got {}", who, min_points, t.size()));
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (!(t[k] > t[k - 1])) throw ConfigError(fmt::format("{}: abscissa must be strictly increasing", who));
  }
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!std::isfinite(t[k]) || !std::isfinite(y[k])) throw ConfigError(fmt::format("{}: non-finite input", who));
  }
}

double sd(const Eigen::MatrixXd& cov, int k) { return std::sqrt(std::max(0.0, cov(k, k))); }

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double m = *mid;
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
  return m;
}

// Peak of the mean-removed periodogram between one cycle per span and the
// Nyquist frequency of the median spacing.
void periodogram_seed(const std::vector<double>& t, const std::vector<double>& y, double mean, double& f,
                      double& amp, double& phase) {
  const double span = t.back() - t.front();
  std::vector<double> dts;
  for (std::size_t k = 1; k < t.size(); ++k) dts.push_back(t[k] - t[k - 1]);
  const double nyquist = 0.5 / median(dts);
  const double df = 0.125 / span;
  double best = -1.0;
  std::complex<double> best_s;
  for (double fr = 0.5 / span; fr <= nyquist; fr += df) {
    std::complex<double> s = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      s += (y[k] - mean) * std::exp(std::complex<double>(0.0, -kTwoPi * fr * t[k]));
    }
    if (std::norm(s) > best) {
      best = std::norm(s);
      best_s = s;
      f = fr;
    }
  }
  amp = 2.0 * std::abs(best_s) / static_cast<double>(t.size());
  phase = std::arg(best_s);
}

}  // namespace

void write_fit_report(std::ostream& os, const FitReport& r) {
  os << "parameter,value,stderr\n";
  for (const auto& p : r.parameters) os << fmt::format("{},{:.12g},{:.6g}\n", p.name, p.value, p.stderr_);
  os << fmt::format("residual_rms,{:.6g},\n", r.residual_rms);
  for (const auto& w : r.warnings) os << fmt::format("warning,\"{}\",\n", w);
}

// ---- Rabi -----------------------------------------------------------------

double RabiFit::tau() const { return decay > 0.0 ? 1.0 / decay : std::numeric_limits<double>::infinity(); }

FitReport RabiFit::report() const {
  FitReport r;
  r.parameters = {{"amplitude", amplitude, stderr_(0)},
                  {"frequency", frequency, stderr_(1)},
                  {"decay", decay, stderr_(2)},
                  {"phase", phase, stderr_(3)},
                  {"offset", offset, stderr_(4)}};
  r.residual_rms = residual_rms;
  r.warnings = warnings;
  return r;
}

RabiFit fit_rabi(const std::vector<double>& t, const std::vector<double>& y) {
  check_series(t, y, 8, "fit_rabi");
  const int n = static_cast<int>(t.size());
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= n;

  double f0 = 0.0, a0 = 0.0, p0 = 0.0;
  periodogram_seed(t, y, mean, f0, a0, p0);

  auto residual = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    for (int k = 0; k < n; ++k) {
      r(k) = x(0) * std::exp(-x(2) * t[k]) * std::cos(kTwoPi * x(1) * t[k] + x(3)) + x(4) - y[k];
    }
  };
  auto jacobian = [&](const Eigen::VectorXd& x, Eigen::MatrixXd& j) {
    for (int k = 0; k < n; ++k) {
      const double e = std::exp(-x(2) * t[k]);
      const double arg = kTwoPi * x(1) * t[k] + x(3);
      const double c = std::cos(arg), s = std::sin(arg);
      j(k, 0) = e * c;
      j(k, 1) = -x(0) * e * s * kTwoPi * t[k];
      j(k, 2) = -t[k] * x(0) * e * c;
      j(k, 3) = -x(0) * e * s;
      j(k, 4) = 1.0;
    }
  };

  Eigen::VectorXd x0(5);
  x0 << a0, f0, 0.0, p0, mean;
  detail::LsResult ls = detail::least_squares(residual, jacobian, x0, n);
  if (!ls.converged || !ls.x.allFinite()) {
    const double rms = std::sqrt(ls.rss / n);
    throw ConvergenceError(
        fmt::format("fit_rabi: solver stopped (status {}) after {} evaluations, residual rms {:.3g}", ls.status,
                    ls.evaluations, rms),
        rms);
  }

  RabiFit out;
  Eigen::VectorXd x = ls.x;
  Eigen::MatrixXd cov = ls.covariance;
  // Canonical form: positive amplitude and frequency, phase in (-pi, pi].
  if (x(1) < 0.0) {
    x(1) = -x(1);
    x(3) = -x(3);
    cov.row(3) *= -1.0;
    cov.col(3) *= -1.0;
    cov.row(1) *= -1.0;
    cov.col(1) *= -1.0;
  }
  if (x(0) < 0.0) {
    x(0) = -x(0);
    x(3) += std::numbers::pi;
    cov.row(0) *= -1.0;
    cov.col(0) *= -1.0;
  }
  x(3) = std::remainder(x(3), kTwoPi);
  out.amplitude = x(0);
  out.frequency = x(1);
  out.decay = x(2);
  out.phase = x(3);
  out.offset = x(4);
  out.covariance = cov;
  for (int k = 0; k < 5; ++k) out.stderr_(k) = sd(cov, k);
  out.residual_rms = std::sqrt(ls.rss / n);
  if ((t.back() - t.front()) * out.frequency < 1.0) {
    out.warnings.push_back("series spans less than one oscillation period");
  }
  return out;
}

// ---- resurgence -------------------------------------------------------------

FitReport ResurgenceFit::report() const {
  FitReport r;
  r.parameters = {{"f_max", f_max, f_max_stderr},
                  {"t0", t0, t0_stderr},
                  {"tau", tau, tau_stderr},
                  {"t0_plus_tau", recovery_time(), recovery_time_stderr}};
  r.residual_rms = residual_norm;
  r.warnings = warnings;
  r.warnings.push_back(kExponentNote);
  return r;
}

ResurgenceFit fit_resurgence(const std::vector<double>& td, const std::vector<double>& amp) {
  check_series(td, amp, 5, "fit_resurgence");
  const int n = static_cast<int>(td.size());
  const double span = td.back() - td.front();

  // Parameters (F, t0, log tau) keep tau positive.
  auto residual = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    const double tau = std::exp(x(2));
    for (int k = 0; k < n; ++k) {
      const double d = td[k] - x(1);
      r(k) = (d > 0.0 ? x(0) * -std::expm1(-d / tau) : 0.0) - amp[k];
    }
  };
  auto jacobian = [&](const Eigen::VectorXd& x, Eigen::MatrixXd& j) {
    const double tau = std::exp(x(2));
    for (int k = 0; k < n; ++k) {
      const double d = td[k] - x(1);
      if (d > 0.0) {
        const double e = std::exp(-d / tau);
        j(k, 0) = 1.0 - e;
        j(k, 1) = -x(0) * e / tau;
        j(k, 2) = -x(0) * e * d / tau;  // d/dlog(tau)
      } else {
        j.row(k).setZero();
      }
    }
  };

  // Seed: plateau from the largest value, t0 at the origin and tau from the
  // first crossing of 63% of the plateau.
  const double f_seed = *std::max_element(amp.begin(), amp.end());
  double t63 = td.back();
  for (int k = 0; k < n; ++k) {
    if (amp[k] >= 0.632 * f_seed) {
      t63 = td[k];
      break;
    }
  }
  const double t0_seed = std::min(0.0, td.front());
  const double tau_seed = std::max(t63 - t0_seed, 0.05 * span);
  Eigen::VectorXd x0(3);
  x0 << f_seed, t0_seed, std::log(tau_seed);

  detail::LsResult ls = detail::least_squares(residual, jacobian, x0, n);
  ResurgenceFit out;
  out.f_max = ls.x(0);
  out.t0 = ls.x(1);
  out.tau = std::exp(ls.x(2));
  out.residual_norm = std::sqrt(ls.rss);
  const bool collapsed = !(out.tau > 1e-3 * span);
  if (!ls.converged && !collapsed) {
    throw ConvergenceError(fmt::format("fit_resurgence: solver stopped (status {}), residual norm {:.3g}", ls.status,
                                       out.residual_norm),
                           out.residual_norm);
  }
  // Covariance in (F, t0, tau): scale the log row / column by tau.
  Eigen::MatrixXd cov = ls.covariance;
  cov.row(2) *= out.tau;
  cov.col(2) *= out.tau;
  out.f_max_stderr = sd(cov, 0);
  out.t0_stderr = sd(cov, 1);
  out.tau_stderr = sd(cov, 2);
  out.recovery_time_stderr = std::sqrt(std::max(0.0, cov(1, 1) + cov(2, 2) + 2.0 * cov(1, 2)));

  const bool saturated = std::any_of(amp.begin(), amp.end(), [&](double a) { return a >= 0.8 * out.f_max; });
  if (collapsed) {
    out.ill_posed = true;
    out.warnings.push_back(fmt::format("tau collapsed to {:.3g}: data carry no recovery transient", out.tau));
  }
  // A transient finished before the first delay is not constrained by the data.
  const double first = td.front() > out.t0 ? -std::expm1(-(td.front() - out.t0) / out.tau) : 0.0;
  if (!collapsed && first > 0.999) {
    out.ill_posed = true;
    out.warnings.push_back(fmt::format("recovery complete before the first delay (model at {:.4f} F there)", first));
  }
  if (!saturated) {
    out.ill_posed = true;
    out.warnings.push_back("no point reaches 0.8 F: plateau not constrained");
  }
  if (!(out.f_max > 0.0)) {
    out.ill_posed = true;
    out.warnings.push_back("non-positive plateau");
  }
  return out;
}

// ---- recovery model -----------------------------------------------------------

void validate(const PumpRecoveryModel& m) {
  const std::pair<const char*, double> fields[] = {{"n_d", m.n_d},
                                                   {"kappa_mhz", m.kappa_mhz},
                                                   {"t_unconfined_us", m.t_unconfined_us},
                                                   {"dephasing_s", m.dephasing_s},
                                                   {"f_max", m.f_max}};
  for (const auto& [name, v] : fields) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(fmt::format("pump recovery model: {} must be > 0", name));
  }
}

std::vector<double> recovery_amplitude_model(const PumpRecoveryModel& m, const std::vector<double>& tau_d_us) {
  validate(m);
  for (std::size_t k = 0; k < tau_d_us.size(); ++k) {
    if (!(tau_d_us[k] > 0.0) && !(tau_d_us[k] == 0.0)) throw ConfigError("recovery_amplitude_model: negative delay");
    if (k > 0 && !(tau_d_us[k] > tau_d_us[k - 1])) throw ConfigError("recovery_amplitude_model: delays must ascend");
  }
  const double kappa = kTwoPi * m.kappa_mhz;  // 1/us
  std::vector<double> out;
  out.reserve(tau_d_us.size());
  for (double t : tau_d_us) {
    const double confined = -std::expm1(-t / m.t_unconfined_us);
    const double photons = m.n_d * std::exp(-kappa * t);
    out.push_back(m.f_max * confined * std::exp(-m.dephasing_s * photons));
  }
  return out;
}

PumpRecoveryModel tune_recovery_model(PumpRecoveryModel m, const std::vector<double>& tau_d_us,
                                      double target_recovery_us) {
  validate(m);
  if (!(target_recovery_us > 0.0)) throw ConfigError("tune_recovery_model: target must be > 0");
  auto mismatch = [&](double tu) {
    PumpRecoveryModel p = m;
    p.t_unconfined_us = tu;
    return fit_resurgence(tau_d_us, recovery_amplitude_model(p, tau_d_us)).recovery_time() - target_recovery_us;
  };
  double lo = 0.05 * target_recovery_us, hi = 2.0 * target_recovery_us;
  double flo = mismatch(lo), fhi = mismatch(hi);
  if (flo * fhi > 0.0) {
    throw ConvergenceError(
        fmt::format("tune_recovery_model: t0 + tau = {} us not bracketed by t_unconfined in [{}, {}] us",
                    target_recovery_us, lo, hi),
        std::min(std::abs(flo), std::abs(fhi)));
  }
  std::uintmax_t iters = 100;
  auto [a, b] = boost::math::tools::toms748_solve(
      mismatch, lo, hi, flo, fhi, [](double u, double v) { return std::abs(u - v) < 1e-10; }, iters);
  m.t_unconfined_us = 0.5 * (a + b);
  return m;
}

// ---- ac Stark ---------------------------------------------------------------

void validate(const StarkCalibration& c) {
  if (!(c.chi_mhz != 0.0) || !std::isfinite(c.chi_mhz)) throw ConfigError("stark calibration: chi must be nonzero");
  if (!std::isfinite(c.line_attenuation_db)) throw ConfigError("stark calibration: attenuation must be finite");
  if (!(c.omega_c_ghz > 0.0)) throw ConfigError("stark calibration: omega_c must be > 0");
  if (!(c.kappa_mhz > 0.0)) throw ConfigError("stark calibration: kappa must be > 0");
}

StarkCalibration calibrate_stark(double chi_mhz, double omega_c_ghz, double kappa_mhz, double reference_power_dbm,
                                 double reference_nbar) {
  if (!(omega_c_ghz > 0.0) || !(kappa_mhz > 0.0) || !(reference_nbar > 0.0)) {
    throw ConfigError("calibrate_stark: need omega_c > 0, kappa > 0 and reference nbar > 0");
  }
  StarkCalibration c;
  c.chi_mhz = chi_mhz;
  c.omega_c_ghz = omega_c_ghz;
  c.kappa_mhz = kappa_mhz;
  c.reference_power_dbm = reference_power_dbm;
  c.reference_nbar = reference_nbar;
  // nbar = 2 P / (hbar omega kappa) = 2 P / (h f * 2 pi kappa_hz)
  const double p_source = 1e-3 * std::pow(10.0, reference_power_dbm / 10.0);
  const double p_device = reference_nbar * kPlanck * omega_c_ghz * 1e9 * kTwoPi * kappa_mhz * 1e6 / 2.0;
  c.line_attenuation_db = 10.0 * std::log10(p_source / p_device);
  validate(c);
  return c;
}

double photons_from_stark(double shift_mhz, const StarkCalibration& cal) {
  validate(cal);
  const double nbar = shift_mhz / (2.0 * cal.chi_mhz);
  if (nbar < 0.0) {
    throw InconsistentSignError(fmt::format(
        "photons_from_stark: shift {:.4g} MHz points against chi = {:.4g} MHz", shift_mhz, cal.chi_mhz));
  }
  return nbar;
}

double photons_from_power(double power_dbm, const StarkCalibration& cal) {
  validate(cal);
  const double p_device = 1e-3 * std::pow(10.0, (power_dbm - cal.line_attenuation_db) / 10.0);
  return 2.0 * p_device / (kPlanck * cal.omega_c_ghz * 1e9 * kTwoPi * cal.kappa_mhz * 1e6);
}

// ---- Kerr slope -------------------------------------------------------------

FitReport KerrFit::report() const {
  FitReport r;
  r.parameters = {{"alpha_c_khz", alpha_c_khz, alpha_c_stderr_khz}, {"omega0_ghz", omega0_ghz, omega0_stderr_ghz}};
  r.residual_rms = residual_rms_ghz;
  r.warnings = warnings;
  return r;
}

KerrFit fit_kerr_slope(const std::vector<double>& nbar, const std::vector<double>& omega, double noise_sigma) {
  check_series(nbar, omega, 4, "fit_kerr_slope");
  const int n = static_cast<int>(nbar.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (int k = 0; k < n; ++k) {
    a(k, 0) = 1.0;
    a(k, 1) = nbar[k];
    b(k) = omega[k];
  }
  // Centre the frequencies so the intercept does not swamp the slope.
  const double ref = b.mean();
  Eigen::VectorXd bc = b.array() - ref;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::Vector2d x = qr.solve(bc);
  const Eigen::VectorXd r = a * x - bc;
  const double rss = r.squaredNorm();
  const double s2 = n > 2 ? rss / (n - 2) : 0.0;
  const Eigen::Matrix2d cov = s2 * (a.transpose() * a).inverse();

  KerrFit out;
  out.omega0_ghz = ref + x(0);
  out.omega0_stderr_ghz = std::sqrt(cov(0, 0));
  out.alpha_c_khz = -0.5 * x(1) * 1e6;
  out.alpha_c_stderr_khz = 0.5 * std::sqrt(cov(1, 1)) * 1e6;
  out.residual_rms_ghz = std::sqrt(rss / n);

  if (noise_sigma > 0.0) {
    out.noise_estimate_ghz = noise_sigma;
  } else {
    // Second differences of a line are pure noise with variance 6 sigma^2;
    // centring on their median removes a constant curvature.
    std::vector<double> d2;
    for (int k = 1; k + 1 < n; ++k) d2.push_back(omega[k + 1] - 2.0 * omega[k] + omega[k - 1]);
    const double m = median(d2);
    for (double& v : d2) v = std::abs(v - m);
    out.noise_estimate_ghz = 1.4826 * median(d2) / std::sqrt(6.0);
  }
  const double floor = 1e-12 * std::abs(out.omega0_ghz);
  if (out.residual_rms_ghz > 3.0 * out.noise_estimate_ghz && out.residual_rms_ghz > floor) {
    out.nonlinear = true;
    out.warnings.push_back(fmt::format("residual {:.3g} GHz exceeds 3x noise estimate {:.3g} GHz: points past the "
                                       "linear regime?",
                                       out.residual_rms_ghz, out.noise_estimate_ghz));
  }
  return out;
}

}  // namespace cqed::readout
