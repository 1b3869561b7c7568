#pragma once

// Fits and calibrations on readout-derived series.

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cqed::readout {

struct FitParameter {
  std::string name;
  double value = 0.0;
  double stderr_ = 0.0;
};

struct FitReport {
  std::vector<FitParameter> parameters;
  double residual_rms = 0.0;
  std::vector<std::string> warnings;
};

// Rows "parameter,value,stderr", then residual_rms and one warning row each.
void write_fit_report(std::ostream& os, const FitReport& r);

// A exp(-t * decay) cos(2 pi f t + phi) + c. Units follow the time axis:
// t in ns gives frequency in GHz and decay in 1/ns.
struct RabiFit {
  double amplitude = 0.0;
  double frequency = 0.0;
  double decay = 0.0;  // 1 / tau_r; zero means undamped
  double phase = 0.0;
  double offset = 0.0;
  Eigen::Matrix<double, 5, 1> stderr_ = Eigen::Matrix<double, 5, 1>::Zero();
  Eigen::Matrix<double, 5, 5> covariance = Eigen::Matrix<double, 5, 5>::Zero();  // (A, f, decay, phi, c)
  double residual_rms = 0.0;
  std::vector<std::string> warnings;

  double tau() const;  // infinity when decay <= 0
  FitReport report() const;
};

// Seeds frequency and phase from a periodogram peak. Throws ConfigError for
// fewer than 8 points or a non-increasing time axis, ConvergenceError with
// the residual when the solver gives up.
RabiFit fit_rabi(const std::vector<double>& t, const std::vector<double>& y);

// F (1 - exp(-(t - t0) / tau)) for t >= t0, zero before. The printed form
// with a growing exponential cannot saturate; the decaying sign is used.
struct ResurgenceFit {
  double f_max = 0.0;
  double t0 = 0.0;   // same unit as the delay axis
  double tau = 0.0;
  double f_max_stderr = 0.0;
  double t0_stderr = 0.0;
  double tau_stderr = 0.0;
  double recovery_time_stderr = 0.0;
  double residual_norm = 0.0;
  bool ill_posed = false;
  std::vector<std::string> warnings;

  double recovery_time() const { return t0 + tau; }
  FitReport report() const;
  static constexpr const char* kExponentNote =
      "fit form F*(1 - exp(-(t - t0)/tau)); decaying sign used in place of the printed growing exponent";
};

// Throws ConfigError for fewer than 5 points; flags ill_posed when no point
// reaches 0.8 F or tau collapses to a step.
ResurgenceFit fit_resurgence(const std::vector<double>& tau_d, const std::vector<double>& amplitude);

struct PumpRecoveryModel {
  double n_d = 2.1e4;          // steady-state pump photons
  double kappa_mhz = 1.38;     // kappa / 2pi
  double t_unconfined_us = 4.8;
  double dephasing_s = 1e-3;   // per photon
  double f_max = 1.0;
};

// Throws ConfigError on non-positive parameters.
void validate(const PumpRecoveryModel& m);

// f_max (1 - exp(-tau_d / t_unconfined)) exp(-s n_d exp(-kappa tau_d)),
// tau_d in us; kappa enters as the angular photon decay rate.
std::vector<double> recovery_amplitude_model(const PumpRecoveryModel& m, const std::vector<double>& tau_d_us);

// Finds t_unconfined so that fit_resurgence on the noiseless model sampled at
// tau_d_us gives the requested t0 + tau.
PumpRecoveryModel tune_recovery_model(PumpRecoveryModel m, const std::vector<double>& tau_d_us,
                                      double target_recovery_us);

struct StarkCalibration {
  double chi_mhz = 0.0;
  double omega_c_ghz = 0.0;
  double kappa_mhz = 0.0;
  double line_attenuation_db = 0.0;  // source to device
  double reference_power_dbm = 0.0;
  double reference_nbar = 0.0;
};

// Solves the attenuation that maps reference_power_dbm to reference_nbar for
// a resonant drive through a symmetric cavity, nbar = 2 P / (hbar omega kappa).
StarkCalibration calibrate_stark(double chi_mhz, double omega_c_ghz, double kappa_mhz, double reference_power_dbm,
                                 double reference_nbar);

void validate(const StarkCalibration& c);

// nbar = shift / (2 chi). Throws InconsistentSignError when the shift
// points against chi.
double photons_from_stark(double qubit_shift_mhz, const StarkCalibration& cal);

double photons_from_power(double power_dbm, const StarkCalibration& cal);

// omega_c(nbar) = omega_c(0) - 2 alpha_c nbar. Frequencies in GHz.
struct KerrFit {
  double alpha_c_khz = 0.0;
  double alpha_c_stderr_khz = 0.0;
  double omega0_ghz = 0.0;
  double omega0_stderr_ghz = 0.0;
  double residual_rms_ghz = 0.0;
  double noise_estimate_ghz = 0.0;
  bool nonlinear = false;
  std::vector<std::string> warnings;

  FitReport report() const;
};

// noise_sigma_ghz <= 0 estimates the noise from second differences.
KerrFit fit_kerr_slope(const std::vector<double>& nbar, const std::vector<double>& omega_ghz,
                       double noise_sigma_ghz = 0.0);

}  // namespace cqed::readout
