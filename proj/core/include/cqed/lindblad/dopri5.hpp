#pragma once
// Dormand-Prince 5(4) with FSAL and a proportional step controller, for
// complex matrix states (density matrices or column state vectors).

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "cqed/error.hpp"
#include "cqed/lindblad/space.hpp"

namespace cqed::lindblad {

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
};

// Rhs: void(double t, const Matrix& y, Matrix& dydt)
template <class Rhs>
class Dopri5 {
 public:
  Dopri5(Rhs rhs, double tol) : rhs_(std::move(rhs)), tol_(tol) {}

  const StepStats& stats() const { return stats_; }
  void set_step(double h) { h_ = h; }

  // Advances y from t to t_end exactly. The right-hand side must be smooth on
  // (t, t_end); callers split the interval at breakpoints. Throws
  // StepFailureError when the step would fall below the floor.
  void advance(double& t, Matrix& y, double t_end, double max_step) {
    if (!(t_end > t)) return;
    const double span = t_end - t;
    double h = h_ > 0.0 ? std::min({h_, max_step, span}) : std::min(max_step, span) * 0.1;
    eval(t, y, k1_);
    while (t < t_end) {
      const double remaining = t_end - t;
      const double floor = 1e-12 * std::max(1.0, std::abs(t));
      bool last = false;
      // Never leave a sliver shorter than the floor before t_end.
      if (h >= remaining - 2.0 * floor) {
        h = remaining;
        last = true;
      }
      if (h < floor && !last) {
        throw StepFailureError(fmt::format("integrator step {:.3g} ns below floor at t = {:.6g} ns", h, t));
      }
      try_step(t, y, h);
      const double err = error_norm(y);
      if (err <= 1.0) {
        ++stats_.accepted;
        t = last ? t_end : t + h;
        y.swap(y5_);
        k1_.swap(k7_);  // FSAL
        const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        const double proposal = std::min(h * fac, max_step);
        // A truncated final step says little about the next interval.
        if (!last || h_ <= 0.0) h_ = proposal;
        if (last) break;
        h = proposal;
      } else {
        ++stats_.rejected;
        h *= std::clamp(0.9 * std::pow(err, -0.25), 0.1, 0.5);
      }
    }
  }

 private:
  void eval(double t, const Matrix& y, Matrix& out) {
    rhs_(t, y, out);
    ++stats_.rhs_evals;
  }

  void try_step(double t, const Matrix& y, double h) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    tmp_ = y + (h * a21) * k1_;
    eval(t + c2 * h, tmp_, k2_);
    tmp_ = y + h * (a31 * k1_ + a32 * k2_);
    eval(t + c3 * h, tmp_, k3_);
    tmp_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    eval(t + c4 * h, tmp_, k4_);
    tmp_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    eval(t + c5 * h, tmp_, k5_);
    tmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    eval(t + h, tmp_, k6_);
    y5_ = y + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
    eval(t + h, y5_, k7_);
    err_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
  }

  // Max-norm of the embedded error against mixed absolute / relative scale.
  double error_norm(const Matrix& y) const {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double scale = tol_ + tol_ * std::max(std::abs(y(i)), std::abs(y5_(i)));
      worst = std::max(worst, std::abs(err_(i)) / scale);
    }
    return worst;
  }

  Rhs rhs_;
  double tol_;
  double h_ = 0.0;
  StepStats stats_;
  Matrix k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y5_, err_;
};

}  // namespace cqed::lindblad
