#pragma once
// Internal Levenberg-Marquardt wrapper over Eigen's unsupported solver.

#include <functional>

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>

namespace cqed::readout::detail {

using Residual = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r)>;
using Jacobian = std::function<void(const Eigen::VectorXd& x, Eigen::MatrixXd& j)>;

struct LsResult {
  Eigen::VectorXd x;
  Eigen::MatrixXd covariance;  // s^2 (J^T J)^+ at the solution
  double rss = 0.0;
  long evaluations = 0;
  int status = 0;
  bool converged = false;
};

inline LsResult least_squares(const Residual& res, const Jacobian& jac, Eigen::VectorXd x0, int n_values,
                              double tol = 1e-12, long max_evaluations = 4000) {
  struct Functor : Eigen::DenseFunctor<double> {
    Functor(const Residual& r, const Jacobian& j, int inputs, int values)
        : Eigen::DenseFunctor<double>(inputs, values), r_(r), j_(j) {}
    int operator()(const InputType& x, ValueType& f) const {
      r_(x, f);
      return 0;
    }
    int df(const InputType& x, JacobianType& fj) const {
      j_(x, fj);
      return 0;
    }
    const Residual& r_;
    const Jacobian& j_;
  };

  Functor f(res, jac, static_cast<int>(x0.size()), n_values);
  Eigen::LevenbergMarquardt<Functor> lm(f);
  lm.setXtol(tol);
  lm.setFtol(tol);
  lm.setGtol(0.0);
  lm.setMaxfev(max_evaluations);
  const auto status = lm.minimize(x0);

  LsResult out;
  out.x = x0;
  out.status = static_cast<int>(status);
  out.evaluations = static_cast<long>(lm.nfev());
  using S = Eigen::LevenbergMarquardtSpace::Status;
  out.converged = status != S::ImproperInputParameters && status != S::TooManyFunctionEvaluation &&
                  status != S::UserAsked;

  Eigen::VectorXd r(n_values);
  res(out.x, r);
  out.rss = r.squaredNorm();
  Eigen::MatrixXd j(n_values, x0.size());
  jac(out.x, j);
  const long dof = n_values - static_cast<long>(x0.size());
  const double s2 = dof > 0 ? out.rss / static_cast<double>(dof) : 0.0;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(j.transpose() * j);
  out.covariance = s2 * cod.pseudoInverse();
  return out;
}

}  // namespace cqed::readout::detail
