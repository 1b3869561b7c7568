#include "cqed/lindblad/space.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "cqed/error.hpp"

namespace cqed::lindblad {

void validate(const HilbertSpace& s) {
  if (s.n_q < 2) throw ConfigError("HilbertSpace: n_q must be >= 2");
  if (s.n_c < 2) throw ConfigError("HilbertSpace: n_c must be >= 2");
  if (s.dim() > s.max_dim) {
    throw ConfigError(fmt::format("HilbertSpace: dimension {} exceeds maximum {}", s.dim(), s.max_dim));
  }
}

const char* role_name(OperatorRole r) {
  switch (r) {
    case OperatorRole::a: return "a";
    case OperatorRole::a_dag: return "a_dag";
    case OperatorRole::b: return "b";
    case OperatorRole::b_dag: return "b_dag";
    case OperatorRole::number: return "number";
    case OperatorRole::hamiltonian: return "hamiltonian";
    case OperatorRole::collapse: return "collapse";
    case OperatorRole::custom: return "custom";
  }
  return "?";
}

void check(const Operator& op, const HilbertSpace& s) {
  if (op.m.rows() != s.dim() || op.m.cols() != s.dim()) {
    throw NumericError(fmt::format("operator '{}' has dimension {}x{}, space has {}", op.name, op.m.rows(),
                                   op.m.cols(), s.dim()));
  }
  if (op.role == OperatorRole::hamiltonian || op.role == OperatorRole::number) {
    const double scale = std::max(op.m.cwiseAbs().maxCoeff(), 1e-300);
    const double err = (op.m - op.m.adjoint()).cwiseAbs().maxCoeff();
    if (err > 1e-12 * scale) {
      throw NumericError(fmt::format("operator '{}' ({}) is not hermitian: {:.3g}", op.name, role_name(op.role), err));
    }
  }
}

Operator annihilation_a(const HilbertSpace& s) {
  Operator op{Matrix::Zero(s.dim(), s.dim()), OperatorRole::a, "a"};
  for (int q = 0; q < s.n_q; ++q) {
    for (int n = 1; n < s.n_c; ++n) op.m(s.index(q, n - 1), s.index(q, n)) = std::sqrt(static_cast<double>(n));
  }
  return op;
}

Operator lowering_b(const HilbertSpace& s, const std::vector<double>& ratios) {
  Operator op{Matrix::Zero(s.dim(), s.dim()), OperatorRole::b, "b"};
  for (int q = 0; q + 1 < s.n_q; ++q) {
    const double r = ratios.empty() ? std::sqrt(q + 1.0) : ratios.at(q);
    for (int n = 0; n < s.n_c; ++n) op.m(s.index(q, n), s.index(q + 1, n)) = r;
  }
  return op;
}

Operator adjoint(const Operator& op) {
  OperatorRole r = op.role;
  if (r == OperatorRole::a) r = OperatorRole::a_dag;
  else if (r == OperatorRole::a_dag) r = OperatorRole::a;
  else if (r == OperatorRole::b) r = OperatorRole::b_dag;
  else if (r == OperatorRole::b_dag) r = OperatorRole::b;
  return {op.m.adjoint(), r, op.name + "_dag"};
}

Operator photon_number(const HilbertSpace& s) {
  Operator op{Matrix::Zero(s.dim(), s.dim()), OperatorRole::number, "n_cavity"};
  for (int q = 0; q < s.n_q; ++q) {
    for (int n = 0; n < s.n_c; ++n) op.m(s.index(q, n), s.index(q, n)) = n;
  }
  return op;
}

Operator transmon_number(const HilbertSpace& s) {
  Operator op{Matrix::Zero(s.dim(), s.dim()), OperatorRole::number, "n_transmon"};
  for (int q = 0; q < s.n_q; ++q) {
    for (int n = 0; n < s.n_c; ++n) op.m(s.index(q, n), s.index(q, n)) = q;
  }
  return op;
}

Operator transmon_projector(const HilbertSpace& s, int q) {
  Operator op{Matrix::Zero(s.dim(), s.dim()), OperatorRole::custom, fmt::format("P_q{}", q)};
  for (int n = 0; n < s.n_c; ++n) op.m(s.index(q, n), s.index(q, n)) = 1.0;
  return op;
}

Operator projector(const std::vector<Vector>& states, const std::string& name) {
  if (states.empty()) throw NumericError("projector: no states");
  const auto d = states.front().size();
  Operator op{Matrix::Zero(d, d), OperatorRole::custom, name};
  for (const auto& v : states) op.m += v * v.adjoint();
  return op;
}

DensityMatrix::DensityMatrix(Matrix rho, double t_ns) : rho_(std::move(rho)), t_ns_(t_ns) {
  if (rho_.rows() != rho_.cols()) throw NumericError("DensityMatrix: matrix must be square");
}

DensityMatrix DensityMatrix::pure(const Vector& psi, double t_ns) {
  Vector v = psi / psi.norm();
  return DensityMatrix(v * v.adjoint(), t_ns);
}

DensityMatrix DensityMatrix::basis(const HilbertSpace& s, int q, int n, double t_ns) {
  Vector v = Vector::Zero(s.dim());
  v(s.index(q, n)) = 1.0;
  return pure(v, t_ns);
}

double DensityMatrix::trace_error() const { return std::abs(rho_.trace() - cplx(1.0, 0.0)); }

double DensityMatrix::hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho_ + rho_.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

double DensityMatrix::expectation(const Operator& op) const { return (op.m * rho_).trace().real(); }

void DensityMatrix::check() const {
  if (hermiticity_error() > 1e-10) throw NumericError(fmt::format("density matrix not hermitian: {:.3g}", hermiticity_error()));
  if (trace_error() > 1e-8) throw NumericError(fmt::format("density matrix trace off by {:.3g}", trace_error()));
  if (min_eigenvalue() < -1e-8) throw PositivityError(fmt::format("density matrix eigenvalue {:.3g}", min_eigenvalue()));
}

void write_complex_matrix(std::ostream& os, const Matrix& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << fmt::format("{:.17g},{:.17g}", m(i, j).real(), m(i, j).imag());
    }
    os << '\n';
  }
}

Matrix read_complex_matrix(std::istream& is) {
  Eigen::Index rows = 0, cols = 0;
  if (!(is >> rows >> cols) || rows < 0 || cols < 0) throw IoError("complex matrix: bad header");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      std::string tok;
      if (!(is >> tok)) throw IoError("complex matrix: truncated");
      const auto comma = tok.find(',');
      if (comma == std::string::npos) throw IoError("complex matrix: expected re,im");
      m(i, j) = cplx(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
    }
  }
  return m;
}

}  // namespace cqed::lindblad
