#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cqed::lindblad {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr int kDefaultMaxDimension = 256;

// Transmon levels x cavity Fock states; product index q * n_c + n.
struct HilbertSpace {
  int n_q = 3;
  int n_c = 5;
  int max_dim = kDefaultMaxDimension;

  int dim() const { return n_q * n_c; }
  int index(int q, int n) const { return q * n_c + n; }
};

// Throws ConfigError for n_q < 2, n_c < 2 or dim > max_dim.
void validate(const HilbertSpace& s);

enum class OperatorRole { a, a_dag, b, b_dag, number, hamiltonian, collapse, custom };

const char* role_name(OperatorRole r);

struct Operator {
  Matrix m;
  OperatorRole role = OperatorRole::custom;
  std::string name;
};

// Dimension must match; hamiltonian and number operators must be hermitian
// within 1e-12 of their largest element.
void check(const Operator& op, const HilbertSpace& s);

Operator annihilation_a(const HilbertSpace& s);
// Transmon lowering with ladder elements ratios[q] between q+1 and q; empty
// ratios give the harmonic sqrt(q + 1).
Operator lowering_b(const HilbertSpace& s, const std::vector<double>& ratios = {});
Operator adjoint(const Operator& op);
Operator photon_number(const HilbertSpace& s);
Operator transmon_number(const HilbertSpace& s);
// |q><q| (x) 1
Operator transmon_projector(const HilbertSpace& s, int q);
// |psi><psi| summed over the given states.
Operator projector(const std::vector<Vector>& states, const std::string& name);

class DensityMatrix {
 public:
  DensityMatrix() = default;
  DensityMatrix(Matrix rho, double t_ns);

  static DensityMatrix pure(const Vector& psi, double t_ns = 0.0);
  static DensityMatrix basis(const HilbertSpace& s, int q, int n, double t_ns = 0.0);

  const Matrix& rho() const { return rho_; }
  Matrix& rho() { return rho_; }
  double time_ns() const { return t_ns_; }
  void set_time(double t) { t_ns_ = t; }
  int dim() const { return static_cast<int>(rho_.rows()); }

  double trace_error() const;        // |Tr rho - 1|
  double hermiticity_error() const;  // max |rho - rho^dag|
  double min_eigenvalue() const;
  double purity() const;
  double expectation(const Operator& op) const;  // Re Tr(O rho)

  // Throws NumericError unless hermitian within 1e-10, trace 1 within 1e-8
  // and min eigenvalue >= -1e-8.
  void check() const;

 private:
  Matrix rho_;
  double t_ns_ = 0.0;
};

// Row-major complex matrix, one row per line, entries as re,im pairs.
void write_complex_matrix(std::ostream& os, const Matrix& m);
Matrix read_complex_matrix(std::istream& is);

}  // namespace cqed::lindblad
