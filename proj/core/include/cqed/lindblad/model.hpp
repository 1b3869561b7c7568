#pragma once

#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "cqed/device.hpp"
#include "cqed/lindblad/space.hpp"

namespace cqed::lindblad {

enum class Frame {
  lab,
  rotating,  // both modes rotate at the bare cavity frequency
};

// Cubic-spline lookup of the ground-referenced transmon levels over the
// folded flux interval [0, 1/2].
class TransmonLookup {
 public:
  static constexpr int kDefaultPoints = 2001;

  TransmonLookup(const TransmonParams& p, int n_levels, int n_points = kDefaultPoints);

  int n_levels() const { return n_levels_; }
  // Level q (q >= 1) at any reduced flux; level 0 is identically zero.
  double level(int q, double phi_ratio) const;
  // Largest |spline - exact| over n_audit flux points placed between knots, in kHz.
  double audit_max_error_khz(int n_audit = 50) const;

 private:
  TransmonParams p_;
  int n_levels_;
  std::vector<boost::math::interpolators::cardinal_cubic_b_spline<double>> splines_;
};

// Precomputed operators and lookup for time-dependent evolution. Coupling and
// ladder ratios are frozen at the reference flux; flux only moves the
// transmon diagonal.
class SystemModel {
 public:
  SystemModel(const DeviceModel& dev, const HilbertSpace& space, FluxBias reference = {});

  const DeviceModel& device() const { return dev_; }
  const HilbertSpace& space() const { return space_; }
  FluxBias reference() const { return reference_; }
  double frame_ghz() const { return dev_.cavity.omega_bare_ghz; }
  const TransmonLookup& lookup() const { return lookup_; }

  // Diagonal of H in GHz (transmon levels + cavity term in the chosen frame).
  Eigen::VectorXd diagonal(double phi_ratio, Frame frame = Frame::rotating) const;
  // Excitation-conserving coupling in GHz, real symmetric.
  const Eigen::MatrixXd& coupling() const { return coupling_; }
  Operator hamiltonian(double phi_ratio, Frame frame = Frame::rotating) const;

  const Operator& a() const { return a_; }
  const Operator& b() const { return b_; }
  // sqrt(kappa) a, sqrt(1/T1) b, sqrt(2 gamma_phi) b^dag b in 1/ns; zero-rate
  // channels are dropped.
  const std::vector<Operator>& collapse() const { return collapse_; }

  // Dressed eigenstates at the flux, labeled by maximum bare overlap.
  struct Dressed {
    Eigen::VectorXd energies_ghz;  // rotating frame
    std::vector<Vector> states;
    std::vector<int> q, n;         // bare labels
    Vector state(int q, int n) const;
  };
  Dressed dressed(double phi_ratio) const;
  // Sum over n of |q~, n><q~, n| in the dressed basis at the flux.
  Operator dressed_transmon_projector(int q, double phi_ratio) const;

 private:
  DeviceModel dev_;
  HilbertSpace space_;
  FluxBias reference_;
  TransmonLookup lookup_;
  Eigen::MatrixXd coupling_;
  Operator a_, b_;
  std::vector<Operator> collapse_;
};

// H(Phi) / h in GHz, built by direct diagonalization at the flux.
Operator build_hamiltonian(const DeviceModel& dev, const HilbertSpace& space, FluxBias flux,
                           Frame frame = Frame::lab);

}  // namespace cqed::lindblad
