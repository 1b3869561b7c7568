#include "cqed/readout/vh.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <fmt/format.h>

#include "cqed/error.hpp"

namespace cqed::readout {

namespace {

void check_grids(const SignalTrace& a, const SignalTrace& b, const char* name) {
  validate(b);
  if (a.size() != b.size() || a.dt_ns != b.dt_ns || a.t0_ns != b.t0_ns) {
    throw ConfigError(fmt::format("v_h: {} grid differs from V_g", name));
  }
}

double max_abs(const SignalTrace& t) {
  double m = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) m = std::max({m, std::abs(t.i[k]), std::abs(t.q[k])});
  return m;
}

}  // namespace

VhResult v_h_detail(const SignalTrace& vg, const SignalTrace& vs, const SignalTrace& vm, const VhOptions& opt) {
  validate(vg);
  check_grids(vg, vs, "V_s");
  check_grids(vg, vm, "V_m");
  if (vg.size() == 0) throw ConfigError("v_h: empty traces");

  double num_i = 0.0, num_q = 0.0, den_i = 0.0, den_q = 0.0;
  for (std::size_t k = 0; k < vg.size(); ++k) {
    num_i += vg.i[k] - vm.i[k];
    num_q += vg.q[k] - vm.q[k];
    den_i += vg.i[k] - vs.i[k];
    den_q += vg.q[k] - vs.q[k];
  }
  const double dt = vg.dt_ns;
  num_i *= dt;
  num_q *= dt;
  den_i *= dt;
  den_q *= dt;

  VhResult r;
  double num = 0.0;
  if (opt.vector_projection) {
    const std::complex<double> dir = std::complex<double>(den_i, den_q);
    const double norm = std::abs(dir);
    r.quadrature = Quadrature::projection;
    if (norm > 0.0) {
      const std::complex<double> u = std::conj(dir) / norm;
      num = (u * std::complex<double>(num_i, num_q)).real();
      r.denominator = norm;
    }
  } else if (std::abs(den_q) > std::abs(den_i)) {
    r.quadrature = Quadrature::q;
    num = num_q;
    r.denominator = den_q;
  } else {
    r.quadrature = Quadrature::i;
    num = num_i;
    r.denominator = den_i;
  }

  const double floor = opt.noise_floor > 0.0 ? opt.noise_floor : 1e-12 * max_abs(vg);
  const double threshold = floor * static_cast<double>(vg.size()) * dt;
  if (!(std::abs(r.denominator) > threshold)) {
    throw DegenerateNormalizationError(
        fmt::format("v_h: normalization integral {:.3g} below noise floor {:.3g}", r.denominator, threshold));
  }
  r.value = 0.5 * num / r.denominator;
  return r;
}

double v_h(const SignalTrace& vg, const SignalTrace& vs, const SignalTrace& vm, const VhOptions& opt) {
  return v_h_detail(vg, vs, vm, opt).value;
}

}  // namespace cqed::readout
