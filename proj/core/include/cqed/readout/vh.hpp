#pragma once

#include "cqed/readout/trace.hpp"

namespace cqed::readout {

enum class Quadrature { i, q, projection };

struct VhOptions {
  // Project both quadratures on the integrated V_g - V_s direction instead
  // of picking the single quadrature with the larger contrast.
  bool vector_projection = false;
  // Per-sample noise floor. The denominator integral must exceed
  // noise_floor * N * dt. Zero falls back to 1e-12 of the largest sample.
  double noise_floor = 0.0;
};

struct VhResult {
  double value = 0.0;
  Quadrature quadrature = Quadrature::i;
  double denominator = 0.0;  // integral of V_g - V_s on the chosen axis
};

// V_H = 1/2 * sum (V_g - V_m) dt / sum (V_g - V_s) dt.
VhResult v_h_detail(const SignalTrace& vg, const SignalTrace& vs, const SignalTrace& vm, const VhOptions& opt = {});
double v_h(const SignalTrace& vg, const SignalTrace& vs, const SignalTrace& vm, const VhOptions& opt = {});

}  // namespace cqed::readout
