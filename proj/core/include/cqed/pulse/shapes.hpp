#pragma once

#include <variant>

#include "cqed/device.hpp"

namespace cqed::pulse {

// Rectangular pulse with Gaussian rise and fall of edge_length each.
// As a drive, amplitude is the Rabi frequency in MHz.
struct GaussEdgeRect {
  double length_total_ns = 0.0;
  double edge_length_ns = 0.0;
  double edge_sigma_ns = 1.0;
  double amplitude = 0.0;
  double carrier_freq_ghz = 0.0;
  double phase_rad = 0.0;

  double plateau_ns() const { return length_total_ns - 2.0 * edge_length_ns; }
};

// Flux step with half-Gaussian rise/fall; each edge spans kFluxEdgeSigmas sigma.
struct FluxPulse {
  double plateau_length_ns = 0.0;
  double edge_sigma_ns = 1.1;
  double amplitude = 0.0;  // reduced-flux step
  FluxBias baseline;

  double edge_span_ns() const;
  double length_total_ns() const { return plateau_length_ns + 2.0 * edge_span_ns(); }
};

inline constexpr double kFluxEdgeSigmas = 4.0;

// Strong cavity pump. Carries metadata only at this layer.
struct PumpPulse {
  double duration_ns = 0.0;
  double freq_ghz = 0.0;
  double photons = 0.0;  // steady-state occupation n_d
};

struct MeasurePulse {
  double duration_ns = 0.0;
  double freq_ghz = 0.0;
  double nbar = 0.0;
};

using Shape = std::variant<PumpPulse, GaussEdgeRect, FluxPulse, MeasurePulse>;

void validate(const GaussEdgeRect& p);
void validate(const FluxPulse& p);

// Envelope at time t measured from the pulse start; zero outside the support.
double sample_envelope(const GaussEdgeRect& p, double t_ns);

// Flux at time t from the pulse start; baseline outside the support.
double sample_envelope(const FluxPulse& p, double t_ns);

// Integral of the GaussEdgeRect envelope in amplitude * ns.
double envelope_area(const GaussEdgeRect& p);

double duration_ns(const Shape& s);

}  // namespace cqed::pulse
