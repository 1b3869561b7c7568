#include "cqed/pulse/shapes.hpp"

#include <cmath>
#include <numbers>

#include "cqed/error.hpp"

namespace cqed::pulse {

namespace {

double gauss(double x, double sigma) { return std::exp(-0.5 * (x / sigma) * (x / sigma)); }

}  // namespace

double FluxPulse::edge_span_ns() const { return kFluxEdgeSigmas * edge_sigma_ns; }

void validate(const GaussEdgeRect& p) {
  if (!(p.edge_sigma_ns > 0.0)) throw ConfigError("GaussEdgeRect: edge_sigma must be > 0");
  if (p.edge_length_ns < 0.0 || 2.0 * p.edge_length_ns > p.length_total_ns) {
    throw ConfigError("GaussEdgeRect: need 0 <= 2 * edge_length <= length_total");
  }
}

void validate(const FluxPulse& p) {
  if (!(p.edge_sigma_ns > 0.0)) throw ConfigError("FluxPulse: edge_sigma must be > 0");
  if (p.plateau_length_ns < 0.0) throw ConfigError("FluxPulse: plateau_length must be >= 0");
}

double sample_envelope(const GaussEdgeRect& p, double t) {
  if (t < 0.0 || t > p.length_total_ns) return 0.0;
  const double fall_start = p.length_total_ns - p.edge_length_ns;
  if (t < p.edge_length_ns) return p.amplitude * gauss(t - p.edge_length_ns, p.edge_sigma_ns);
  if (t > fall_start) return p.amplitude * gauss(t - fall_start, p.edge_sigma_ns);
  return p.amplitude;
}

double sample_envelope(const FluxPulse& p, double t) {
  const double base = p.baseline.phi_ratio;
  const double span = p.edge_span_ns();
  const double fall_start = span + p.plateau_length_ns;
  if (t < 0.0 || t > fall_start + span) return base;
  if (t < span) return base + p.amplitude * gauss(t - span, p.edge_sigma_ns);
  if (t > fall_start) return base + p.amplitude * gauss(t - fall_start, p.edge_sigma_ns);
  return base + p.amplitude;
}

double envelope_area(const GaussEdgeRect& p) {
  // Each edge is the half-Gaussian integral over [0, edge_length].
  const double s = p.edge_sigma_ns;
  const double edge = s * std::sqrt(std::numbers::pi / 2.0) * std::erf(p.edge_length_ns / (s * std::numbers::sqrt2));
  return p.amplitude * (p.plateau_ns() + 2.0 * edge);
}

double duration_ns(const Shape& s) {
  return std::visit(
      [](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, GaussEdgeRect>) {
          return x.length_total_ns;
        } else if constexpr (std::is_same_v<T, FluxPulse>) {
          return x.length_total_ns();
        } else {
          return x.duration_ns;
        }
      },
      s);
}

}  // namespace cqed::pulse
