#include "cqed/pulse/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "cqed/error.hpp"

namespace cqed::pulse {

namespace {

double stage_pole(const LineFilter& f, double dt) { return std::exp(-dt / f.stage_tau_ns()); }

}  // namespace

double Waveform::at(double t) const {
  if (values.empty()) return 0.0;
  const double x = (t - t0_ns) / dt_ns;
  if (x <= 0.0) return values.front();
  const auto k = static_cast<std::size_t>(x);
  if (k + 1 >= values.size()) return values.back();
  const double frac = x - static_cast<double>(k);
  return values[k] + frac * (values[k + 1] - values[k]);
}

double LineFilter::stage_tau_ns() const {
  // Cascade of n identical poles: |H|^2 = (1 + (w tau)^2)^-n = 1/2 at f3db.
  const double f_ghz = f3db_mhz * 1e-3;
  return std::sqrt(std::pow(2.0, 1.0 / order) - 1.0) / (2.0 * std::numbers::pi * f_ghz);
}

void validate(const LineFilter& f) {
  if (!(f.f3db_mhz > 0.0)) throw ConfigError("LineFilter: f3db must be > 0");
  if (f.order < 1) throw ConfigError("LineFilter: order must be >= 1");
}

double max_filter_dt_ns(const LineFilter& f) { return 0.05 / (f.f3db_mhz * 1e-3); }

Waveform apply_line_filter(const Waveform& input, const LineFilter& f) {
  validate(f);
  if (input.dt_ns > max_filter_dt_ns(f) * (1.0 + 1e-12)) {
    throw SamplingTooCoarseError(fmt::format("apply_line_filter: dt = {} ns exceeds 0.05 / f3db = {} ns",
                                             input.dt_ns, max_filter_dt_ns(f)));
  }
  Waveform out = input;
  if (out.values.empty()) return out;
  const double a = stage_pole(f, input.dt_ns);
  const double b = 1.0 - a;
  for (int stage = 0; stage < f.order; ++stage) {
    double y = out.values.front();
    for (double& v : out.values) {
      y = a * y + b * v;
      v = y;
    }
  }
  return out;
}

Precompensation precompensate(const Waveform& target, const LineFilter& f, double clamp) {
  validate(f);
  Precompensation res;
  res.waveform = target;
  auto& w = res.waveform.values;
  if (w.empty()) return res;
  double peak = 0.0;
  for (double v : target.values) peak = std::max(peak, std::abs(v));
  if (!(clamp > peak)) throw ConfigError("precompensate: clamp must exceed max |target|");

  const double a = stage_pole(f, target.dt_ns);
  const double b = 1.0 - a;
  for (int stage = 0; stage < f.order; ++stage) {
    double prev = w.front();
    for (double& v : w) {
      const double y = v;
      v = (y - a * prev) / b;
      prev = y;
    }
  }
  for (double& v : w) {
    if (std::abs(v) > clamp) {
      v = std::copysign(clamp, v);
      ++res.clamped_samples;
    }
  }

  Waveform check = res.waveform;
  {
    // Same recurrence as apply_line_filter without the sampling precondition.
    for (int stage = 0; stage < f.order; ++stage) {
      double y = check.values.front();
      for (double& v : check.values) {
        y = a * y + b * v;
        v = y;
      }
    }
  }
  for (std::size_t k = 0; k < w.size(); ++k) {
    res.residual = std::max(res.residual, std::abs(check.values[k] - target.values[k]));
  }
  if (res.clamped_samples > 0) {
    res.warnings.push_back(fmt::format("clamp {} binds on {} samples; worst residual {:.4g}", clamp,
                                       res.clamped_samples, res.residual));
  }
  return res;
}

void write_waveform_csv(std::ostream& os, const Waveform& w) {
  os << "t_ns,value\n";
  for (std::size_t k = 0; k < w.values.size(); ++k) {
    os << fmt::format("{:.10g},{:.12g}\n", w.time(k), w.values[k]);
  }
}

}  // namespace cqed::pulse
