#include "vibshape/shaper.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "vibshape/error.hpp"

namespace vibshape {

namespace {

// Fractional sample positions this close to an integer are read exactly.
constexpr double kSnap = 1e-9;

[[noreturn]] void input_error(const std::string& what) {
  throw Error(ErrorCode::Input, what);
}

}  // namespace

void ShaperParams::validate() const {
  if (!std::isfinite(t0) || t0 <= 0.0) {
    throw Error(ErrorCode::ParameterDomain,
                "shaper delay t0 must be positive, got " + std::to_string(t0));
  }
  if (!std::isfinite(k0) || k0 <= 0.0 || k0 > 1.0) {
    throw Error(ErrorCode::ParameterDomain,
                "damping factor k0 must lie in (0, 1], got " + std::to_string(k0));
  }
}

ImpulseSequence::ImpulseSequence() : impulses_{{1.0, 0.0}} {}

ImpulseSequence::ImpulseSequence(std::vector<Impulse> impulses)
    : impulses_(std::move(impulses)) {
  if (impulses_.empty()) input_error("impulse sequence is empty");
  if (impulses_.front().time != 0.0) input_error("first impulse must be at t = 0");
  double sum = 0.0;
  for (std::size_t i = 0; i < impulses_.size(); ++i) {
    const auto& p = impulses_[i];
    if (!std::isfinite(p.amplitude) || p.amplitude <= 0.0) {
      input_error("impulse amplitudes must be positive");
    }
    if (!std::isfinite(p.time)) input_error("impulse time is not finite");
    if (i > 0 && p.time <= impulses_[i - 1].time) {
      input_error("impulse times must be strictly increasing");
    }
    sum += p.amplitude;
  }
  if (std::abs(sum - 1.0) > kUnitySumTolerance) {
    input_error("impulse amplitudes must sum to 1, got " + std::to_string(sum));
  }
}

void Trajectory::validate() const {
  if (!std::isfinite(sample_rate) || sample_rate <= 0.0) {
    input_error("trajectory sample rate must be positive");
  }
  if (!std::isfinite(start_time)) input_error("trajectory start time is not finite");
  if (channels.empty()) input_error("trajectory has no channels");
  const auto n = channels.front().size();
  if (n == 0) input_error("trajectory is empty");
  for (const auto& ch : channels) {
    if (ch.size() != n) input_error("trajectory channels differ in length");
  }
}

ImpulseSequence zv_from_params(const ShaperParams& params) {
  params.validate();
  const double k0 = params.k0;
  return ImpulseSequence({{1.0 / (1.0 + k0), 0.0}, {k0 / (1.0 + k0), params.t0}});
}

ImpulseSequence cascade(const ImpulseSequence& a, const ImpulseSequence& b) {
  std::vector<Impulse> products;
  products.reserve(a.size() * b.size());
  for (const auto& pa : a.impulses()) {
    for (const auto& pb : b.impulses()) {
      products.push_back({pa.amplitude * pb.amplitude, pa.time + pb.time});
    }
  }
  std::sort(products.begin(), products.end(),
            [](const Impulse& x, const Impulse& y) { return x.time < y.time; });

  std::vector<Impulse> merged;
  merged.reserve(products.size());
  for (const auto& p : products) {
    if (!merged.empty() && p.time - merged.back().time <= kImpulseMergeTolerance) {
      merged.back().amplitude += p.amplitude;
    } else {
      merged.push_back(p);
    }
  }
  return ImpulseSequence(std::move(merged));
}

FrequencyResponse frequency_response(const ImpulseSequence& seq, double freq_hz) {
  double re = 0.0;
  double im = 0.0;
  for (const auto& p : seq.impulses()) {
    const double angle = 2.0 * std::numbers::pi * freq_hz * p.time;
    re += p.amplitude * std::cos(angle);
    im -= p.amplitude * std::sin(angle);
  }
  return {std::hypot(re, im), std::atan2(im, re)};
}

double total_delay(const ImpulseSequence& seq) noexcept {
  return seq.impulses().back().time;
}

Trajectory apply(const ImpulseSequence& seq, const Trajectory& traj) {
  traj.validate();
  const double rate = traj.sample_rate;
  const auto n_in = static_cast<std::ptrdiff_t>(traj.length());
  const auto extra =
      static_cast<std::ptrdiff_t>(std::ceil(total_delay(seq) * rate - kSnap));
  const auto n_out = n_in + std::max<std::ptrdiff_t>(extra, 0);

  // Each impulse becomes a (whole, fraction) sample delay.
  struct Tap {
    double amplitude;
    std::ptrdiff_t whole;
    double frac;
  };
  std::vector<Tap> taps;
  for (const auto& p : seq.impulses()) {
    const double d = p.time * rate;
    double whole = std::floor(d);
    double frac = d - whole;
    if (frac < kSnap) {
      frac = 0.0;
    } else if (frac > 1.0 - kSnap) {
      whole += 1.0;
      frac = 0.0;
    }
    taps.push_back({p.amplitude, static_cast<std::ptrdiff_t>(whole), frac});
  }

  Trajectory out;
  out.sample_rate = rate;
  out.start_time = traj.start_time;
  out.channels.reserve(traj.channels.size());
  for (const auto& x : traj.channels) {
    const auto at = [&](std::ptrdiff_t i) {
      return x[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, n_in - 1))];
    };
    std::vector<double> y(static_cast<std::size_t>(n_out), 0.0);
    for (std::ptrdiff_t n = 0; n < n_out; ++n) {
      double acc = 0.0;
      for (const auto& tap : taps) {
        // Reading at position n - whole - frac: between samples i-1 and i.
        const std::ptrdiff_t i = n - tap.whole;
        const double v = tap.frac == 0.0
                             ? at(i)
                             : at(i - 1) * tap.frac + at(i) * (1.0 - tap.frac);
        acc += tap.amplitude * v;
      }
      y[static_cast<std::size_t>(n)] = acc;
    }
    out.channels.push_back(std::move(y));
  }
  return out;
}

double k0_from_damping_ratio(double zeta) {
  if (!std::isfinite(zeta) || zeta < 0.0 || zeta >= 1.0) {
    throw Error(ErrorCode::ParameterDomain,
                "damping ratio must lie in [0, 1), got " + std::to_string(zeta));
  }
  return std::exp(-zeta * std::numbers::pi / std::sqrt(1.0 - zeta * zeta));
}

}  // namespace vibshape
