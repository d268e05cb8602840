#pragma once

#include <span>
#include <vector>

namespace vibshape {

/// Tunables of one two-impulse shaper.
///
/// `t0` is the spacing between the impulses in seconds (half the vibration
/// period). `k0` is the amplitude ratio of the vibration over that half period;
/// weakly damped structures have k0 close to 1.
struct ShaperParams {
  double t0 = 0.0;
  double k0 = 1.0;

  /// Throws Error(ParameterDomain) unless t0 > 0 and 0 < k0 <= 1.
  void validate() const;
};

struct Impulse {
  double amplitude = 0.0;
  double time = 0.0;
};

/// Times closer than this are treated as one impulse when cascading.
inline constexpr double kImpulseMergeTolerance = 1e-9;

/// Tolerance on the unity amplitude sum of a valid sequence.
inline constexpr double kUnitySumTolerance = 1e-12;

/// An impulse train with strictly increasing times starting at 0, positive
/// amplitudes and unity DC gain. Immutable once constructed.
class ImpulseSequence {
 public:
  /// The single unit impulse at t = 0.
  ImpulseSequence();

  /// Validates and takes ownership. Throws Error(Input) on any violated
  /// invariant.
  explicit ImpulseSequence(std::vector<Impulse> impulses);

  static ImpulseSequence identity() { return ImpulseSequence(); }

  std::span<const Impulse> impulses() const noexcept { return impulses_; }
  std::size_t size() const noexcept { return impulses_.size(); }

  bool is_identity() const noexcept { return impulses_.size() == 1; }

 private:
  std::vector<Impulse> impulses_;
};

struct FrequencyResponse {
  double magnitude = 0.0;
  double phase = 0.0;  // radians
};

/// Uniformly sampled multi-channel command (joint positions in degrees or
/// joint velocities). Sample i of every channel is at start_time + i / sample_rate.
struct Trajectory {
  double sample_rate = 0.0;
  double start_time = 0.0;
  std::vector<std::vector<double>> channels;

  std::size_t length() const noexcept {
    return channels.empty() ? 0 : channels.front().size();
  }
  double time_at(std::size_t i) const noexcept {
    return start_time + static_cast<double>(i) / sample_rate;
  }

  /// Throws Error(Input) for a non-positive rate, no channels, no samples or
  /// ragged channels.
  void validate() const;
};

/// Two-impulse shaper: 1/(1+k0) at t = 0 and k0/(1+k0) at t = t0.
ImpulseSequence zv_from_params(const ShaperParams& params);

/// Convolution of two impulse trains. Coincident impulses are merged.
ImpulseSequence cascade(const ImpulseSequence& a, const ImpulseSequence& b);

/// H(f) = sum_j A_j exp(-i 2 pi f t_j).
FrequencyResponse frequency_response(const ImpulseSequence& seq, double freq_hz);

/// Time of the last impulse.
double total_delay(const ImpulseSequence& seq) noexcept;

/// Shapes every channel of `traj` with `seq`.
///
/// The input is held at its first sample before start_time and at its last
/// sample after the end; fractional delays are realised by linear
/// interpolation between neighbouring samples. The output starts at the same
/// time and is lengthened by ceil(total_delay * sample_rate) samples.
Trajectory apply(const ImpulseSequence& seq, const Trajectory& traj);

/// k0 = exp(-zeta pi / sqrt(1 - zeta^2)), the decay over half a damped period.
double k0_from_damping_ratio(double zeta);

}  // namespace vibshape
