#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "vibshape/freq_map.hpp"
#include "vibshape/modal_ident.hpp"
#include "vibshape/shaper.hpp"

namespace vibshape {

struct ConstantFrequency {
  double hz = 1.0;
};

/// f(q) = base_hz + sum_j slopes[j] * (q_j - anchor[j]).
struct AffineFrequency {
  double base_hz = 1.0;
  std::vector<double> anchor;
  std::vector<double> slopes;  // Hz per degree
};

/// Frequency read off a tabulated map.
struct MapFrequency {
  std::shared_ptr<const FrequencyMap> map;
  std::size_t mode = 0;
};

using FrequencyFunction = std::variant<ConstantFrequency, AffineFrequency, MapFrequency>;

/// Natural frequency (Hz) at a pose. Throws Error(Configuration) if it is not
/// positive there.
double evaluate(const FrequencyFunction& fn, const JointPose& pose);

/// One lightly damped vibration mode of the tip.
struct ModeSpec {
  FrequencyFunction frequency = ConstantFrequency{};
  double zeta = 0.01;
  /// Tip displacement per degree of modal command (mm / deg).
  double gain = 1.0;
  /// Modal command = sum_j weights[j] * q_j. Empty means unit weight on every joint.
  std::vector<double> joint_weights;
};

struct SimConfig {
  std::vector<ModeSpec> modes;
  double sample_rate = 100.0;
  /// Absolute standard deviation of acceleration noise.
  double noise_std = 0.0;
  /// Extra noise standard deviation as a fraction of the peak noise-free
  /// acceleration of the run.
  double noise_relative = 0.0;
  std::uint64_t seed = 0;
  /// Rigid-body tip travel per degree of summed joint motion (mm / deg).
  double rigid_gain = 0.0;

  void validate() const;
};

/// Two modes with f1 = 1.9 + 0.004 (q1 - 45) - 0.003 (q2 - 60) Hz, f2 = 2 f1,
/// zeta = 0.01, noise at 1% of the peak acceleration.
SimConfig default_plant();

struct SimResult {
  Trajectory tip_displacement;  // one channel, mm
  AccelTrace tip_acceleration;  // motion_end_time == command_end_time
  /// First instant from which every command channel stays at its final value.
  double command_end_time = 0.0;
  /// Natural frequency of each mode at the command's end pose, Hz.
  std::vector<double> mode_frequencies;
};

/// Runs the modal plant on a joint command held piecewise constant between
/// samples (zero-order hold), with each mode frozen at its end-pose frequency.
SimResult simulate(const SimConfig& config, const Trajectory& command);

/// Peak-to-peak tip displacement from command_end_time + settle_guard to the
/// end of the run. Throws Error(InsufficientData) if that window is shorter
/// than 3 periods of the slowest mode.
double residual_amplitude(const SimResult& result, double settle_guard = 0.0);

struct ReductionReport {
  double amplitude_without = 0.0;  // mm
  double amplitude_with = 0.0;     // mm
  double reduction_percent = 0.0;
};

ReductionReport reduction_report(const SimResult& unshaped, const SimResult& shaped, double settle_guard = 0.0);

struct StepOptions {
  /// Rest time at the start pose before the step.
  double pre_time = 1.0;
  /// Time at the end pose after the step.
  double hold_time = 20.0;
};

/// Joint step command from `from` to `to` at t = pre_time, starting at t = 0.
Trajectory step_command(const JointPose& from, const JointPose& to, double sample_rate,
                        const StepOptions& options = {});

struct CampaignTrace {
  JointPose pose;
  AccelTrace trace;
};

/// Unshaped step from `step_from` into every grid pose, returning the tip
/// acceleration with motion_end_time set. Pose i uses seed config.seed + i.
std::vector<CampaignTrace> synth_campaign(const SimConfig& config, const std::vector<JointPose>& grid,
                                          const JointPose& step_from, const StepOptions& options = {});

}  // namespace vibshape
