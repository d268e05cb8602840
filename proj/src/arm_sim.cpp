#include "vibshape/arm_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "vibshape/error.hpp"

namespace vibshape {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::Configuration, what); }

// Exact transition of e'' + 2 zeta w e' + w^2 e = 0 over one sample, where
// e = x - u is the deviation from the held command.
struct ModalStep {
  double ee, ev, ve, vv;

  ModalStep(double omega, double zeta, double h) {
    const double sigma = zeta * omega;
    const double wd = omega * std::sqrt(1.0 - zeta * zeta);
    const double decay = std::exp(-sigma * h);
    const double c = std::cos(wd * h);
    const double s = std::sin(wd * h);
    ee = decay * (c + sigma / wd * s);
    ev = decay * s / wd;
    ve = -decay * omega * omega / wd * s;
    vv = decay * (c - sigma / wd * s);
  }
};

JointPose end_pose(const Trajectory& command) {
  JointPose pose;
  for (const auto& ch : command.channels) pose.joints.push_back(ch.back());
  return pose;
}

std::size_t command_end_index(const Trajectory& command) {
  std::size_t end = 0;
  for (const auto& ch : command.channels) {
    const double last = ch.back();
    for (std::size_t i = ch.size(); i-- > 0;) {
      if (ch[i] != last) {
        end = std::max(end, i + 1);
        break;
      }
    }
  }
  return end;
}

}  // namespace

double evaluate(const FrequencyFunction& fn, const JointPose& pose) {
  const double f = std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ConstantFrequency>) {
          return v.hz;
        } else if constexpr (std::is_same_v<T, AffineFrequency>) {
          if (v.anchor.size() != pose.size() || v.slopes.size() != pose.size()) {
            config_error("affine frequency function has " + std::to_string(v.slopes.size()) +
                         " slopes for a " + std::to_string(pose.size()) + "-joint pose");
          }
          double acc = v.base_hz;
          for (std::size_t j = 0; j < pose.size(); ++j) acc += v.slopes[j] * (pose.joints[j] - v.anchor[j]);
          return acc;
        } else {
          if (!v.map) config_error("map frequency function has no map");
          return extrapolate(*v.map, pose, v.mode).value;
        }
      },
      fn);
  if (!std::isfinite(f) || f <= 0.0) {
    config_error("mode frequency is not positive at pose " + pose.to_string());
  }
  return f;
}

void SimConfig::validate() const {
  if (modes.empty()) config_error("plant has no modes");
  if (!std::isfinite(sample_rate) || sample_rate <= 0.0) config_error("sample rate must be positive");
  if (!std::isfinite(noise_std) || noise_std < 0.0) config_error("noise_std must be >= 0");
  if (!std::isfinite(noise_relative) || noise_relative < 0.0) config_error("noise_relative must be >= 0");
  if (!std::isfinite(rigid_gain)) config_error("rigid_gain is not finite");
  for (const auto& m : modes) {
    if (!std::isfinite(m.zeta) || m.zeta < 0.0 || m.zeta >= 0.2) config_error("mode zeta must lie in [0, 0.2)");
    if (!std::isfinite(m.gain) || m.gain <= 0.0) config_error("mode gain must be positive");
  }
}

SimConfig default_plant() {
  SimConfig config;
  const AffineFrequency f1{1.9, {45.0, 60.0}, {0.004, -0.003}};
  const AffineFrequency f2{3.8, {45.0, 60.0}, {0.008, -0.006}};
  config.modes.push_back({f1, 0.01, 1.5, {}});
  config.modes.push_back({f2, 0.01, 0.4, {}});
  config.sample_rate = 100.0;
  config.noise_relative = 0.01;
  config.seed = 1;
  config.rigid_gain = 5.0;
  return config;
}

SimResult simulate(const SimConfig& config, const Trajectory& command) {
  config.validate();
  command.validate();
  if (command.sample_rate != config.sample_rate) {
    config_error("command sample rate " + std::to_string(command.sample_rate) + " Hz differs from plant rate " +
                 std::to_string(config.sample_rate) + " Hz");
  }
  const std::size_t joints = command.channels.size();
  const std::size_t n = command.length();
  const double h = 1.0 / config.sample_rate;
  const JointPose final_pose = end_pose(command);

  SimResult result;
  std::vector<double> displacement(n, 0.0);
  std::vector<double> accel(n, 0.0);

  for (std::size_t j = 0; j < n; ++j) {
    double rigid = 0.0;
    for (std::size_t c = 0; c < joints; ++c) rigid += command.channels[c][j];
    displacement[j] = config.rigid_gain * rigid;
  }

  for (const auto& mode : config.modes) {
    const double f = evaluate(mode.frequency, final_pose);
    if (config.sample_rate < 10.0 * f) {
      config_error("sample rate " + std::to_string(config.sample_rate) + " Hz is below 10x the mode frequency " +
                   std::to_string(f) + " Hz");
    }
    if (!mode.joint_weights.empty() && mode.joint_weights.size() != joints) {
      config_error("mode has " + std::to_string(mode.joint_weights.size()) + " joint weights for a " +
                   std::to_string(joints) + "-joint command");
    }
    result.mode_frequencies.push_back(f);
    const double omega = 2.0 * std::numbers::pi * f;
    const ModalStep step(omega, mode.zeta, h);

    const auto modal_command = [&](std::size_t i) {
      double u = 0.0;
      for (std::size_t c = 0; c < joints; ++c) {
        u += (mode.joint_weights.empty() ? 1.0 : mode.joint_weights[c]) * command.channels[c][i];
      }
      return u;
    };

    // Starts at rest on the initial command.
    double x = modal_command(0);
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = modal_command(i);
      const double e = x - u;
      displacement[i] += mode.gain * e;
      accel[i] += mode.gain * (-omega * omega * e - 2.0 * mode.zeta * omega * v);
      const double e_next = step.ee * e + step.ev * v;
      v = step.ve * e + step.vv * v;
      x = u + e_next;
    }
  }

  double peak = 0.0;
  for (double a : accel) peak = std::max(peak, std::abs(a));
  const double sigma = config.noise_std + config.noise_relative * peak;
  if (sigma > 0.0) {
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (auto& a : accel) a += noise(rng);
  }

  result.command_end_time = command.time_at(command_end_index(command));
  result.tip_displacement.sample_rate = config.sample_rate;
  result.tip_displacement.start_time = command.start_time;
  result.tip_displacement.channels.push_back(std::move(displacement));
  result.tip_acceleration.sample_rate = config.sample_rate;
  result.tip_acceleration.start_time = command.start_time;
  result.tip_acceleration.samples = std::move(accel);
  result.tip_acceleration.motion_end_time = result.command_end_time;
  return result;
}

double residual_amplitude(const SimResult& result, double settle_guard) {
  const auto& disp = result.tip_displacement;
  if (disp.channels.empty() || disp.length() == 0) {
    throw Error(ErrorCode::InsufficientData, "simulation result is empty");
  }
  if (result.mode_frequencies.empty()) throw Error(ErrorCode::Input, "simulation result lists no modes");
  const double slowest = *std::min_element(result.mode_frequencies.begin(), result.mode_frequencies.end());
  const double window_start = result.command_end_time + settle_guard;
  const double window_end = disp.time_at(disp.length() - 1);
  if (window_end - window_start < 3.0 / slowest - 1e-9) {
    throw Error(ErrorCode::InsufficientData, "residual window of " + std::to_string(window_end - window_start) +
                                                 " s is shorter than 3 periods of the slowest mode");
  }
  const auto& y = disp.channels.front();
  const auto first = static_cast<std::size_t>(
      std::max(0.0, std::ceil((window_start - disp.start_time) * disp.sample_rate - 1e-6)));
  const auto [lo, hi] = std::minmax_element(y.begin() + static_cast<std::ptrdiff_t>(first), y.end());
  return *hi - *lo;
}

ReductionReport reduction_report(const SimResult& unshaped, const SimResult& shaped, double settle_guard) {
  ReductionReport r;
  r.amplitude_without = residual_amplitude(unshaped, settle_guard);
  r.amplitude_with = residual_amplitude(shaped, settle_guard);
  if (!(r.amplitude_without > 0.0)) {
    throw Error(ErrorCode::UndefinedReduction, "unshaped residual amplitude is zero");
  }
  r.reduction_percent = 100.0 * (1.0 - r.amplitude_with / r.amplitude_without);
  return r;
}

Trajectory step_command(const JointPose& from, const JointPose& to, double sample_rate, const StepOptions& options) {
  if (from.size() != to.size() || from.size() == 0) {
    throw Error(ErrorCode::Input, "step endpoints must have the same, non-zero joint count");
  }
  if (!(sample_rate > 0.0) || !(options.pre_time >= 0.0) || !(options.hold_time > 0.0)) {
    throw Error(ErrorCode::Input, "step timing must be positive");
  }
  const auto pre = static_cast<std::size_t>(std::llround(options.pre_time * sample_rate));
  const auto hold = static_cast<std::size_t>(std::llround(options.hold_time * sample_rate));
  Trajectory traj;
  traj.sample_rate = sample_rate;
  traj.start_time = 0.0;
  for (std::size_t c = 0; c < from.size(); ++c) {
    std::vector<double> ch(pre, from.joints[c]);
    ch.resize(pre + hold, to.joints[c]);
    traj.channels.push_back(std::move(ch));
  }
  return traj;
}

std::vector<CampaignTrace> synth_campaign(const SimConfig& config, const std::vector<JointPose>& grid,
                                          const JointPose& step_from, const StepOptions& options) {
  std::vector<CampaignTrace> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    SimConfig run = config;
    run.seed = config.seed + i;
    auto result = simulate(run, step_command(step_from, grid[i], config.sample_rate, options));
    out.push_back({grid[i], std::move(result.tip_acceleration)});
  }
  return out;
}

}  // namespace vibshape
