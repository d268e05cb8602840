#include "vibshape/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "vibshape/error.hpp"

namespace vibshape {

namespace {

std::string join_axis(const std::vector<double>& axis) {
  std::string s;
  char buf[32];
  for (std::size_t i = 0; i < axis.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%g", i ? "," : "", axis[i]);
    s += buf;
  }
  return s;
}

}  // namespace

Identification identify(const AccelTrace& trace, const IdentifyOptions& options) {
  Identification out;
  out.segment = residual_segment(trace, options.residual);
  out.spectrum = spectrum(out.segment, options.zero_pad_factor);
  out.peaks = extract_peaks(out.spectrum, options.peaks);
  return out;
}

std::vector<JointPose> grid_poses(const std::vector<std::vector<double>>& axes) {
  if (axes.empty()) throw Error(ErrorCode::Input, "grid has no axes");
  std::size_t total = 1;
  for (const auto& axis : axes) {
    if (axis.empty()) throw Error(ErrorCode::Input, "grid axis is empty");
    total *= axis.size();
  }
  std::vector<JointPose> poses;
  poses.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    JointPose p;
    p.joints.resize(axes.size());
    std::size_t rest = flat;
    for (std::size_t k = axes.size(); k-- > 0;) {
      p.joints[k] = axes[k][rest % axes[k].size()];
      rest /= axes[k].size();
    }
    poses.push_back(std::move(p));
  }
  return poses;
}

FrequencyMap map_from_traces(const std::vector<CampaignTrace>& traces, const CampaignSpec& spec) {
  std::vector<PoseMeasurement> measurements;
  measurements.reserve(traces.size());
  for (const auto& t : traces) {
    std::vector<ModePeak> peaks;
    try {
      peaks = identify(t.trace, spec.identify).peaks;
    } catch (const Error& e) {
      throw Error(e.code(), "pose " + t.pose.to_string() + ": " + e.what());
    }
    measurements.push_back({t.pose, std::move(peaks)});
  }
  std::map<std::string, std::string> meta;
  meta["k0_policy"] = "fixed";
  meta["max_modes"] = std::to_string(spec.identify.peaks.max_modes);
  meta["step_from_deg"] = join_axis(spec.step_from.joints);
  meta["zero_pad_factor"] = std::to_string(spec.identify.zero_pad_factor);
  auto built = build_map(measurements, std::move(meta));
  if (spec.k0 == 1.0) return built;
  return FrequencyMap(built.axes(), built.all_values(), std::nullopt, spec.k0, built.metadata());
}

FrequencyMap run_simulated_campaign(const SimConfig& plant, const CampaignSpec& spec) {
  const auto traces = synth_campaign(plant, grid_poses(spec.axes), spec.step_from, spec.step);
  auto map = map_from_traces(traces, spec);
  auto meta = map.metadata();
  meta["source"] = "simulator";
  meta["seed"] = std::to_string(plant.seed);
  return FrequencyMap(map.axes(), map.all_values(), std::nullopt, map.k0_scalar(), std::move(meta));
}

ShaperDesign design_shaper(const FrequencyMap& map, const JointPose& pose, std::vector<std::size_t> modes,
                           const K0Policy& k0, bool allow_extrapolation) {
  std::sort(modes.begin(), modes.end());
  modes.erase(std::unique(modes.begin(), modes.end()), modes.end());
  ShaperDesign design{ImpulseSequence::identity(), {}, {}, {}};
  // Modes are ordered by frequency at every point of the map, so ascending
  // mode index is ascending frequency.
  for (std::size_t m : modes) {
    const auto params = shaper_params_at(map, pose, m, k0, allow_extrapolation);
    design.sequence = cascade(design.sequence, zv_from_params(params));
    design.modes.push_back(m);
    design.frequencies.push_back(1.0 / (2.0 * params.t0));
    design.params.push_back(params);
  }
  return design;
}

std::vector<LabeledPose> reference_positions() {
  return {{"A", {{45.0, 45.0}}}, {"B", {{15.0, 15.0}}}, {"C", {{75.0, 60.0}}}};
}

std::vector<ReportRow> verify(const SimConfig& plant, const FrequencyMap& map, const std::vector<LabeledPose>& positions,
                              const VerifyOptions& options) {
  std::vector<std::size_t> modes = options.modes;
  if (modes.empty()) {
    for (std::size_t m = 0; m < map.modes(); ++m) modes.push_back(m);
  }
  std::vector<ReportRow> rows;
  for (const auto& pos : positions) {
    const auto design = design_shaper(map, pos.pose, modes, options.k0, options.allow_extrapolation);
    const auto command = step_command(options.step_from, pos.pose, plant.sample_rate, options.step);
    const auto unshaped = simulate(plant, command);
    const auto shaped = simulate(plant, apply(design.sequence, command));
    const auto r = reduction_report(unshaped, shaped, options.settle_guard);
    rows.push_back({pos.label, pos.pose, r.amplitude_without, r.amplitude_with, r.reduction_percent});
  }
  return rows;
}

std::vector<BodePoint> bode(const ImpulseSequence& seq, double f_min, double f_max, std::size_t points) {
  if (!std::isfinite(f_min) || !std::isfinite(f_max) || f_min < 0.0 || f_max < f_min) {
    throw Error(ErrorCode::Input, "frequency range must satisfy 0 <= f_min <= f_max");
  }
  if (points == 0 || (points == 1 && f_max != f_min)) {
    throw Error(ErrorCode::Input, "need at least 2 points for a frequency range");
  }
  std::vector<BodePoint> out;
  out.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double f = points == 1 ? f_min
                                 : f_min + (f_max - f_min) * static_cast<double>(i) / static_cast<double>(points - 1);
    const auto h = frequency_response(seq, f);
    out.push_back({f, 20.0 * std::log10(std::max(h.magnitude, kBodeMagnitudeFloor)),
                   h.phase * 180.0 / std::numbers::pi});
  }
  return out;
}

}  // namespace vibshape
