#include "vibshape/vibshape.h"

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <new>
#include <string>

#include "vibshape/arm_sim.hpp"
#include "vibshape/error.hpp"
#include "vibshape/freq_map.hpp"
#include "vibshape/io.hpp"
#include "vibshape/modal_ident.hpp"
#include "vibshape/pipeline.hpp"
#include "vibshape/shaper.hpp"

struct vs_shaper {
  vibshape::ImpulseSequence value;
};
struct vs_trajectory {
  vibshape::Trajectory value;
};
struct vs_trace {
  vibshape::AccelTrace value;
};
struct vs_map {
  vibshape::FrequencyMap value;
};
struct vs_plant {
  vibshape::SimConfig value;
};
struct vs_sim_result {
  vibshape::SimResult value;
};
struct vs_report {
  std::vector<vibshape::ReportRow> rows;
  std::string table;
  std::string csv;
};

namespace {

using namespace vibshape;

thread_local std::string g_last_error;

vs_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParameterDomain: return VS_ERR_PARAMETER_DOMAIN;
    case ErrorCode::Input: return VS_ERR_INPUT;
    case ErrorCode::InsufficientData: return VS_ERR_INSUFFICIENT_DATA;
    case ErrorCode::NoModesFound: return VS_ERR_NO_MODES;
    case ErrorCode::Estimation: return VS_ERR_ESTIMATION;
    case ErrorCode::Grid: return VS_ERR_GRID;
    case ErrorCode::OutOfDomain: return VS_ERR_OUT_OF_DOMAIN;
    case ErrorCode::Configuration: return VS_ERR_CONFIG;
    case ErrorCode::UndefinedReduction: return VS_ERR_UNDEFINED_REDUCTION;
    case ErrorCode::Parse: return VS_ERR_PARSE;
    case ErrorCode::Io: return VS_ERR_IO;
  }
  return VS_ERR_INTERNAL;
}

vs_status fail(vs_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
vs_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    g_last_error.clear();
    return VS_OK;
  } catch (const Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(VS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(VS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(VS_ERR_INTERNAL, "unknown exception");
  }
}

#define VS_REQUIRE(ptr)                                                        \
  do {                                                                         \
    if ((ptr) == nullptr) return fail(VS_ERR_NULL_ARGUMENT, #ptr " is NULL");  \
  } while (0)

void write_output(const char* path, const std::string& text) {
  if (std::string_view(path) == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
    return;
  }
  io::write_text_file(path, text);
}

JointPose pose_from(const double* joints, std::size_t n) { return JointPose{{joints, joints + n}}; }

K0Policy policy_from(double k0_fixed) {
  return k0_fixed > 0.0 ? K0Policy::fixed(k0_fixed) : K0Policy::per_node();
}

IdentifyOptions identify_from(const vs_identify_options* o) {
  IdentifyOptions opt;
  if (o == nullptr) return opt;
  opt.peaks.max_modes = o->max_modes;
  opt.peaks.min_prominence_ratio = o->min_prominence;
  opt.peaks.low_cutoff_hz = o->low_cutoff_hz;
  opt.zero_pad_factor = o->zero_pad_factor;
  opt.residual.lowest_expected_mode_hz = o->lowest_mode_hz;
  return opt;
}

CampaignSpec campaign_from(const vs_campaign_options* o) {
  CampaignSpec spec;
  if (o == nullptr) return spec;
  if (o->joints == 0 || o->axis_values == nullptr || o->axis_sizes == nullptr || o->step_from == nullptr) {
    throw Error(ErrorCode::Input, "campaign options are incomplete");
  }
  spec.axes.clear();
  std::size_t offset = 0;
  for (std::size_t k = 0; k < o->joints; ++k) {
    spec.axes.emplace_back(o->axis_values + offset, o->axis_values + offset + o->axis_sizes[k]);
    offset += o->axis_sizes[k];
  }
  spec.step_from = pose_from(o->step_from, o->joints);
  spec.step.pre_time = o->pre_time;
  spec.step.hold_time = o->hold_time;
  spec.k0 = o->k0;
  spec.identify = identify_from(&o->identify);
  return spec;
}

template <typename T, typename... Args>
T* make(Args&&... args) {
  return new T{std::forward<Args>(args)...};
}

}  // namespace

extern "C" {

const char* vs_last_error(void) { return g_last_error.c_str(); }

const char* vs_status_name(vs_status status) {
  switch (status) {
    case VS_OK: return "ok";
    case VS_ERR_PARAMETER_DOMAIN: return "parameter domain error";
    case VS_ERR_INPUT: return "input error";
    case VS_ERR_INSUFFICIENT_DATA: return "insufficient data";
    case VS_ERR_NO_MODES: return "no modes found";
    case VS_ERR_ESTIMATION: return "estimation error";
    case VS_ERR_GRID: return "grid error";
    case VS_ERR_OUT_OF_DOMAIN: return "out of domain";
    case VS_ERR_CONFIG: return "configuration error";
    case VS_ERR_UNDEFINED_REDUCTION: return "undefined reduction";
    case VS_ERR_PARSE: return "parse error";
    case VS_ERR_IO: return "I/O error";
    case VS_ERR_NULL_ARGUMENT: return "null argument";
    case VS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* vs_version(void) { return "1.0.0"; }

// ---- shapers ---------------------------------------------------------------

vs_status vs_shaper_identity(vs_shaper** out) {
  VS_REQUIRE(out);
  return guarded([&] { *out = make<vs_shaper>(ImpulseSequence::identity()); });
}

vs_status vs_shaper_zv(double t0, double k0, vs_shaper** out) {
  VS_REQUIRE(out);
  return guarded([&] { *out = make<vs_shaper>(zv_from_params({t0, k0})); });
}

vs_status vs_shaper_from_impulses(const double* amplitudes, const double* times, size_t count, vs_shaper** out) {
  VS_REQUIRE(out);
  VS_REQUIRE(amplitudes);
  VS_REQUIRE(times);
  return guarded([&] {
    std::vector<Impulse> impulses;
    for (size_t i = 0; i < count; ++i) impulses.push_back({amplitudes[i], times[i]});
    *out = make<vs_shaper>(ImpulseSequence(std::move(impulses)));
  });
}

vs_status vs_shaper_cascade(const vs_shaper* a, const vs_shaper* b, vs_shaper** out) {
  VS_REQUIRE(a);
  VS_REQUIRE(b);
  VS_REQUIRE(out);
  return guarded([&] { *out = make<vs_shaper>(cascade(a->value, b->value)); });
}

void vs_shaper_free(vs_shaper* shaper) { delete shaper; }

size_t vs_shaper_size(const vs_shaper* shaper) { return shaper ? shaper->value.size() : 0; }

vs_status vs_shaper_impulse(const vs_shaper* shaper, size_t index, double* amplitude, double* time) {
  VS_REQUIRE(shaper);
  if (index >= shaper->value.size()) return fail(VS_ERR_INPUT, "impulse index out of range");
  if (amplitude) *amplitude = shaper->value.impulses()[index].amplitude;
  if (time) *time = shaper->value.impulses()[index].time;
  return VS_OK;
}

double vs_shaper_total_delay(const vs_shaper* shaper) { return shaper ? total_delay(shaper->value) : 0.0; }

vs_status vs_shaper_response(const vs_shaper* shaper, double freq_hz, double* magnitude, double* phase_rad) {
  VS_REQUIRE(shaper);
  if (!(freq_hz >= 0.0)) return fail(VS_ERR_INPUT, "frequency must be >= 0");
  const auto h = frequency_response(shaper->value, freq_hz);
  if (magnitude) *magnitude = h.magnitude;
  if (phase_rad) *phase_rad = h.phase;
  return VS_OK;
}

vs_status vs_shaper_bode(const vs_shaper* shaper, double f_min, double f_max, size_t points, double* freq_hz,
                         double* magnitude_db, double* phase_deg) {
  VS_REQUIRE(shaper);
  VS_REQUIRE(freq_hz);
  VS_REQUIRE(magnitude_db);
  VS_REQUIRE(phase_deg);
  return guarded([&] {
    const auto pts = bode(shaper->value, f_min, f_max, points);
    for (size_t i = 0; i < pts.size(); ++i) {
      freq_hz[i] = pts[i].frequency_hz;
      magnitude_db[i] = pts[i].magnitude_db;
      phase_deg[i] = pts[i].phase_deg;
    }
  });
}

vs_status vs_k0_from_damping_ratio(double zeta, double* k0) {
  VS_REQUIRE(k0);
  return guarded([&] { *k0 = k0_from_damping_ratio(zeta); });
}

// ---- trajectories ------------------------------------------------------------

vs_status vs_trajectory_create(double sample_rate, double start_time, size_t channels, size_t length,
                               const double* samples, vs_trajectory** out) {
  VS_REQUIRE(out);
  VS_REQUIRE(samples);
  return guarded([&] {
    Trajectory t;
    t.sample_rate = sample_rate;
    t.start_time = start_time;
    for (size_t c = 0; c < channels; ++c) t.channels.emplace_back(samples + c * length, samples + (c + 1) * length);
    t.validate();
    *out = make<vs_trajectory>(std::move(t));
  });
}

vs_status vs_trajectory_step(const double* from, const double* to, size_t joints, double sample_rate,
                             double pre_time, double hold_time, vs_trajectory** out) {
  VS_REQUIRE(from);
  VS_REQUIRE(to);
  VS_REQUIRE(out);
  return guarded([&] {
    *out = make<vs_trajectory>(step_command(pose_from(from, joints), pose_from(to, joints), sample_rate,
                                            StepOptions{pre_time, hold_time}));
  });
}

vs_status vs_trajectory_read_csv(const char* path, vs_trajectory** out) {
  VS_REQUIRE(path);
  VS_REQUIRE(out);
  return guarded([&] { *out = make<vs_trajectory>(io::parse_trajectory_csv(io::read_text_file(path))); });
}

vs_status vs_trajectory_write_csv(const vs_trajectory* traj, const char* path) {
  VS_REQUIRE(traj);
  VS_REQUIRE(path);
  return guarded([&] { write_output(path, io::trajectory_to_csv(traj->value)); });
}

void vs_trajectory_free(vs_trajectory* traj) { delete traj; }

size_t vs_trajectory_channels(const vs_trajectory* traj) { return traj ? traj->value.channels.size() : 0; }
size_t vs_trajectory_length(const vs_trajectory* traj) { return traj ? traj->value.length() : 0; }
double vs_trajectory_sample_rate(const vs_trajectory* traj) { return traj ? traj->value.sample_rate : 0.0; }
double vs_trajectory_start_time(const vs_trajectory* traj) { return traj ? traj->value.start_time : 0.0; }

vs_status vs_trajectory_sample(const vs_trajectory* traj, size_t channel, size_t index, double* value) {
  VS_REQUIRE(traj);
  VS_REQUIRE(value);
  if (channel >= traj->value.channels.size() || index >= traj->value.length()) {
    return fail(VS_ERR_INPUT, "trajectory sample index out of range");
  }
  *value = traj->value.channels[channel][index];
  return VS_OK;
}

vs_status vs_shaper_apply(const vs_shaper* shaper, const vs_trajectory* traj, vs_trajectory** out) {
  VS_REQUIRE(shaper);
  VS_REQUIRE(traj);
  VS_REQUIRE(out);
  return guarded([&] { *out = make<vs_trajectory>(apply(shaper->value, traj->value)); });
}

// ---- traces ------------------------------------------------------------------

vs_status vs_trace_create(double sample_rate, double start_time, const double* samples, size_t count,
                          double motion_end_time, vs_trace** out) {
  VS_REQUIRE(out);
  if (count > 0) VS_REQUIRE(samples);
  return guarded([&] {
    AccelTrace t;
    t.sample_rate = sample_rate;
    t.start_time = start_time;
    t.samples.assign(samples, samples + count);
    t.motion_end_time = motion_end_time;
    t.validate();
    *out = make<vs_trace>(std::move(t));
  });
}

vs_status vs_trace_read_csv(const char* path, double motion_end_time, vs_trace** out) {
  VS_REQUIRE(path);
  VS_REQUIRE(out);
  return guarded([&] {
    std::optional<double> end;
    if (!std::isnan(motion_end_time)) end = motion_end_time;
    *out = make<vs_trace>(io::parse_trace_csv(io::read_text_file(path), end));
  });
}

vs_status vs_trace_write_csv(const vs_trace* trace, const char* path) {
  VS_REQUIRE(trace);
  VS_REQUIRE(path);
  return guarded([&] { write_output(path, io::trace_to_csv(trace->value)); });
}

void vs_trace_free(vs_trace* trace) { delete trace; }
size_t vs_trace_length(const vs_trace* trace) { return trace ? trace->value.samples.size() : 0; }

void vs_identify_options_default(vs_identify_options* options) {
  if (options == nullptr) return;
  const IdentifyOptions d;
  options->max_modes = d.peaks.max_modes;
  options->min_prominence = d.peaks.min_prominence_ratio;
  options->low_cutoff_hz = d.peaks.low_cutoff_hz;
  options->zero_pad_factor = d.zero_pad_factor;
  options->lowest_mode_hz = d.residual.lowest_expected_mode_hz;
}

vs_status vs_identify(const vs_trace* trace, const vs_identify_options* options, vs_peak* peaks, size_t capacity,
                      size_t* count, const char* spectrum_csv_path) {
  VS_REQUIRE(trace);
  VS_REQUIRE(count);
  if (capacity > 0) VS_REQUIRE(peaks);
  *count = 0;
  return guarded([&] {
    const auto opts = identify_from(options);
    const auto segment = residual_segment(trace->value, opts.residual);
    const auto spec = spectrum(segment, opts.zero_pad_factor);
    // The spectrum is written even when no peak is found.
    if (spectrum_csv_path != nullptr) write_output(spectrum_csv_path, io::spectrum_to_csv(spec));
    const auto found = extract_peaks(spec, opts.peaks);
    *count = found.size();
    for (size_t i = 0; i < found.size() && i < capacity; ++i) peaks[i] = {found[i].frequency, found[i].magnitude};
  });
}

vs_status vs_estimate_k0(const vs_trace* trace, double mode_freq_hz, double lowest_mode_hz, double* k0) {
  VS_REQUIRE(trace);
  VS_REQUIRE(k0);
  return guarded([&] {
    ResidualOptions opt;
    if (lowest_mode_hz > 0.0) opt.lowest_expected_mode_hz = lowest_mode_hz;
    *k0 = estimate_k0(residual_segment(trace->value, opt), mode_freq_hz);
  });
}

// ---- maps --------------------------------------------------------------------

vs_status vs_map_build(const double* poses, size_t joints, const double* freqs, size_t modes, size_t count,
                       vs_map** out) {
  VS_REQUIRE(poses);
  VS_REQUIRE(freqs);
  VS_REQUIRE(out);
  return guarded([&] {
    std::vector<PoseMeasurement> ms;
    for (size_t i = 0; i < count; ++i) {
      PoseMeasurement m;
      m.pose = pose_from(poses + i * joints, joints);
      for (size_t j = 0; j < modes; ++j) m.peaks.push_back({freqs[i * modes + j], 1.0, static_cast<int>(j)});
      ms.push_back(std::move(m));
    }
    *out = make<vs_map>(build_map(ms));
  });
}

vs_status vs_map_read(const char* path, vs_map** out) {
  VS_REQUIRE(path);
  VS_REQUIRE(out);
  return guarded([&] { *out = make<vs_map>(io::parse_map_json(io::read_text_file(path))); });
}

vs_status vs_map_write(const vs_map* map, const char* path) {
  VS_REQUIRE(map);
  VS_REQUIRE(path);
  return guarded([&] { write_output(path, io::map_to_json(map->value)); });
}

void vs_map_free(vs_map* map) { delete map; }

size_t vs_map_dimension(const vs_map* map) { return map ? map->value.dimension() : 0; }
size_t vs_map_modes(const vs_map* map) { return map ? map->value.modes() : 0; }
size_t vs_map_axis_size(const vs_map* map, size_t axis) {
  return map && axis < map->value.dimension() ? map->value.axes()[axis].size() : 0;
}

vs_status vs_map_axis_value(const vs_map* map, size_t axis, size_t index, double* value) {
  VS_REQUIRE(map);
  VS_REQUIRE(value);
  if (axis >= map->value.dimension() || index >= map->value.axes()[axis].size()) {
    return fail(VS_ERR_INPUT, "axis index out of range");
  }
  *value = map->value.axes()[axis][index];
  return VS_OK;
}

vs_status vs_map_node_value(const vs_map* map, size_t mode, size_t flat_index, double* value) {
  VS_REQUIRE(map);
  VS_REQUIRE(value);
  if (mode >= map->value.modes() || flat_index >= map->value.node_count()) {
    return fail(VS_ERR_INPUT, "node index out of range");
  }
  *value = map->value.values(mode)[flat_index];
  return VS_OK;
}

vs_status vs_map_interpolate(const vs_map* map, const double* pose, size_t joints, size_t mode, double* hz) {
  VS_REQUIRE(map);
  VS_REQUIRE(pose);
  VS_REQUIRE(hz);
  return guarded([&] { *hz = interpolate(map->value, pose_from(pose, joints), mode); });
}

vs_status vs_map_extrapolate(const vs_map* map, const double* pose, size_t joints, size_t mode, double limit_cells,
                             double* hz, int* extrapolated) {
  VS_REQUIRE(map);
  VS_REQUIRE(pose);
  VS_REQUIRE(hz);
  return guarded([&] {
    ExtrapolationOptions opt;
    if (limit_cells > 0.0) opt.limit_cells = limit_cells;
    const auto r = extrapolate(map->value, pose_from(pose, joints), mode, opt);
    *hz = r.value;
    if (extrapolated) *extrapolated = r.extrapolated ? 1 : 0;
  });
}

vs_status vs_map_shaper_params(const vs_map* map, const double* pose, size_t joints, size_t mode, double k0_fixed,
                               int allow_extrapolation, double* t0, double* k0) {
  VS_REQUIRE(map);
  VS_REQUIRE(pose);
  return guarded([&] {
    const auto p = shaper_params_at(map->value, pose_from(pose, joints), mode, policy_from(k0_fixed),
                                    allow_extrapolation != 0);
    if (t0) *t0 = p.t0;
    if (k0) *k0 = p.k0;
  });
}

vs_status vs_map_design_shaper(const vs_map* map, const double* pose, size_t joints, const size_t* modes,
                               size_t mode_count, double k0_fixed, int allow_extrapolation, vs_shaper** out) {
  VS_REQUIRE(map);
  VS_REQUIRE(pose);
  VS_REQUIRE(out);
  if (mode_count > 0) VS_REQUIRE(modes);
  return guarded([&] {
    std::vector<std::size_t> list(modes, modes + mode_count);
    auto design = design_shaper(map->value, pose_from(pose, joints), std::move(list), policy_from(k0_fixed),
                                allow_extrapolation != 0);
    *out = make<vs_shaper>(std::move(design.sequence));
  });
}

// ---- simulation --------------------------------------------------------------

vs_status vs_plant_default(vs_plant** out) {
  VS_REQUIRE(out);
  return guarded([&] { *out = make<vs_plant>(default_plant()); });
}

vs_status vs_plant_read(const char* path, vs_plant** out) {
  VS_REQUIRE(path);
  VS_REQUIRE(out);
  return guarded([&] { *out = make<vs_plant>(io::parse_plant_json(io::read_text_file(path))); });
}

vs_status vs_plant_write(const vs_plant* plant, const char* path) {
  VS_REQUIRE(plant);
  VS_REQUIRE(path);
  return guarded([&] { write_output(path, io::plant_to_json(plant->value)); });
}

vs_status vs_plant_with(const vs_plant* plant, uint64_t seed, double sample_rate, vs_plant** out) {
  VS_REQUIRE(plant);
  VS_REQUIRE(out);
  return guarded([&] {
    SimConfig c = plant->value;
    c.seed = seed;
    if (sample_rate > 0.0) c.sample_rate = sample_rate;
    c.validate();
    *out = make<vs_plant>(std::move(c));
  });
}

double vs_plant_sample_rate(const vs_plant* plant) { return plant ? plant->value.sample_rate : 0.0; }
uint64_t vs_plant_seed(const vs_plant* plant) { return plant ? plant->value.seed : 0; }
void vs_plant_free(vs_plant* plant) { delete plant; }

vs_status vs_simulate(const vs_plant* plant, const vs_trajectory* command, vs_sim_result** out) {
  VS_REQUIRE(plant);
  VS_REQUIRE(command);
  VS_REQUIRE(out);
  return guarded([&] { *out = make<vs_sim_result>(simulate(plant->value, command->value)); });
}

void vs_sim_result_free(vs_sim_result* result) { delete result; }

double vs_sim_result_command_end(const vs_sim_result* result) { return result ? result->value.command_end_time : 0.0; }

vs_status vs_sim_result_residual(const vs_sim_result* result, double settle_guard, double* peak_to_peak) {
  VS_REQUIRE(result);
  VS_REQUIRE(peak_to_peak);
  return guarded([&] { *peak_to_peak = residual_amplitude(result->value, settle_guard); });
}

vs_status vs_sim_result_write_csv(const vs_sim_result* result, const char* path) {
  VS_REQUIRE(result);
  VS_REQUIRE(path);
  return guarded([&] { write_output(path, io::sim_result_to_csv(result->value)); });
}

vs_status vs_sim_result_trace(const vs_sim_result* result, vs_trace** out) {
  VS_REQUIRE(result);
  VS_REQUIRE(out);
  return guarded([&] { *out = make<vs_trace>(result->value.tip_acceleration); });
}

// ---- campaign and verification ------------------------------------------------

void vs_campaign_options_default(vs_campaign_options* options) {
  if (options == nullptr) return;
  static const double kAxes[] = {0.0, 30.0, 60.0, 90.0, 0.0, 30.0, 60.0, 90.0};
  static const size_t kSizes[] = {4, 4};
  static const double kFrom[] = {-30.0, -30.0};
  const CampaignSpec d;
  options->axis_values = kAxes;
  options->axis_sizes = kSizes;
  options->joints = 2;
  options->step_from = kFrom;
  options->pre_time = d.step.pre_time;
  options->hold_time = d.step.hold_time;
  options->k0 = d.k0;
  vs_identify_options_default(&options->identify);
}

vs_status vs_campaign_simulate(const vs_plant* plant, const vs_campaign_options* options, const char* trace_dir,
                               vs_map** out) {
  VS_REQUIRE(plant);
  VS_REQUIRE(out);
  return guarded([&] {
    const auto spec = campaign_from(options);
    const auto traces = synth_campaign(plant->value, grid_poses(spec.axes), spec.step_from, spec.step);
    if (trace_dir != nullptr) {
      std::filesystem::create_directories(trace_dir);
      for (const auto& t : traces) {
        io::write_text_file(std::filesystem::path(trace_dir) / io::campaign_trace_name(t.pose),
                            io::trace_to_csv(t.trace));
      }
    }
    auto map = map_from_traces(traces, spec);
    auto meta = map.metadata();
    meta["source"] = "simulator";
    meta["seed"] = std::to_string(plant->value.seed);
    *out = make<vs_map>(FrequencyMap(map.axes(), map.all_values(), std::nullopt, map.k0_scalar(), std::move(meta)));
  });
}

vs_status vs_campaign_from_dir(const char* trace_dir, const vs_campaign_options* options, vs_map** out) {
  VS_REQUIRE(trace_dir);
  VS_REQUIRE(out);
  return guarded([&] {
    const auto spec = campaign_from(options);
    std::vector<CampaignTrace> traces;
    std::string missing;
    for (const auto& pose : grid_poses(spec.axes)) {
      const auto path = std::filesystem::path(trace_dir) / io::campaign_trace_name(pose);
      if (!std::filesystem::exists(path)) {
        missing += (missing.empty() ? "" : ", ") + pose.to_string() + " (" + path.filename().string() + ")";
        continue;
      }
      auto trace = io::parse_trace_csv(io::read_text_file(path));
      traces.push_back({pose, std::move(trace)});
    }
    if (!missing.empty()) throw Error(ErrorCode::Grid, "campaign is missing traces for pose(s): " + missing);
    auto map = map_from_traces(traces, spec);
    auto meta = map.metadata();
    meta["source"] = "recorded";
    *out = make<vs_map>(FrequencyMap(map.axes(), map.all_values(), std::nullopt, map.k0_scalar(), std::move(meta)));
  });
}

void vs_verify_options_default(vs_verify_options* options) {
  if (options == nullptr) return;
  const VerifyOptions d;
  options->step_from = nullptr;
  options->pre_time = d.step.pre_time;
  options->hold_time = d.step.hold_time;
  options->settle_guard = d.settle_guard;
  options->k0_fixed = 1.0;
  options->allow_extrapolation = 0;
}

vs_status vs_verify(const vs_plant* plant, const vs_map* map, const char* const* labels, const double* poses,
                    size_t joints, size_t count, const vs_verify_options* options, vs_report** out) {
  VS_REQUIRE(plant);
  VS_REQUIRE(map);
  VS_REQUIRE(out);
  if (count > 0) {
    VS_REQUIRE(labels);
    VS_REQUIRE(poses);
  }
  return guarded([&] {
    vs_verify_options o;
    vs_verify_options_default(&o);
    if (options) o = *options;
    VerifyOptions opt;
    const std::size_t dim = count > 0 ? joints : map->value.dimension();
    opt.step_from = o.step_from ? pose_from(o.step_from, dim) : JointPose{std::vector<double>(dim, 0.0)};
    opt.step = {o.pre_time, o.hold_time};
    opt.settle_guard = o.settle_guard;
    opt.k0 = policy_from(o.k0_fixed);
    opt.allow_extrapolation = o.allow_extrapolation != 0;
    std::vector<LabeledPose> positions;
    for (size_t i = 0; i < count; ++i) {
      auto pose = pose_from(poses + i * joints, joints);
      positions.push_back({labels[i] ? labels[i] : "", std::move(pose)});
    }
    auto report = std::make_unique<vs_report>();
    report->rows = verify(plant->value, map->value, positions, opt);
    report->table = io::report_to_table(report->rows);
    report->csv = io::report_to_csv(report->rows);
    *out = report.release();
  });
}

void vs_report_free(vs_report* report) { delete report; }
size_t vs_report_rows(const vs_report* report) { return report ? report->rows.size() : 0; }

vs_status vs_report_row(const vs_report* report, size_t row, double* amplitude_without, double* amplitude_with,
                        double* reduction_percent) {
  VS_REQUIRE(report);
  if (row >= report->rows.size()) return fail(VS_ERR_INPUT, "report row out of range");
  const auto& r = report->rows[row];
  if (amplitude_without) *amplitude_without = r.amplitude_without;
  if (amplitude_with) *amplitude_with = r.amplitude_with;
  if (reduction_percent) *reduction_percent = r.reduction_percent;
  return VS_OK;
}

vs_status vs_report_write_csv(const vs_report* report, const char* path) {
  VS_REQUIRE(report);
  VS_REQUIRE(path);
  return guarded([&] { write_output(path, report->csv); });
}

const char* vs_report_table(const vs_report* report) { return report ? report->table.c_str() : ""; }
const char* vs_report_csv(const vs_report* report) { return report ? report->csv.c_str() : ""; }

}  // extern "C"
