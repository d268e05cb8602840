// vibshape command-line tool. Talks to the library only through the C API.
//
// Exit codes: 0 success, 1 I/O or domain error, 2 analysis produced no result.

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vibshape/vibshape.h"

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kNoResult = 2;

struct ShaperDel {
  void operator()(vs_shaper* p) const { vs_shaper_free(p); }
};
struct TrajDel {
  void operator()(vs_trajectory* p) const { vs_trajectory_free(p); }
};
struct TraceDel {
  void operator()(vs_trace* p) const { vs_trace_free(p); }
};
struct MapDel {
  void operator()(vs_map* p) const { vs_map_free(p); }
};
struct PlantDel {
  void operator()(vs_plant* p) const { vs_plant_free(p); }
};
struct SimDel {
  void operator()(vs_sim_result* p) const { vs_sim_result_free(p); }
};
struct ReportDel {
  void operator()(vs_report* p) const { vs_report_free(p); }
};
using Shaper = std::unique_ptr<vs_shaper, ShaperDel>;
using Traj = std::unique_ptr<vs_trajectory, TrajDel>;
using Trace = std::unique_ptr<vs_trace, TraceDel>;
using Map = std::unique_ptr<vs_map, MapDel>;
using Plant = std::unique_ptr<vs_plant, PlantDel>;
using Sim = std::unique_ptr<vs_sim_result, SimDel>;
using Report = std::unique_ptr<vs_report, ReportDel>;

/// Carries a C status out of a command body.
struct Failure {
  vs_status status;
  std::string message;
};

void check(vs_status status) {
  if (status != VS_OK) throw Failure{status, vs_last_error()};
}

int exit_code_for(vs_status status) { return status == VS_ERR_NO_MODES ? kNoResult : kFailure; }

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw Failure{VS_ERR_INPUT, "'" + text + "' is not a comma-separated number list"};
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw Failure{VS_ERR_INPUT, "'" + text + "' is not a comma-separated number list"};
    }
    out.push_back(v);
  }
  if (out.empty()) throw Failure{VS_ERR_INPUT, "empty number list"};
  return out;
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string pose_text(const std::vector<double>& pose) {
  std::string s = "(";
  for (std::size_t i = 0; i < pose.size(); ++i) s += (i ? ", " : "") + fmt("%g", pose[i]);
  return s + ")";
}

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<double> sample_rate;
  std::string out;
  bool csv = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Random seed for simulated noise");
  cmd->add_option("--sample-rate", c.sample_rate, "Simulation sample rate, Hz");
  cmd->add_option("--out", c.out, "Output file ('-' for standard output)");
  cmd->add_flag("--csv", c.csv, "Print results as CSV on standard output");
}

Plant load_plant(const std::string& path, const Common& common) {
  vs_plant* raw = nullptr;
  check(path.empty() ? vs_plant_default(&raw) : vs_plant_read(path.c_str(), &raw));
  Plant plant(raw);
  if (common.seed || common.sample_rate) {
    vs_plant* adjusted = nullptr;
    check(vs_plant_with(plant.get(), common.seed.value_or(vs_plant_seed(plant.get())),
                        common.sample_rate.value_or(0.0), &adjusted));
    plant.reset(adjusted);
  }
  return plant;
}

Map load_map(const std::string& path) {
  vs_map* raw = nullptr;
  check(vs_map_read(path.c_str(), &raw));
  return Map(raw);
}

// Zero-based mode list from "1,2", "all" or "none".
std::vector<std::size_t> parse_modes(const std::string& text, std::size_t available) {
  std::vector<std::size_t> modes;
  if (text == "none") return modes;
  if (text == "all" || text.empty()) {
    for (std::size_t m = 0; m < available; ++m) modes.push_back(m);
    return modes;
  }
  for (double v : parse_list(text)) {
    if (v < 1 || v != std::floor(v) || static_cast<std::size_t>(v) > available) {
      throw Failure{VS_ERR_INPUT, "mode " + fmt("%g", v) + " is not in 1.." + std::to_string(available)};
    }
    modes.push_back(static_cast<std::size_t>(v) - 1);
  }
  return modes;
}

// ---- identify -----------------------------------------------------------------

struct IdentifyArgs {
  Common common;
  std::string trace;
  std::optional<double> motion_end;
  vs_identify_options opts{};
  std::string spectrum_out;
  bool estimate_k0 = false;
};

int run_identify(const IdentifyArgs& a) {
  vs_trace* raw = nullptr;
  check(vs_trace_read_csv(a.trace.c_str(), a.motion_end.value_or(std::numeric_limits<double>::quiet_NaN()), &raw));
  Trace trace(raw);
  std::vector<vs_peak> peaks(static_cast<std::size_t>(std::max(a.opts.max_modes, 1)));
  std::size_t count = 0;
  check(vs_identify(trace.get(), &a.opts, peaks.data(), peaks.size(), &count,
                    a.spectrum_out.empty() ? nullptr : a.spectrum_out.c_str()));
  peaks.resize(count);

  std::vector<double> k0s;
  if (a.estimate_k0) {
    for (const auto& p : peaks) {
      double k0 = 1.0;
      // Falls back to k0 = 1 when the estimate fails.
      if (vs_estimate_k0(trace.get(), p.frequency_hz, a.opts.lowest_mode_hz, &k0) != VS_OK) k0 = 1.0;
      k0s.push_back(k0);
    }
  }

  std::string csv = "mode,frequency_hz,magnitude" + std::string(a.estimate_k0 ? ",k0" : "") + "\n";
  std::string text;
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    csv += std::to_string(i + 1) + "," + fmt("%.17g", peaks[i].frequency_hz) + "," + fmt("%.17g", peaks[i].magnitude);
    text += "mode " + std::to_string(i + 1) + ": " + fmt("%.3f", peaks[i].frequency_hz) + " Hz  (magnitude " +
            fmt("%.6g", peaks[i].magnitude) + ")";
    if (a.estimate_k0) {
      csv += "," + fmt("%.17g", k0s[i]);
      text += "  k0 " + fmt("%.4f", k0s[i]);
    }
    csv += "\n";
    text += "\n";
  }
  if (!a.common.out.empty()) {
    std::FILE* f = a.common.out == "-" ? stdout : std::fopen(a.common.out.c_str(), "w");
    if (!f) throw Failure{VS_ERR_IO, "cannot write '" + a.common.out + "'"};
    std::fputs(csv.c_str(), f);
    if (f != stdout) std::fclose(f);
  }
  std::fputs((a.common.csv ? csv : text).c_str(), stdout);
  return kOk;
}

// ---- map-build ----------------------------------------------------------------

struct MapBuildArgs {
  Common common;
  std::string plant;
  std::string traces;
  std::string save_traces;
  std::vector<std::string> axes;
  std::string step_from = "-30,-30";
  vs_identify_options identify{};
  double k0 = 1.0;
  double pre_time = 1.0;
  double hold_time = 20.0;
};

void print_map_summary(const vs_map* map, bool csv) {
  const std::size_t dim = vs_map_dimension(map);
  const std::size_t modes = vs_map_modes(map);
  std::size_t nodes = 1;
  for (std::size_t k = 0; k < dim; ++k) nodes *= vs_map_axis_size(map, k);
  std::string out;
  if (csv) {
    for (std::size_t k = 0; k < dim; ++k) out += "joint" + std::to_string(k + 1) + "_deg,";
    for (std::size_t m = 0; m < modes; ++m) out += "mode" + std::to_string(m + 1) + "_hz" + (m + 1 < modes ? "," : "");
    out += "\n";
  } else {
    out += "map: " + std::to_string(nodes) + " nodes, " + std::to_string(modes) + " mode(s)\n";
  }
  for (std::size_t flat = 0; flat < nodes; ++flat) {
    std::vector<double> pose(dim);
    std::size_t rest = flat;
    for (std::size_t k = dim; k-- > 0;) {
      const std::size_t n = vs_map_axis_size(map, k);
      check(vs_map_axis_value(map, k, rest % n, &pose[k]));
      rest /= n;
    }
    std::string line = csv ? "" : "  " + pose_text(pose) + ":";
    if (csv) {
      for (double q : pose) line += fmt("%g", q) + ",";
    }
    for (std::size_t m = 0; m < modes; ++m) {
      double f = 0.0;
      check(vs_map_node_value(map, m, flat, &f));
      line += csv ? fmt("%.17g", f) + (m + 1 < modes ? "," : "") : "  " + fmt("%.4f", f) + " Hz";
    }
    out += line + "\n";
  }
  std::fputs(out.c_str(), stdout);
}

int run_map_build(const MapBuildArgs& a) {
  std::vector<double> values;
  std::vector<std::size_t> sizes;
  const std::vector<std::string> axes = a.axes.empty() ? std::vector<std::string>{"0,30,60,90", "0,30,60,90"} : a.axes;
  for (const auto& text : axes) {
    const auto axis = parse_list(text);
    values.insert(values.end(), axis.begin(), axis.end());
    sizes.push_back(axis.size());
  }
  const auto from = parse_list(a.step_from);
  if (from.size() != sizes.size()) throw Failure{VS_ERR_INPUT, "--step-from needs one angle per --axis"};

  vs_campaign_options opts;
  vs_campaign_options_default(&opts);
  opts.axis_values = values.data();
  opts.axis_sizes = sizes.data();
  opts.joints = sizes.size();
  opts.step_from = from.data();
  opts.pre_time = a.pre_time;
  opts.hold_time = a.hold_time;
  opts.k0 = a.k0;
  opts.identify = a.identify;

  vs_map* raw = nullptr;
  if (!a.traces.empty()) {
    check(vs_campaign_from_dir(a.traces.c_str(), &opts, &raw));
  } else {
    const auto plant = load_plant(a.plant, a.common);
    check(vs_campaign_simulate(plant.get(), &opts, a.save_traces.empty() ? nullptr : a.save_traces.c_str(), &raw));
  }
  Map map(raw);
  if (!a.common.out.empty()) check(vs_map_write(map.get(), a.common.out.c_str()));
  if (a.common.out != "-") print_map_summary(map.get(), a.common.csv);
  return kOk;
}

// ---- map-query ----------------------------------------------------------------

struct MapQueryArgs {
  Common common;
  std::string map;
  std::string pose;
  int mode = 0;  // 1-based; 0 = all
  bool extrapolate = false;
  double k0 = 1.0;
};

int run_map_query(const MapQueryArgs& a) {
  const auto map = load_map(a.map);
  const auto pose = parse_list(a.pose);
  const std::size_t modes = vs_map_modes(map.get());
  std::vector<std::size_t> list;
  if (a.mode == 0) {
    for (std::size_t m = 0; m < modes; ++m) list.push_back(m);
  } else {
    list = parse_modes(std::to_string(a.mode), modes);
  }
  std::string out = a.common.csv ? "mode,frequency_hz,t0_s,k0,extrapolated\n" : "";
  for (std::size_t m : list) {
    double hz = 0.0;
    int extrapolated = 0;
    if (a.extrapolate) {
      check(vs_map_extrapolate(map.get(), pose.data(), pose.size(), m, 0.0, &hz, &extrapolated));
    } else {
      check(vs_map_interpolate(map.get(), pose.data(), pose.size(), m, &hz));
    }
    double t0 = 0.0, k0 = 0.0;
    check(vs_map_shaper_params(map.get(), pose.data(), pose.size(), m, a.k0, a.extrapolate ? 1 : 0, &t0, &k0));
    if (a.common.csv) {
      out += std::to_string(m + 1) + "," + fmt("%.17g", hz) + "," + fmt("%.17g", t0) + "," + fmt("%.17g", k0) + "," +
             std::to_string(extrapolated) + "\n";
    } else {
      out += "mode " + std::to_string(m + 1) + ": " + fmt("%.4f", hz) + " Hz  t0 " + fmt("%.6f", t0) + " s  k0 " +
             fmt("%.4g", k0) + (extrapolated ? "  (extrapolated)" : "") + "\n";
    }
  }
  std::fputs(out.c_str(), stdout);
  return kOk;
}

// ---- shape --------------------------------------------------------------------

struct ShapeArgs {
  Common common;
  std::string map;
  std::string traj;
  std::string pose;
  std::string modes = "all";
  bool extrapolate = false;
  double k0 = 1.0;
};

int run_shape(const ShapeArgs& a) {
  const auto map = load_map(a.map);
  vs_trajectory* raw = nullptr;
  check(vs_trajectory_read_csv(a.traj.c_str(), &raw));
  Traj traj(raw);

  std::vector<double> pose;
  if (a.pose.empty()) {
    // The motion's end pose selects the shaper.
    const std::size_t n = vs_trajectory_length(traj.get());
    for (std::size_t c = 0; c < vs_trajectory_channels(traj.get()); ++c) {
      double v = 0.0;
      check(vs_trajectory_sample(traj.get(), c, n - 1, &v));
      pose.push_back(v);
    }
  } else {
    pose = parse_list(a.pose);
  }
  const auto modes = parse_modes(a.modes, vs_map_modes(map.get()));
  vs_shaper* sraw = nullptr;
  check(vs_map_design_shaper(map.get(), pose.data(), pose.size(), modes.data(), modes.size(), a.k0,
                             a.extrapolate ? 1 : 0, &sraw));
  Shaper shaper(sraw);
  vs_trajectory* shaped_raw = nullptr;
  check(vs_shaper_apply(shaper.get(), traj.get(), &shaped_raw));
  Traj shaped(shaped_raw);

  const std::string target = a.common.out.empty() ? (a.common.csv ? "-" : "") : a.common.out;
  if (target.empty()) throw Failure{VS_ERR_INPUT, "shape needs --out FILE or --csv"};
  check(vs_trajectory_write_csv(shaped.get(), target.c_str()));
  std::FILE* msg = target == "-" ? stderr : stdout;
  std::fprintf(msg, "pose %s, %zu shaper(s), total delay %.6f s\n", pose_text(pose).c_str(), modes.size(),
               vs_shaper_total_delay(shaper.get()));
  return kOk;
}

// ---- verify -------------------------------------------------------------------

struct VerifyArgs {
  Common common;
  std::string plant;
  std::string map;
  std::vector<std::string> positions;
  bool reference = false;
  std::string step_from;
  double settle_guard = 0.0;
  double pre_time = 1.0;
  double hold_time = 20.0;
  double k0 = 1.0;
  bool extrapolate = false;
};

int run_verify(const VerifyArgs& a) {
  const auto plant = load_plant(a.plant, a.common);
  const auto map = load_map(a.map);
  const std::size_t joints = vs_map_dimension(map.get());

  std::vector<std::string> labels;
  std::vector<double> poses;
  if (a.reference) {
    labels = {"A", "B", "C"};
    poses = {45, 45, 15, 15, 75, 60};
  }
  for (const auto& spec : a.positions) {
    const auto eq = spec.find('=');
    const std::string label = eq == std::string::npos ? "P" + std::to_string(labels.size() + 1) : spec.substr(0, eq);
    const auto pose = parse_list(eq == std::string::npos ? spec : spec.substr(eq + 1));
    if (pose.size() != joints) throw Failure{VS_ERR_INPUT, "position '" + spec + "' does not match the map's joints"};
    labels.push_back(label);
    poses.insert(poses.end(), pose.begin(), pose.end());
  }
  std::vector<const char*> label_ptrs;
  for (const auto& l : labels) label_ptrs.push_back(l.c_str());

  vs_verify_options opts;
  vs_verify_options_default(&opts);
  std::vector<double> from;
  if (!a.step_from.empty()) {
    from = parse_list(a.step_from);
    if (from.size() != joints) throw Failure{VS_ERR_INPUT, "--step-from does not match the map's joints"};
    opts.step_from = from.data();
  }
  opts.settle_guard = a.settle_guard;
  opts.pre_time = a.pre_time;
  opts.hold_time = a.hold_time;
  opts.k0_fixed = a.k0;
  opts.allow_extrapolation = a.extrapolate ? 1 : 0;

  vs_report* raw = nullptr;
  check(vs_verify(plant.get(), map.get(), label_ptrs.data(), poses.data(), joints, labels.size(), &opts, &raw));
  Report report(raw);
  if (!a.common.out.empty()) check(vs_report_write_csv(report.get(), a.common.out.c_str()));
  if (a.common.out != "-") std::fputs(a.common.csv ? vs_report_csv(report.get()) : vs_report_table(report.get()), stdout);
  return kOk;
}

// ---- bode ---------------------------------------------------------------------

struct BodeArgs {
  Common common;
  std::vector<double> t0;
  std::vector<double> freq;
  double k0 = 1.0;
  std::string map;
  std::string pose;
  std::string modes = "all";
  double f_min = 0.1;
  double f_max = 10.0;
  std::size_t points = 1000;
};

int run_bode(const BodeArgs& a) {
  vs_shaper* raw = nullptr;
  check(vs_shaper_identity(&raw));
  Shaper shaper(raw);
  const auto chain = [&](double t0) {
    vs_shaper* zv = nullptr;
    check(vs_shaper_zv(t0, a.k0, &zv));
    Shaper stage(zv);
    vs_shaper* next = nullptr;
    check(vs_shaper_cascade(shaper.get(), stage.get(), &next));
    shaper.reset(next);
  };
  std::vector<double> delays = a.t0;
  for (double f : a.freq) {
    if (!(f > 0.0)) throw Failure{VS_ERR_INPUT, "--freq must be positive"};
    delays.push_back(1.0 / (2.0 * f));
  }
  for (double t0 : delays) chain(t0);
  if (!a.map.empty()) {
    const auto map = load_map(a.map);
    const auto pose = parse_list(a.pose);
    const auto modes = parse_modes(a.modes, vs_map_modes(map.get()));
    vs_shaper* designed = nullptr;
    check(vs_map_design_shaper(map.get(), pose.data(), pose.size(), modes.data(), modes.size(), a.k0, 0, &designed));
    Shaper d(designed);
    vs_shaper* next = nullptr;
    check(vs_shaper_cascade(shaper.get(), d.get(), &next));
    shaper.reset(next);
  }

  std::vector<double> f(a.points), mag(a.points), phase(a.points);
  check(vs_shaper_bode(shaper.get(), a.f_min, a.f_max, a.points, f.data(), mag.data(), phase.data()));
  std::string csv = "frequency_hz,magnitude_db,phase_deg\n";
  for (std::size_t i = 0; i < a.points; ++i) {
    csv += fmt("%.17g", f[i]) + "," + fmt("%.17g", mag[i]) + "," + fmt("%.17g", phase[i]) + "\n";
  }
  if (a.common.out.empty() || a.common.out == "-") {
    std::fputs(csv.c_str(), stdout);
    return kOk;
  }
  std::FILE* file = std::fopen(a.common.out.c_str(), "w");
  if (!file) throw Failure{VS_ERR_IO, "cannot write '" + a.common.out + "'"};
  std::fputs(csv.c_str(), file);
  std::fclose(file);
  if (a.common.csv) std::fputs(csv.c_str(), stdout);
  return kOk;
}

// ---- simulate -----------------------------------------------------------------

struct SimulateArgs {
  Common common;
  std::string plant;
  std::string traj;
  std::string step_from = "0,0";
  std::string step_to;
  double pre_time = 1.0;
  double hold_time = 20.0;
  std::string trace_out;
  double settle_guard = 0.0;
};

int run_simulate(const SimulateArgs& a) {
  const auto plant = load_plant(a.plant, a.common);
  vs_trajectory* raw = nullptr;
  if (!a.traj.empty()) {
    check(vs_trajectory_read_csv(a.traj.c_str(), &raw));
  } else {
    if (a.step_to.empty()) throw Failure{VS_ERR_INPUT, "simulate needs --traj FILE or --step-to POSE"};
    const auto from = parse_list(a.step_from);
    const auto to = parse_list(a.step_to);
    if (from.size() != to.size()) throw Failure{VS_ERR_INPUT, "--step-from and --step-to differ in length"};
    check(vs_trajectory_step(from.data(), to.data(), to.size(), vs_plant_sample_rate(plant.get()), a.pre_time,
                             a.hold_time, &raw));
  }
  Traj command(raw);
  vs_sim_result* sraw = nullptr;
  check(vs_simulate(plant.get(), command.get(), &sraw));
  Sim result(sraw);

  const std::string target = a.common.out.empty() && a.common.csv ? "-" : a.common.out;
  if (!target.empty()) check(vs_sim_result_write_csv(result.get(), target.c_str()));
  if (!a.trace_out.empty()) {
    vs_trace* traw = nullptr;
    check(vs_sim_result_trace(result.get(), &traw));
    Trace trace(traw);
    check(vs_trace_write_csv(trace.get(), a.trace_out.c_str()));
  }
  std::FILE* msg = target == "-" ? stderr : stdout;
  std::fprintf(msg, "command end %.6f s\n", vs_sim_result_command_end(result.get()));
  double p2p = 0.0;
  if (vs_sim_result_residual(result.get(), a.settle_guard, &p2p) == VS_OK) {
    std::fprintf(msg, "residual peak-to-peak %.4f mm\n", p2p);
  } else {
    std::fprintf(msg, "residual peak-to-peak unavailable: %s\n", vs_last_error());
  }
  return kOk;
}

void add_identify_options(CLI::App* cmd, vs_identify_options& o) {
  cmd->add_option("--max-modes", o.max_modes, "Maximum number of modes")->check(CLI::PositiveNumber);
  cmd->add_option("--prominence", o.min_prominence, "Minimum peak prominence as a fraction of the highest peak");
  cmd->add_option("--low-cutoff", o.low_cutoff_hz, "Ignore spectrum below this frequency, Hz");
  cmd->add_option("--pad", o.zero_pad_factor, "Zero-pad factor")->check(CLI::PositiveNumber);
  cmd->add_option("--lowest-mode", o.lowest_mode_hz, "Lowest expected mode, Hz (residual must span 2 periods)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven input shaping for flexible arms"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(vs_version()));

  IdentifyArgs identify;
  vs_identify_options_default(&identify.opts);
  auto* c_identify = app.add_subcommand("identify", "Find mode frequencies in an acceleration trace");
  add_common(c_identify, identify.common);
  c_identify->add_option("trace", identify.trace, "Trace CSV (time_s,accel)")->required();
  c_identify->add_option("--motion-end", identify.motion_end, "Motion end time, s (overrides the file)");
  c_identify->add_option("--spectrum", identify.spectrum_out, "Write the magnitude spectrum CSV here");
  c_identify->add_flag("--estimate-k0", identify.estimate_k0, "Also estimate each mode's damping factor");
  add_identify_options(c_identify, identify.opts);

  MapBuildArgs build;
  vs_identify_options_default(&build.identify);
  auto* c_build = app.add_subcommand("map-build", "Run a campaign and build the frequency map");
  add_common(c_build, build.common);
  c_build->add_option("--plant", build.plant, "Plant JSON (default: built-in two-mode arm)");
  c_build->add_option("--traces", build.traces, "Directory of recorded traces trace_<q1>_<q2>.csv");
  c_build->add_option("--save-traces", build.save_traces, "Write simulated campaign traces here");
  c_build->add_option("--axis", build.axes, "Grid angles for one joint, e.g. 0,30,60,90 (repeat per joint)");
  c_build->add_option("--step-from", build.step_from, "Pose every grid node is stepped from")->capture_default_str();
  c_build->add_option("--k0", build.k0, "Damping factor stored in the map")->capture_default_str();
  c_build->add_option("--pre-time", build.pre_time, "Rest before each step, s")->capture_default_str();
  c_build->add_option("--hold-time", build.hold_time, "Recording after each step, s")->capture_default_str();
  add_identify_options(c_build, build.identify);

  MapQueryArgs query;
  auto* c_query = app.add_subcommand("map-query", "Interpolate mode frequencies and shaper parameters");
  add_common(c_query, query.common);
  c_query->add_option("--map", query.map, "Map JSON")->required();
  c_query->add_option("--pose", query.pose, "Joint angles, degrees")->required();
  c_query->add_option("--mode", query.mode, "Mode number (1-based); default all");
  c_query->add_flag("--extrapolate", query.extrapolate, "Allow poses up to one cell outside the grid");
  c_query->add_option("--k0", query.k0, "Fixed damping factor; 0 uses the map's")->capture_default_str();

  ShapeArgs shape;
  auto* c_shape = app.add_subcommand("shape", "Shape a joint trajectory for its end pose");
  add_common(c_shape, shape.common);
  c_shape->add_option("--map", shape.map, "Map JSON")->required();
  c_shape->add_option("--traj", shape.traj, "Trajectory CSV (time_s,joint1_deg,...)")->required();
  c_shape->add_option("--pose", shape.pose, "Target pose (default: the trajectory's last sample)");
  c_shape->add_option("--modes", shape.modes, "Modes to suppress: list, 'all' or 'none'")->capture_default_str();
  c_shape->add_flag("--extrapolate", shape.extrapolate, "Allow poses up to one cell outside the grid");
  c_shape->add_option("--k0", shape.k0, "Fixed damping factor; 0 uses the map's")->capture_default_str();

  VerifyArgs ver;
  auto* c_verify = app.add_subcommand("verify", "Compare shaped and unshaped motions on the simulator");
  add_common(c_verify, ver.common);
  c_verify->add_option("--plant", ver.plant, "Plant JSON (default: built-in two-mode arm)");
  c_verify->add_option("--map", ver.map, "Map JSON")->required();
  c_verify->add_option("--position", ver.positions, "Labelled pose LABEL=q1,q2 (repeatable)");
  c_verify->add_flag("--reference-positions", ver.reference, "Add positions A(45,45), B(15,15), C(75,60)");
  c_verify->add_option("--step-from", ver.step_from, "Start pose of every motion (default all zeros)");
  c_verify->add_option("--settle-guard", ver.settle_guard, "Skip this long after the command ends, s")->capture_default_str();
  c_verify->add_option("--pre-time", ver.pre_time, "Rest before each step, s")->capture_default_str();
  c_verify->add_option("--hold-time", ver.hold_time, "Time after each step, s")->capture_default_str();
  c_verify->add_option("--k0", ver.k0, "Fixed damping factor; 0 uses the map's")->capture_default_str();
  c_verify->add_flag("--extrapolate", ver.extrapolate, "Allow positions up to one cell outside the grid");

  BodeArgs bode_args;
  auto* c_bode = app.add_subcommand("bode", "Frequency response of a shaper or cascade");
  add_common(c_bode, bode_args.common);
  c_bode->add_option("--t0", bode_args.t0, "Impulse spacing of one stage, s (repeatable)");
  c_bode->add_option("--freq", bode_args.freq, "Suppressed frequency of one stage, Hz (repeatable)");
  c_bode->add_option("--k0", bode_args.k0, "Damping factor of every stage")->capture_default_str();
  c_bode->add_option("--map", bode_args.map, "Design the cascade from this map");
  c_bode->add_option("--pose", bode_args.pose, "Pose for --map");
  c_bode->add_option("--modes", bode_args.modes, "Modes for --map")->capture_default_str();
  c_bode->add_option("--f-min", bode_args.f_min, "Lowest frequency, Hz")->capture_default_str();
  c_bode->add_option("--f-max", bode_args.f_max, "Highest frequency, Hz")->capture_default_str();
  c_bode->add_option("--points", bode_args.points, "Number of frequencies")->capture_default_str();

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Run the simulated arm on a command");
  add_common(c_sim, sim.common);
  c_sim->add_option("--plant", sim.plant, "Plant JSON (default: built-in two-mode arm)");
  c_sim->add_option("--traj", sim.traj, "Command trajectory CSV");
  c_sim->add_option("--step-from", sim.step_from, "Step start pose")->capture_default_str();
  c_sim->add_option("--step-to", sim.step_to, "Step end pose (used without --traj)");
  c_sim->add_option("--pre-time", sim.pre_time, "Rest before the step, s")->capture_default_str();
  c_sim->add_option("--hold-time", sim.hold_time, "Time after the step, s")->capture_default_str();
  c_sim->add_option("--trace-out", sim.trace_out, "Write the acceleration as a trace CSV");
  c_sim->add_option("--settle-guard", sim.settle_guard, "Residual window offset, s")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kFailure;
  }

  try {
    if (*c_identify) return run_identify(identify);
    if (*c_build) return run_map_build(build);
    if (*c_query) return run_map_query(query);
    if (*c_shape) return run_shape(shape);
    if (*c_verify) return run_verify(ver);
    if (*c_bode) return run_bode(bode_args);
    if (*c_sim) return run_simulate(sim);
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s: %s\n", vs_status_name(f.status), f.message.c_str());
    return exit_code_for(f.status);
  }
  return kFailure;
}
