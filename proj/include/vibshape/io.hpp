#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vibshape/arm_sim.hpp"
#include "vibshape/freq_map.hpp"
#include "vibshape/modal_ident.hpp"
#include "vibshape/pipeline.hpp"
#include "vibshape/shaper.hpp"

// Text formats. Numbers are written with 17 significant digits so that every
// double survives a write/read cycle unchanged.
//
//   trace CSV       header `time_s,accel`; optional `# motion_end_s=<v>` line
//   trajectory CSV  header `time_s,joint1_deg,joint2_deg,...`
//   map JSON        version, joint_axes, modes, values, k0, metadata
//   plant JSON      sample_rate, noise_std, noise_relative, seed, rigid_gain, modes
namespace vibshape::io {

std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// `motion_end` overrides any `# motion_end_s=` comment. Time steps must be
/// uniform. Throws Error(Parse) on malformed input.
AccelTrace parse_trace_csv(const std::string& text, std::optional<double> motion_end = std::nullopt);
std::string trace_to_csv(const AccelTrace& trace);

Trajectory parse_trajectory_csv(const std::string& text);
std::string trajectory_to_csv(const Trajectory& traj);

FrequencyMap parse_map_json(const std::string& text);
std::string map_to_json(const FrequencyMap& map);

/// Accepts `"preset": "default"` to start from default_plant(); explicit
/// fields override it.
SimConfig parse_plant_json(const std::string& text);
std::string plant_to_json(const SimConfig& config);

std::string spectrum_to_csv(const FrequencySpectrum& spec);
std::string peaks_to_csv(const std::vector<ModePeak>& peaks);
std::string bode_to_csv(const std::vector<BodePoint>& points);
std::string sim_result_to_csv(const SimResult& result);
std::string report_to_csv(const std::vector<ReportRow>& rows);
/// Fixed-width table with the same columns as the CSV.
std::string report_to_table(const std::vector<ReportRow>& rows);

/// File name used for a campaign trace recorded at `pose`, e.g. trace_45_60.csv.
std::string campaign_trace_name(const JointPose& pose);

}  // namespace vibshape::io
