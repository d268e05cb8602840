#include "vibshape/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "vibshape/error.hpp"

namespace vibshape::io {

namespace {

using ojson = nlohmann::ordered_json;

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::Parse, what); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    out.push_back(trim(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  // from_chars rejects a leading '+'.
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty() || !std::isfinite(v)) {
    parse_error("line " + std::to_string(line_no) + ": '" + std::string(field) + "' is not a number");
  }
  return v;
}

struct Table {
  std::vector<std::string_view> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> comments;  // key=value pairs
};

Table parse_table(const std::string& text) {
  Table t;
  std::string_view all(text);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= all.size()) {
    const auto nl = all.find('\n', pos);
    const auto raw = all.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? all.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string_view::npos) {
        t.comments.emplace_back(std::string(trim(body.substr(0, eq))), std::string(trim(body.substr(eq + 1))));
      }
      continue;
    }
    if (t.header.empty()) {
      t.header = split(line, ',');
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != t.header.size()) {
      parse_error("line " + std::to_string(line_no) + ": expected " + std::to_string(t.header.size()) +
                  " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) row.push_back(parse_number(f, line_no));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) parse_error("missing CSV header");
  return t;
}

// Uniform time column -> (start, rate).
std::pair<double, double> uniform_timing(const Table& t) {
  const std::size_t n = t.rows.size();
  if (n < 2) parse_error("need at least 2 samples, found " + std::to_string(n));
  const double t0 = t.rows.front()[0];
  const double dt = (t.rows.back()[0] - t0) / static_cast<double>(n - 1);
  if (!(dt > 0.0)) parse_error("time column must increase");
  for (std::size_t i = 0; i < n; ++i) {
    const double expected = t0 + static_cast<double>(i) * dt;
    if (std::abs(t.rows[i][0] - expected) > 1e-6 * dt + 1e-12) {
      parse_error("time steps are not uniform at sample " + std::to_string(i));
    }
  }
  double rate = 1.0 / dt;
  const double rounded = std::round(rate);
  if (std::abs(rate - rounded) <= 1e-9 * rate) rate = rounded;
  return {t0, rate};
}

std::vector<double> number_array(const ojson& j, const char* what) {
  if (!j.is_array()) parse_error(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) parse_error(std::string(what) + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::vector<double>> nested_array(const ojson& j, const char* what) {
  if (!j.is_array()) parse_error(std::string(what) + " must be an array of arrays");
  std::vector<std::vector<double>> out;
  for (const auto& v : j) out.push_back(number_array(v, what));
  return out;
}

ojson parse_json(const std::string& text) {
  try {
    return ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    parse_error(std::string("invalid JSON: ") + e.what());
  }
}

template <typename T>
T get_field(const ojson& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    parse_error(std::string("field '") + key + "' has the wrong type");
  }
}

ojson map_document(const FrequencyMap& map) {
  ojson doc;
  doc["version"] = 1;
  doc["joint_axes"] = map.axes();
  doc["modes"] = map.modes();
  doc["values"] = map.all_values();
  if (map.has_k0_grid()) {
    doc["k0"] = map.k0_grid();
  } else {
    doc["k0"] = map.k0_scalar();
  }
  ojson meta = ojson::object();
  for (const auto& [k, v] : map.metadata()) meta[k] = v;
  doc["metadata"] = meta;
  return doc;
}

FrequencyMap map_from_document(const ojson& doc) {
  if (!doc.is_object()) parse_error("map document must be a JSON object");
  for (const char* key : {"version", "joint_axes", "modes", "values", "k0"}) {
    if (!doc.contains(key)) parse_error(std::string("map document lacks '") + key + "'");
  }
  if (get_field<int>(doc, "version", 0) != 1) parse_error("unsupported map version");
  auto axes = nested_array(doc.at("joint_axes"), "joint_axes");
  auto values = nested_array(doc.at("values"), "values");
  const auto modes = get_field<std::size_t>(doc, "modes", 0);
  if (modes != values.size()) parse_error("'modes' does not match the number of value grids");
  std::optional<std::vector<std::vector<double>>> k0_grid;
  double k0 = 1.0;
  const auto& k0_field = doc.at("k0");
  if (k0_field.is_number()) {
    k0 = k0_field.get<double>();
  } else {
    k0_grid = nested_array(k0_field, "k0");
  }
  std::map<std::string, std::string> meta;
  if (doc.contains("metadata")) {
    const auto& m = doc.at("metadata");
    if (!m.is_object()) parse_error("metadata must be an object");
    for (const auto& [k, v] : m.items()) meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }
  return FrequencyMap(std::move(axes), std::move(values), std::move(k0_grid), k0, std::move(meta));
}

FrequencyFunction frequency_from_json(const ojson& j) {
  if (!j.is_object() || !j.contains("type")) parse_error("mode frequency needs a 'type'");
  const auto type = get_field<std::string>(j, "type", "");
  if (type == "constant") return ConstantFrequency{get_field<double>(j, "hz", 0.0)};
  if (type == "affine") {
    AffineFrequency f;
    f.base_hz = get_field<double>(j, "base_hz", 0.0);
    if (!j.contains("anchor_deg") || !j.contains("slopes_hz_per_deg")) {
      parse_error("affine frequency needs anchor_deg and slopes_hz_per_deg");
    }
    f.anchor = number_array(j.at("anchor_deg"), "anchor_deg");
    f.slopes = number_array(j.at("slopes_hz_per_deg"), "slopes_hz_per_deg");
    return f;
  }
  if (type == "map") {
    if (!j.contains("map")) parse_error("map frequency needs an embedded 'map' document");
    return MapFrequency{std::make_shared<const FrequencyMap>(map_from_document(j.at("map"))),
                        get_field<std::size_t>(j, "mode", 0)};
  }
  parse_error("unknown frequency type '" + type + "'");
}

ojson frequency_to_json(const FrequencyFunction& fn) {
  return std::visit(
      [](const auto& v) -> ojson {
        using T = std::decay_t<decltype(v)>;
        ojson j;
        if constexpr (std::is_same_v<T, ConstantFrequency>) {
          j["type"] = "constant";
          j["hz"] = v.hz;
        } else if constexpr (std::is_same_v<T, AffineFrequency>) {
          j["type"] = "affine";
          j["base_hz"] = v.base_hz;
          j["anchor_deg"] = v.anchor;
          j["slopes_hz_per_deg"] = v.slopes;
        } else {
          j["type"] = "map";
          j["mode"] = v.mode;
          if (v.map) j["map"] = map_document(*v.map);
        }
        return j;
      },
      fn);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "failed reading '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot replace '" + path.string() + "': " + ec.message());
}

AccelTrace parse_trace_csv(const std::string& text, std::optional<double> motion_end) {
  const auto t = parse_table(text);
  if (t.header.size() != 2 || t.header[0] != "time_s" || t.header[1] != "accel") {
    parse_error("trace header must be 'time_s,accel'");
  }
  if (!motion_end) {
    for (const auto& [k, v] : t.comments) {
      if (k == "motion_end_s") motion_end = parse_number(v, 0);
    }
  }
  if (!motion_end) throw Error(ErrorCode::Input, "motion end time not given (use --motion-end or '# motion_end_s=')");
  const auto [start, rate] = uniform_timing(t);
  AccelTrace trace;
  trace.sample_rate = rate;
  trace.start_time = start;
  trace.motion_end_time = *motion_end;
  trace.samples.reserve(t.rows.size());
  for (const auto& row : t.rows) trace.samples.push_back(row[1]);
  return trace;
}

std::string trace_to_csv(const AccelTrace& trace) {
  std::string s = "# motion_end_s=" + format_double(trace.motion_end_time) + "\ntime_s,accel\n";
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    s += format_double(trace.time_at(i)) + "," + format_double(trace.samples[i]) + "\n";
  }
  return s;
}

Trajectory parse_trajectory_csv(const std::string& text) {
  const auto t = parse_table(text);
  if (t.header.size() < 2 || t.header[0] != "time_s") {
    parse_error("trajectory header must be 'time_s,joint1_deg,...'");
  }
  const auto [start, rate] = uniform_timing(t);
  Trajectory traj;
  traj.sample_rate = rate;
  traj.start_time = start;
  traj.channels.assign(t.header.size() - 1, {});
  for (const auto& row : t.rows) {
    for (std::size_t c = 1; c < row.size(); ++c) traj.channels[c - 1].push_back(row[c]);
  }
  return traj;
}

std::string trajectory_to_csv(const Trajectory& traj) {
  std::string s = "time_s";
  for (std::size_t c = 0; c < traj.channels.size(); ++c) s += ",joint" + std::to_string(c + 1) + "_deg";
  s += "\n";
  for (std::size_t i = 0; i < traj.length(); ++i) {
    s += format_double(traj.time_at(i));
    for (const auto& ch : traj.channels) s += "," + format_double(ch[i]);
    s += "\n";
  }
  return s;
}

FrequencyMap parse_map_json(const std::string& text) { return map_from_document(parse_json(text)); }

std::string map_to_json(const FrequencyMap& map) { return map_document(map).dump(2) + "\n"; }

SimConfig parse_plant_json(const std::string& text) {
  const auto doc = parse_json(text);
  if (!doc.is_object()) parse_error("plant document must be a JSON object");
  SimConfig c;
  if (doc.contains("preset")) {
    if (get_field<std::string>(doc, "preset", "") != "default") parse_error("unknown plant preset");
    c = default_plant();
  }
  c.sample_rate = get_field<double>(doc, "sample_rate", c.sample_rate);
  c.noise_std = get_field<double>(doc, "noise_std", c.noise_std);
  c.noise_relative = get_field<double>(doc, "noise_relative", c.noise_relative);
  c.seed = get_field<std::uint64_t>(doc, "seed", c.seed);
  c.rigid_gain = get_field<double>(doc, "rigid_gain", c.rigid_gain);
  if (doc.contains("modes")) {
    const auto& modes = doc.at("modes");
    if (!modes.is_array()) parse_error("'modes' must be an array");
    c.modes.clear();
    for (const auto& m : modes) {
      ModeSpec spec;
      if (!m.contains("frequency")) parse_error("each mode needs a 'frequency'");
      spec.frequency = frequency_from_json(m.at("frequency"));
      spec.zeta = get_field<double>(m, "zeta", spec.zeta);
      spec.gain = get_field<double>(m, "gain_mm_per_deg", spec.gain);
      if (m.contains("joint_weights")) spec.joint_weights = number_array(m.at("joint_weights"), "joint_weights");
      c.modes.push_back(std::move(spec));
    }
  }
  c.validate();
  return c;
}

std::string plant_to_json(const SimConfig& config) {
  ojson doc;
  doc["sample_rate"] = config.sample_rate;
  doc["noise_std"] = config.noise_std;
  doc["noise_relative"] = config.noise_relative;
  doc["seed"] = config.seed;
  doc["rigid_gain"] = config.rigid_gain;
  ojson modes = ojson::array();
  for (const auto& m : config.modes) {
    ojson j;
    j["frequency"] = frequency_to_json(m.frequency);
    j["zeta"] = m.zeta;
    j["gain_mm_per_deg"] = m.gain;
    if (!m.joint_weights.empty()) j["joint_weights"] = m.joint_weights;
    modes.push_back(std::move(j));
  }
  doc["modes"] = std::move(modes);
  return doc.dump(2) + "\n";
}

std::string spectrum_to_csv(const FrequencySpectrum& spec) {
  std::string s = "frequency_hz,magnitude\n";
  for (std::size_t k = 0; k < spec.frequencies.size(); ++k) {
    s += format_double(spec.frequencies[k]) + "," + format_double(spec.magnitudes[k]) + "\n";
  }
  return s;
}

std::string peaks_to_csv(const std::vector<ModePeak>& peaks) {
  std::string s = "mode,frequency_hz,magnitude\n";
  for (const auto& p : peaks) {
    s += std::to_string(p.mode_index + 1) + "," + format_double(p.frequency) + "," + format_double(p.magnitude) + "\n";
  }
  return s;
}

std::string bode_to_csv(const std::vector<BodePoint>& points) {
  std::string s = "frequency_hz,magnitude_db,phase_deg\n";
  for (const auto& p : points) {
    s += format_double(p.frequency_hz) + "," + format_double(p.magnitude_db) + "," + format_double(p.phase_deg) + "\n";
  }
  return s;
}

std::string sim_result_to_csv(const SimResult& result) {
  std::string s = "# command_end_s=" + format_double(result.command_end_time) + "\n# mode_frequencies_hz=";
  for (std::size_t i = 0; i < result.mode_frequencies.size(); ++i) {
    s += (i ? ";" : "") + format_double(result.mode_frequencies[i]);
  }
  s += "\ntime_s,displacement_mm,accel\n";
  const auto& disp = result.tip_displacement;
  for (std::size_t i = 0; i < disp.length(); ++i) {
    s += format_double(disp.time_at(i)) + "," + format_double(disp.channels[0][i]) + "," +
         format_double(result.tip_acceleration.samples[i]) + "\n";
  }
  return s;
}

std::string report_to_csv(const std::vector<ReportRow>& rows) {
  std::size_t joints = 0;
  for (const auto& r : rows) joints = std::max(joints, r.pose.size());
  if (rows.empty()) joints = 2;
  std::string s = "position";
  for (std::size_t j = 0; j < joints; ++j) s += ",joint" + std::to_string(j + 1) + "_deg";
  s += ",amplitude_without_mm,amplitude_with_mm,reduction_pct\n";
  for (const auto& r : rows) {
    s += r.label;
    for (std::size_t j = 0; j < joints; ++j) s += "," + (j < r.pose.size() ? format_double(r.pose.joints[j]) : "");
    s += "," + format_double(r.amplitude_without) + "," + format_double(r.amplitude_with) + "," +
         format_double(r.reduction_percent) + "\n";
  }
  return s;
}

std::string report_to_table(const std::vector<ReportRow>& rows) {
  std::string s;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %-16s %22s %19s %10s\n", "Position", "Pose (deg)", "Amplitude without IS",
                "Amplitude with IS", "Reduction");
  s += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-10s %-16s %19.1f mm %16.1f mm %9.1f%%\n", r.label.c_str(),
                  r.pose.to_string().c_str(), r.amplitude_without, r.amplitude_with, r.reduction_percent);
    s += buf;
  }
  return s;
}

std::string campaign_trace_name(const JointPose& pose) {
  std::string s = "trace";
  char buf[32];
  for (double q : pose.joints) {
    std::snprintf(buf, sizeof buf, "_%g", q);
    s += buf;
  }
  return s + ".csv";
}

}  // namespace vibshape::io
