#include <cmath>
#include <filesystem>
#include <functional>
#include <random>

#include "doctest.h"
#include "vibshape/error.hpp"
#include "vibshape/io.hpp"

using namespace vibshape;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("doubles survive formatting") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) / 3.0;
    CHECK(std::stod(io::format_double(v)) == v);
  }
}

TEST_CASE("trace csv round trip") {
  AccelTrace tr{100.0, 0.0, {}, 1.0};
  for (int i = 0; i < 300; ++i) tr.samples.push_back(std::sin(0.1 * i) / 7.0);
  const auto text = io::trace_to_csv(tr);
  auto back = io::parse_trace_csv(text);
  CHECK(back.samples == tr.samples);
  CHECK(back.sample_rate == 100.0);
  CHECK(back.motion_end_time == 1.0);
  CHECK(io::trace_to_csv(back) == text);
  CHECK(io::parse_trace_csv(text, 2.0).motion_end_time == 2.0);
}

TEST_CASE("trace csv errors") {
  CHECK(code_of([] { io::parse_trace_csv("t,a\n0,1\n0.01,2\n", 0.0); }) == ErrorCode::Parse);
  CHECK(code_of([] { io::parse_trace_csv("time_s,accel\n0,1\n0.01,x\n", 0.0); }) == ErrorCode::Parse);
  CHECK(code_of([] { io::parse_trace_csv("time_s,accel\n0,1\n0.01,2\n0.03,3\n", 0.0); }) == ErrorCode::Parse);
  CHECK(code_of([] { io::parse_trace_csv("time_s,accel\n0,1\n0.01\n", 0.0); }) == ErrorCode::Parse);
  CHECK(code_of([] { io::parse_trace_csv("time_s,accel\n0,1\n0.01,2\n"); }) == ErrorCode::Input);
}

TEST_CASE("trajectory csv round trip") {
  auto s = step_command({{0.0, 10.0}}, {{45.0, 60.0}}, 100.0, {0.5, 1.0});
  s.start_time = -0.25;
  const auto text = io::trajectory_to_csv(s);
  CHECK(text.rfind("time_s,joint1_deg,joint2_deg\n", 0) == 0);
  auto back = io::parse_trajectory_csv(text);
  CHECK(back.channels == s.channels);
  CHECK(back.start_time == s.start_time);
  CHECK(back.sample_rate == 100.0);
  CHECK(io::trajectory_to_csv(back) == text);
}

TEST_CASE("map json round trip") {
  FrequencyMap map({{0.0, 30.0}, {0.0, 45.0, 90.0}}, {{1.1, 1.2, 1.3, 1.4, 1.5, 1.6}, {2.1, 2.2, 2.3, 2.4, 2.5, 2.6}},
                   std::vector<std::vector<double>>{{0.9, 0.91, 0.92, 0.93, 0.94, 0.95}, {1, 1, 1, 1, 1, 1}}, 1.0,
                   {{"source", "test"}});
  const auto text = io::map_to_json(map);
  auto back = io::parse_map_json(text);
  CHECK(back.axes() == map.axes());
  CHECK(back.all_values() == map.all_values());
  CHECK(back.has_k0_grid());
  CHECK(back.k0_grid() == map.k0_grid());
  CHECK(back.metadata() == map.metadata());
  CHECK(io::map_to_json(back) == text);

  FrequencyMap scalar({{0.0, 1.0}}, {{2.0, 2.5}}, std::nullopt, 0.97);
  auto sb = io::parse_map_json(io::map_to_json(scalar));
  CHECK_FALSE(sb.has_k0_grid());
  CHECK(sb.k0_scalar() == 0.97);
}

TEST_CASE("map json errors") {
  CHECK(code_of([] { io::parse_map_json("{"); }) == ErrorCode::Parse);
  CHECK(code_of([] { io::parse_map_json(R"({"version":1})"); }) == ErrorCode::Parse);
  CHECK(code_of([] {
          io::parse_map_json(R"({"version":1,"joint_axes":[[0,1]],"modes":1,"values":[[1,-2]],"k0":1})");
        }) == ErrorCode::Input);
}

TEST_CASE("plant json round trip") {
  auto plant = default_plant();
  plant.noise_std = 0.25;
  const auto text = io::plant_to_json(plant);
  auto back = io::parse_plant_json(text);
  CHECK(io::plant_to_json(back) == text);
  CHECK(back.modes.size() == 2);
  CHECK(evaluate(back.modes[1].frequency, {{45.0, 60.0}}) == doctest::Approx(3.8));

  auto preset = io::parse_plant_json(R"({"preset":"default","seed":9})");
  CHECK(preset.seed == 9);
  CHECK(preset.modes.size() == 2);

  auto c = io::parse_plant_json(
      R"({"sample_rate":200,"modes":[{"frequency":{"type":"constant","hz":2.5},"zeta":0,"gain_mm_per_deg":2}]})");
  CHECK(c.sample_rate == 200.0);
  CHECK(evaluate(c.modes[0].frequency, {{1.0}}) == 2.5);
  CHECK(code_of([] { io::parse_plant_json(R"({"modes":[{"frequency":{"type":"cubic"}}]})"); }) == ErrorCode::Parse);
}

TEST_CASE("report output") {
  std::vector<ReportRow> rows{{"A", {{45.0, 45.0}}, 304.0, 29.8, 100.0 * (1 - 29.8 / 304.0)}};
  const auto csv = io::report_to_csv(rows);
  CHECK(csv.rfind("position,joint1_deg,joint2_deg,amplitude_without_mm,amplitude_with_mm,reduction_pct\n", 0) == 0);
  const auto table = io::report_to_table(rows);
  CHECK(table.find("90.2%") != std::string::npos);
  CHECK(table.find("304.0 mm") != std::string::npos);
}

TEST_CASE("file helpers") {
  const auto dir = std::filesystem::temp_directory_path() / "vibshape_io_test";
  std::filesystem::create_directories(dir);
  io::write_text_file(dir / "a.txt", "hello\n");
  CHECK(io::read_text_file(dir / "a.txt") == "hello\n");
  io::write_text_file(dir / "a.txt", "again\n");
  CHECK(io::read_text_file(dir / "a.txt") == "again\n");
  CHECK(code_of([&] { io::read_text_file(dir / "missing.txt"); }) == ErrorCode::Io);
  std::filesystem::remove_all(dir);
  CHECK(io::campaign_trace_name({{45.0, 60.0}}) == "trace_45_60.csv");
  CHECK(io::campaign_trace_name({{-30.0, 7.5}}) == "trace_-30_7.5.csv");
}
