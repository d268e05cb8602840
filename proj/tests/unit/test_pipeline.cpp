#include <cmath>

#include "doctest.h"
#include "vibshape/error.hpp"
#include "vibshape/pipeline.hpp"

using namespace vibshape;

TEST_CASE("grid poses, first axis slowest") {
  auto g = grid_poses({{0.0, 1.0}, {5.0, 6.0, 7.0}});
  REQUIRE(g.size() == 6);
  CHECK(g[0].joints == std::vector<double>{0.0, 5.0});
  CHECK(g[1].joints == std::vector<double>{0.0, 6.0});
  CHECK(g[3].joints == std::vector<double>{1.0, 5.0});
}

TEST_CASE("identify two modes at (45, 60)") {
  auto plant = default_plant();
  auto traces = synth_campaign(plant, {{{45.0, 60.0}}}, {{-30.0, -30.0}});
  auto id = identify(traces[0].trace);
  REQUIRE(id.peaks.size() == 2);
  CHECK(std::abs(id.peaks[0].frequency - 1.9) <= 0.05);
  CHECK(std::abs(id.peaks[1].frequency - 3.8) <= 0.05);
  CHECK(id.segment.samples.size() == 2000);
}

TEST_CASE("simulated campaign recovers the map") {
  auto plant = default_plant();
  auto map = run_simulated_campaign(plant, CampaignSpec{});
  CHECK(map.node_count() == 16);
  CHECK(map.modes() == 2);
  CHECK(std::abs(interpolate(map, {{45.0, 60.0}}, 0) - 1.9) <= 0.05);
  CHECK(std::abs(interpolate(map, {{45.0, 60.0}}, 1) - 3.8) <= 0.05);
  for (std::size_t i = 0; i < map.node_count(); ++i) {
    const auto pose = map.node_pose(i);
    for (std::size_t m = 0; m < 2; ++m) {
      const double truth = evaluate(plant.modes[m].frequency, pose);
      CHECK(std::abs(map.values(m)[i] - truth) <= 0.01 * truth);
    }
  }
  CHECK(map.metadata().at("k0_policy") == "fixed");
  CHECK(map.metadata().count("seed") == 1);
}

TEST_CASE("a node equal to the start pose has no modes") {
  auto plant = default_plant();
  CampaignSpec spec;
  spec.step_from = {{0.0, 0.0}};
  try {
    run_simulated_campaign(plant, spec);
    FAIL("campaign should fail");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoModesFound);
    CHECK(std::string(e.what()).find("(0, 0)") != std::string::npos);
  }
}

TEST_CASE("design shaper") {
  FrequencyMap map({{0.0, 10.0}}, {{1.9, 1.9}, {3.8, 3.8}});
  auto d = design_shaper(map, {{5.0}}, {1, 0});
  CHECK(d.modes == std::vector<std::size_t>{0, 1});
  CHECK(d.sequence.size() == 4);
  CHECK(total_delay(d.sequence) == doctest::Approx(1.0 / 3.8 + 1.0 / 7.6));
  CHECK(frequency_response(d.sequence, 1.9).magnitude < 1e-12);
  CHECK(frequency_response(d.sequence, 3.8).magnitude < 1e-12);
  CHECK(design_shaper(map, {{5.0}}, {}).sequence.is_identity());
  CHECK(design_shaper(map, {{5.0}}, {0, 0}).sequence.size() == 2);
  CHECK_THROWS_AS(design_shaper(map, {{5.0}}, {2}), Error);
}

TEST_CASE("verify at the reference positions") {
  auto plant = default_plant();
  auto map = run_simulated_campaign(plant, CampaignSpec{});
  auto rows = verify(plant, map, reference_positions());
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].label == "A");
  CHECK(rows[2].pose.joints == std::vector<double>{75.0, 60.0});
  for (const auto& r : rows) {
    CHECK(r.amplitude_with < r.amplitude_without);
    CHECK(r.reduction_percent == doctest::Approx(100.0 * (1.0 - r.amplitude_with / r.amplitude_without)));
  }
  // shaping only the first mode does worse than both
  VerifyOptions one;
  one.modes = {0};
  auto partial = verify(plant, map, reference_positions(), one);
  for (std::size_t i = 0; i < 3; ++i) CHECK(partial[i].reduction_percent < rows[i].reduction_percent);
}

TEST_CASE("bode") {
  auto s = zv_from_params({1.0 / 3.4, 1.0});
  auto b = bode(s, 0.0, 10.0, 101);
  REQUIRE(b.size() == 101);
  CHECK(b.front().frequency_hz == 0.0);
  CHECK(b.back().frequency_hz == 10.0);
  CHECK(std::abs(b.front().magnitude_db) < 1e-9);
  CHECK(b[17].frequency_hz == doctest::Approx(1.7));
  CHECK(b[17].magnitude_db <= 20.0 * std::log10(1e-12));
  CHECK(b[17].magnitude_db >= 20.0 * std::log10(kBodeMagnitudeFloor));
  CHECK_THROWS_AS(bode(s, 5.0, 1.0, 10), Error);
  CHECK_THROWS_AS(bode(s, 0.0, 1.0, 1), Error);
}
