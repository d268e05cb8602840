#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "vibshape/error.hpp"
#include "vibshape/freq_map.hpp"

using namespace vibshape;

namespace {

const std::vector<double> kAxis{0.0, 30.0, 60.0, 90.0};

double f1_truth(double q1, double q2) { return 1.9 + 0.004 * (q1 - 45.0) - 0.003 * (q2 - 60.0); }

ModePeak peak(double f, int idx) { return {f, 1.0, idx}; }

std::vector<PoseMeasurement> grid_measurements(double (*f)(double, double), bool two_modes = true) {
  std::vector<PoseMeasurement> out;
  for (double a : kAxis) {
    for (double b : kAxis) {
      PoseMeasurement m{{{a, b}}, {peak(f(a, b), 0)}};
      if (two_modes) m.peaks.push_back(peak(2.0 * f(a, b), 1));
      out.push_back(m);
    }
  }
  return out;
}

// direct tensor-product weights on one cell
double bilinear(double x0, double x1, double y0, double y1, double f00, double f01, double f10, double f11, double x,
                double y) {
  const double u = (x - x0) / (x1 - x0), v = (y - y0) / (y1 - y0);
  return (1 - u) * (1 - v) * f00 + (1 - u) * v * f01 + u * (1 - v) * f10 + u * v * f11;
}

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

TEST_CASE("build a 4x4 two-mode map") {
  auto map = build_map(grid_measurements(f1_truth));
  CHECK(map.dimension() == 2);
  CHECK(map.modes() == 2);
  CHECK(map.node_count() == 16);
  CHECK(map.axes()[0] == kAxis);
  CHECK(map.at_node(0, {1, 2}) == f1_truth(30.0, 60.0));
  CHECK(map.at_node(1, {3, 0}) == 2.0 * f1_truth(90.0, 0.0));
  CHECK(map.flat_index({1, 2}) == 6);
  CHECK(map.node_pose(6).joints == std::vector<double>{30.0, 60.0});
}

TEST_CASE("measurement order does not matter") {
  auto ms = grid_measurements(f1_truth);
  auto a = build_map(ms);
  std::mt19937_64 rng(1);
  std::shuffle(ms.begin(), ms.end(), rng);
  auto b = build_map(ms);
  CHECK(a.all_values() == b.all_values());
}

TEST_CASE("constant single-mode map") {
  std::vector<PoseMeasurement> ms;
  for (double a : {0.0, 90.0}) {
    for (double b : {0.0, 90.0}) ms.push_back({{{a, b}}, {peak(2.0, 0)}});
  }
  auto map = build_map(ms);
  CHECK(map.modes() == 1);
  for (double x : {0.0, 12.5, 45.0, 90.0}) CHECK(interpolate(map, {{x, 90.0 - x}}, 0) == doctest::Approx(2.0));
}

TEST_CASE("missing node is named") {
  auto ms = grid_measurements(f1_truth);
  ms.erase(ms.begin() + 6);  // (30, 60)
  try {
    build_map(ms);
    FAIL("incomplete grid accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Grid);
    CHECK(std::string(e.what()).find("(30, 60)") != std::string::npos);
  }
}

TEST_CASE("inconsistent measurements") {
  auto ms = grid_measurements(f1_truth);
  ms[3].peaks.pop_back();
  CHECK(code_of([&] { build_map(ms); }) == ErrorCode::Input);

  auto dup = grid_measurements(f1_truth);
  dup.push_back(dup[0]);
  CHECK(code_of([&] { build_map(dup); }) == ErrorCode::Input);
}

TEST_CASE("map invariants on construction") {
  CHECK_THROWS_AS(FrequencyMap({{0.0, 1.0}}, {{1.0, -1.0}}), Error);        // non-positive
  CHECK_THROWS_AS(FrequencyMap({{1.0, 0.0}}, {{1.0, 1.0}}), Error);         // axis order
  CHECK_THROWS_AS(FrequencyMap({{0.0}}, {{1.0}}), Error);                   // one point
  CHECK_THROWS_AS(FrequencyMap({{0.0, 1.0}}, {{1.0, 2.0}, {1.5, 1.9}}), Error);  // modes cross
  CHECK_THROWS_AS(FrequencyMap({{0.0, 1.0}}, {{1.0, 2.0, 3.0}}), Error);    // size
}

TEST_CASE("cell centre is the corner average") {
  FrequencyMap map({{0.0, 30.0}, {0.0, 30.0}}, {{1.6, 1.8, 2.0, 2.2}});
  CHECK(interpolate(map, {{15.0, 15.0}}, 0) == doctest::Approx(1.9).epsilon(1e-14));
}

TEST_CASE("node exactness") {
  auto map = build_map(grid_measurements(f1_truth));
  for (std::size_t i = 0; i < map.node_count(); ++i) {
    const auto pose = map.node_pose(i);
    for (std::size_t m = 0; m < 2; ++m) CHECK(interpolate(map, pose, m) == map.values(m)[i]);
  }
}

TEST_CASE("oracle equivalence and bounds, randomized") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> fv(1.0, 3.0), u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> vals(16);
    for (auto& v : vals) v = fv(rng);
    FrequencyMap map({kAxis, kAxis}, {vals});
    const auto i = static_cast<std::size_t>(u(rng) * 3.0), j = static_cast<std::size_t>(u(rng) * 3.0);
    const double x = kAxis[i] + 30.0 * u(rng), y = kAxis[j] + 30.0 * u(rng);
    const double f00 = vals[i * 4 + j], f01 = vals[i * 4 + j + 1], f10 = vals[(i + 1) * 4 + j],
                 f11 = vals[(i + 1) * 4 + j + 1];
    const double got = interpolate(map, {{x, y}}, 0);
    CHECK(std::abs(got - bilinear(kAxis[i], kAxis[i + 1], kAxis[j], kAxis[j + 1], f00, f01, f10, f11, x, y)) < 1e-12);
    CHECK(got >= std::min({f00, f01, f10, f11}) - 1e-12);
    CHECK(got <= std::max({f00, f01, f10, f11}) + 1e-12);
  }
}

TEST_CASE("continuity across cell boundaries") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> fv(1.0, 3.0), u(0.0, 90.0);
  std::vector<double> vals(16);
  for (auto& v : vals) v = fv(rng);
  FrequencyMap map({kAxis, kAxis}, {vals});
  const double eps = 1e-7;
  for (int trial = 0; trial < 100; ++trial) {
    const double b = kAxis[1 + trial % 2];
    const double y = u(rng);
    CHECK(std::abs(interpolate(map, {{b - eps, y}}, 0) - interpolate(map, {{b + eps, y}}, 0)) < 1e-8);
    CHECK(std::abs(interpolate(map, {{y, b - eps}}, 0) - interpolate(map, {{y, b + eps}}, 0)) < 1e-8);
  }
}

TEST_CASE("mode ordering holds inside the domain") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 90.0), fv(1.0, 2.0), gap(0.01, 2.0);
  std::vector<double> m1(16), m2(16);
  for (std::size_t i = 0; i < 16; ++i) {
    m1[i] = fv(rng);
    m2[i] = m1[i] + gap(rng);
  }
  FrequencyMap map({kAxis, kAxis}, {m1, m2});
  for (int i = 0; i < 500; ++i) {
    JointPose p{{u(rng), u(rng)}};
    CHECK(interpolate(map, p, 1) > interpolate(map, p, 0));
  }
}

TEST_CASE("interpolation domain errors") {
  auto map = build_map(grid_measurements(f1_truth));
  CHECK(code_of([&] { interpolate(map, {{-1.0, 10.0}}, 0); }) == ErrorCode::OutOfDomain);
  CHECK(code_of([&] { interpolate(map, {{10.0, 90.5}}, 0); }) == ErrorCode::OutOfDomain);
  CHECK(code_of([&] { interpolate(map, {{10.0, 10.0}}, 2); }) == ErrorCode::Input);
  CHECK(code_of([&] { interpolate(map, {{10.0}}, 0); }) == ErrorCode::Input);
  CHECK(code_of([&] { interpolate(map, {{NAN, 10.0}}, 0); }) == ErrorCode::Input);
}

TEST_CASE("extrapolation") {
  auto map = build_map(grid_measurements(f1_truth));
  // linear data continues exactly
  auto e = extrapolate(map, {{100.0, 40.0}}, 0);
  CHECK(e.extrapolated);
  CHECK(e.value == doctest::Approx(f1_truth(100.0, 40.0)).epsilon(1e-13));
  auto e2 = extrapolate(map, {{-20.0, 110.0}}, 1);
  CHECK(e2.extrapolated);
  CHECK(e2.value == doctest::Approx(2.0 * f1_truth(-20.0, 110.0)).epsilon(1e-13));

  auto inside = extrapolate(map, {{45.0, 60.0}}, 0);
  CHECK_FALSE(inside.extrapolated);
  CHECK(inside.value == doctest::Approx(1.9).epsilon(1e-13));

  // 2 cell widths outside
  CHECK(code_of([&] { extrapolate(map, {{150.0, 40.0}}, 0); }) == ErrorCode::OutOfDomain);
  CHECK_NOTHROW(extrapolate(map, {{150.0, 40.0}}, 0, {2.0, 0.1}));

  FrequencyMap flat({kAxis, kAxis}, {std::vector<double>(16, 2.0)});
  auto c = extrapolate(flat, {{-25.0, 95.0}}, 0);
  CHECK(c.extrapolated);
  CHECK(c.value == doctest::Approx(2.0));
}

TEST_CASE("extrapolation floor") {
  FrequencyMap steep({{0.0, 1.0}}, {{0.5, 2.0}});
  auto e = extrapolate(steep, {{-0.9}}, 0);
  CHECK(e.extrapolated);
  CHECK(e.value == doctest::Approx(0.1));
}

TEST_CASE("shaper parameters from the map") {
  FrequencyMap map({{0.0, 30.0}}, {{1.7, 1.9}, {3.4, 3.8}});
  auto p = shaper_params_at(map, {{0.0}}, 0);
  CHECK(p.t0 == doctest::Approx(0.2941).epsilon(1e-4));
  CHECK(p.k0 == 1.0);
  CHECK(shaper_params_at(map, {{30.0}}, 0).t0 == doctest::Approx(0.2632).epsilon(1e-4));
  CHECK(shaper_params_at(map, {{30.0}}, 1).t0 == doctest::Approx(0.1316).epsilon(1e-4));
  CHECK(shaper_params_at(map, {{30.0}}, 1, K0Policy::fixed(0.9)).k0 == 0.9);
  CHECK_THROWS_AS(shaper_params_at(map, {{30.0}}, 1, K0Policy::fixed(1.2)), Error);

  CHECK(code_of([&] { shaper_params_at(map, {{40.0}}, 0); }) == ErrorCode::OutOfDomain);
  CHECK(shaper_params_at(map, {{40.0}}, 0, {}, true).t0 == doctest::Approx(1.0 / (2.0 * (1.9 + 0.2 / 3.0))));
}

TEST_CASE("per-node k0 is interpolated") {
  FrequencyMap map({{0.0, 10.0}}, {{2.0, 2.0}}, std::vector<std::vector<double>>{{0.9, 1.0}});
  CHECK(shaper_params_at(map, {{5.0}}, 0, K0Policy::per_node()).k0 == doctest::Approx(0.95));
  CHECK(shaper_params_at(map, {{5.0}}, 0).k0 == 1.0);
  FrequencyMap scalar({{0.0, 10.0}}, {{2.0, 2.0}}, std::nullopt, 0.97);
  CHECK(shaper_params_at(scalar, {{5.0}}, 0, K0Policy::per_node()).k0 == 0.97);
}

TEST_CASE("frequency round trip through t0") {
  auto map = build_map(grid_measurements(f1_truth));
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 90.0);
  for (int i = 0; i < 200; ++i) {
    JointPose p{{u(rng), u(rng)}};
    for (std::size_t m = 0; m < 2; ++m) {
      CHECK(std::abs(1.0 / (2.0 * shaper_params_at(map, p, m).t0) - interpolate(map, p, m)) < 1e-12);
    }
  }
}
