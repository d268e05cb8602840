// Acceptance run: one line per criterion, non-zero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "vibshape/arm_sim.hpp"
#include "vibshape/error.hpp"
#include "vibshape/io.hpp"
#include "vibshape/pipeline.hpp"

using namespace vibshape;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void run(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs <= budget_s;
  const bool ok = out.pass && in_time;
  if (!ok) ++failures;
  std::printf("criterion %2d %-32s %s  %s  [%.3f s of %.0f s%s]\n", id, name, ok ? "PASS" : "FAIL", out.detail.c_str(),
              secs, budget_s, in_time ? "" : ", too slow");
  std::fflush(stdout);
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SimConfig one_mode(double f, double zeta) {
  SimConfig c;
  c.modes.push_back({ConstantFrequency{f}, zeta, 1.0, {}});
  c.sample_rate = 100.0;
  return c;
}

double residual_ratio(const SimConfig& plant, const ImpulseSequence& s) {
  auto cmd = step_command({{0.0}}, {{1.0}}, plant.sample_rate);
  auto r = reduction_report(simulate(plant, cmd), simulate(plant, apply(s, cmd)));
  return r.amplitude_with / r.amplitude_without;
}

// independent bilinear oracle on one cell
double bilinear(double u, double v, double f00, double f01, double f10, double f11) {
  return (1 - u) * (1 - v) * f00 + (1 - u) * v * f01 + u * (1 - v) * f10 + u * v * f11;
}

struct PipelineFiles {
  std::string map_json;
  std::string report_csv;
  std::vector<ReportRow> rows;
};

PipelineFiles pipeline_run(const std::filesystem::path& dir) {
  const auto plant = default_plant();
  const auto map = run_simulated_campaign(plant, CampaignSpec{});
  auto rows = verify(plant, map, reference_positions());
  std::filesystem::create_directories(dir);
  io::write_text_file(dir / "map.json", io::map_to_json(map));
  io::write_text_file(dir / "report.csv", io::report_to_csv(rows));
  return {io::read_text_file(dir / "map.json"), io::read_text_file(dir / "report.csv"), rows};
}

}  // namespace

int main() {
  const double notch_t0 = 1.0 / (2.0 * 1.7);
  const auto notch = zv_from_params({notch_t0, 1.0});

  run(1, "notch depth", 1.0, [&] {
    const double at = frequency_response(notch, 1.7).magnitude;
    const double dc = frequency_response(notch, 0.0).magnitude;
    return Outcome{at < 1e-12 && std::abs(dc - 1.0) < 1e-12, fmt("|H(1.7)|=%.2e |H(0)|-1=%.2e", at, dc - 1.0)};
  });

  run(2, "harmonic zeros", 1.0, [&] {
    double worst_zero = 0.0, worst_unity = 0.0;
    for (double f : {5.1, 8.5}) worst_zero = std::max(worst_zero, frequency_response(notch, f).magnitude);
    for (double f : {3.4, 6.8}) {
      worst_unity = std::max(worst_unity, std::abs(frequency_response(notch, f).magnitude - 1.0));
    }
    return Outcome{worst_zero < 1e-9 && worst_unity < 1e-9,
                   fmt("max |H| at 5.1/8.5 Hz=%.2e, max ||H|-1| at 3.4/6.8 Hz=%.2e", worst_zero, worst_unity)};
  });

  run(3, "exact-tuning suppression", 1.0, [&] {
    const double zeta = 0.01;
    // residual vibrates at 2.5 Hz, a half period of exactly 20 samples
    const double fd = 2.5, fn = fd / std::sqrt(1 - zeta * zeta);
    const auto plant = one_mode(fn, zeta);
    const double r1 = residual_ratio(plant, zv_from_params({1.0 / (2.0 * fd), 1.0}));
    const double r2 = residual_ratio(plant, zv_from_params({1.0 / (2.0 * fd), k0_from_damping_ratio(zeta)}));
    return Outcome{1.0 - r1 >= 0.95 && r2 < 1e-4,
                   fmt("k0=1 reduction %.2f%% (bound %.2f%% residual); exact k0 residual %.2e of unshaped",
                       100.0 * (1.0 - r1), 100.0 * (1 - std::exp(-zeta * kPi)) / 2, r2)};
  });

  run(4, "sensitivity curve", 5.0, [&] {
    // shaper at 2 Hz, half period of 25 samples
    const auto s = zv_from_params({0.25, 1.0});
    double worst = 0.0;
    std::ostringstream got;
    for (double r : {0.8, 0.9, 1.0, 1.1, 1.2}) {
      const double measured = residual_ratio(one_mode(2.0 * r, 0.0), s);
      worst = std::max(worst, std::abs(measured - std::abs(std::cos(kPi * r / 2.0))));
      got << fmt("%.3f ", measured);
    }
    return Outcome{worst <= 0.01, "ratios " + got.str() + fmt("max error %.4f", worst)};
  });

  run(5, "two-mode chained suppression", 2.0, [&] {
    const auto plant = default_plant();
    std::vector<JointPose> poses{{{45.0, 60.0}}, {{45.0, 45.0}}, {{15.0, 15.0}}, {{75.0, 60.0}}};
    double worst = 100.0;
    for (const auto& to : poses) {
      const double f1 = evaluate(plant.modes[0].frequency, to), f2 = evaluate(plant.modes[1].frequency, to);
      const auto s = cascade(zv_from_params({0.5 / f1, 1.0}), zv_from_params({0.5 / f2, 1.0}));
      auto cmd = step_command({{0.0, 0.0}}, to, plant.sample_rate);
      worst = std::min(worst, reduction_report(simulate(plant, cmd), simulate(plant, apply(s, cmd))).reduction_percent);
    }
    return Outcome{worst >= 95.0, fmt("worst reduction over 4 poses %.2f%%", worst)};
  });

  PipelineFiles first;
  const auto scratch = std::filesystem::temp_directory_path() / "vibshape_acceptance";
  run(6, "end-to-end pipeline", 30.0, [&] {
    first = pipeline_run(scratch / "run1");
    double sum = 0.0, worst = 100.0;
    std::ostringstream rows;
    for (const auto& r : first.rows) {
      sum += r.reduction_percent;
      worst = std::min(worst, r.reduction_percent);
      rows << r.label << fmt("=%.1f%% ", r.reduction_percent);
    }
    const double mean = sum / static_cast<double>(first.rows.size());
    return Outcome{first.rows.size() == 3 && worst >= 83.3 && mean >= 90.0,
                   rows.str() + fmt("mean %.1f%%", mean)};
  });

  run(7, "identification accuracy", 30.0, [&] {
    // returns {missed, worst error}; damped adds zeta = 0.01 decay to both tones
    auto batch = [&](bool damped) {
      std::mt19937_64 rng(20240607);
      std::uniform_real_distribution<double> f1d(1.3, 2.3), f2d(3.0, 4.4), ph(0.0, 2 * kPi), a2d(0.5, 1.0);
      const double rate = 100.0, zeta = damped ? 0.01 : 0.0;
      double worst = 0.0;
      int misses = 0;
      for (int k = 0; k < 50; ++k) {
        const double f1 = f1d(rng), f2 = f2d(rng), p1 = ph(rng), p2 = ph(rng), a2 = a2d(rng);
        AccelTrace tr{rate, 0.0, {}, 0.0};
        double power = 0.0;
        for (int i = 0; i < 2000; ++i) {
          const double t = i / rate;
          const double v = std::exp(-zeta * 2 * kPi * f1 * t) * std::sin(2 * kPi * f1 * t + p1) +
                           a2 * std::exp(-zeta * 2 * kPi * f2 * t) * std::sin(2 * kPi * f2 * t + p2);
          tr.samples.push_back(v);
          power += v * v;
        }
        // 20 dB: noise power one hundredth of the signal power
        std::normal_distribution<double> noise(0.0, std::sqrt(power / 2000.0 / 100.0));
        for (auto& v : tr.samples) v += noise(rng);
        auto id = identify(tr);
        if (id.peaks.size() != 2) {
          ++misses;
          continue;
        }
        worst = std::max({worst, std::abs(id.peaks[0].frequency - f1), std::abs(id.peaks[1].frequency - f2)});
      }
      return std::pair{misses, worst};
    };
    const auto [misses, worst] = batch(false);
    const auto [dmiss, dworst] = batch(true);
    return Outcome{misses == 0 && worst <= 0.05,
                   fmt("50 instances, %d missed, max error %.4f Hz (decaying variant: %d missed, max error %.4f Hz)",
                       misses, worst, dmiss, dworst)};
  });

  run(8, "interpolation oracle", 1.0, [&] {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> fv(1.0, 4.5), u(0.0, 1.0), step(5.0, 40.0);
    double worst = 0.0;
    bool nodes_exact = true;
    for (int k = 0; k < 1000; ++k) {
      // random 3x3-node grid with uneven spacing
      std::vector<std::vector<double>> axes(2);
      for (auto& ax : axes) {
        double x = -45.0 * u(rng);
        for (int i = 0; i < 3; ++i) {
          ax.push_back(x);
          x += step(rng);
        }
      }
      std::vector<double> vals(9);
      for (auto& v : vals) v = fv(rng);
      FrequencyMap map(axes, {vals});
      const std::size_t i = k % 2, j = (k / 2) % 2;
      const double uu = u(rng), vv = u(rng);
      const double x = axes[0][i] + uu * (axes[0][i + 1] - axes[0][i]);
      const double y = axes[1][j] + vv * (axes[1][j + 1] - axes[1][j]);
      const double want = bilinear((x - axes[0][i]) / (axes[0][i + 1] - axes[0][i]),
                                   (y - axes[1][j]) / (axes[1][j + 1] - axes[1][j]), vals[i * 3 + j],
                                   vals[i * 3 + j + 1], vals[(i + 1) * 3 + j], vals[(i + 1) * 3 + j + 1]);
      worst = std::max(worst, std::abs(interpolate(map, {{x, y}}, 0) - want));
      for (std::size_t n = 0; n < 9; ++n) nodes_exact &= interpolate(map, map.node_pose(n), 0) == vals[n];
    }
    return Outcome{worst <= 1e-12 && nodes_exact,
                   fmt("max deviation %.2e, nodes %s", worst, nodes_exact ? "exact" : "NOT exact")};
  });

  run(9, "shaper algebra", 1.0, [&] {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> td(0.03, 0.6), kd(0.3, 1.0), fd(0.0, 25.0);
    auto rnd = [&] { return zv_from_params({td(rng), kd(rng)}); };
    auto same = [](const ImpulseSequence& a, const ImpulseSequence& b) {
      if (a.size() != b.size()) return false;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a.impulses()[i].time - b.impulses()[i].time) > 1e-9) return false;
        if (std::abs(a.impulses()[i].amplitude - b.impulses()[i].amplitude) > 1e-12) return false;
      }
      return true;
    };
    int bad = 0;
    double worst_h = 0.0;
    for (int k = 0; k < 200; ++k) {
      const auto a = rnd(), b = rnd(), c = rnd();
      const auto ab = cascade(a, b), abc = cascade(ab, c);
      if (!same(ab, cascade(b, a))) ++bad;
      if (!same(abc, cascade(a, cascade(b, c)))) ++bad;
      if (std::abs(total_delay(abc) - total_delay(a) - total_delay(b) - total_delay(c)) > 1e-12) ++bad;
      double sum = 0.0;
      for (const auto& imp : abc.impulses()) sum += imp.amplitude;
      if (std::abs(sum - 1.0) > 1e-12) ++bad;
      const double f = fd(rng);
      // direct evaluation of the triple product's transform
      std::complex<double> h{0.0, 0.0};
      for (const auto& imp : abc.impulses()) h += imp.amplitude * std::polar(1.0, -2 * kPi * f * imp.time);
      const double prod = frequency_response(a, f).magnitude * frequency_response(b, f).magnitude *
                          frequency_response(c, f).magnitude;
      worst_h = std::max({worst_h, std::abs(std::abs(h) - prod), std::abs(frequency_response(abc, f).magnitude - prod)});
    }
    return Outcome{bad == 0 && worst_h <= 1e-10, fmt("200 triples, %d violations, max |H| factor error %.2e", bad, worst_h)};
  });

  run(10, "determinism", 60.0, [&] {
    const auto second = pipeline_run(scratch / "run2");
    const bool same = !first.map_json.empty() && first.map_json == second.map_json &&
                      first.report_csv == second.report_csv;
    return Outcome{same, fmt("map.json %zu bytes, report.csv %zu bytes, %s", second.map_json.size(),
                             second.report_csv.size(), same ? "byte-identical" : "DIFFER")};
  });

  std::error_code ec;
  std::filesystem::remove_all(scratch, ec);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
