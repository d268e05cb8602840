#include "vibshape/modal_ident.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <string>

#include "fft.hpp"
#include "vibshape/error.hpp"

namespace vibshape {

namespace {

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Vertex offset of the parabola through (-1, a), (0, b), (1, c).
double parabolic_offset(double a, double b, double c) {
  const double denom = a - 2.0 * b + c;
  if (denom == 0.0) return 0.0;
  return 0.5 * (a - c) / denom;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void AccelTrace::validate() const {
  if (!std::isfinite(sample_rate) || sample_rate <= 0.0) {
    throw Error(ErrorCode::Input, "trace sample rate must be positive");
  }
  const double end = start_time + duration();
  if (!std::isfinite(motion_end_time) || motion_end_time < start_time - 1e-9 ||
      motion_end_time > end + 1e-9) {
    throw Error(ErrorCode::Input, "motion end time " + std::to_string(motion_end_time) +
                                      " s lies outside the trace");
  }
  // Residual samples are those at or after motion_end_time.
  const double first = std::ceil((motion_end_time - start_time) * sample_rate - 1e-6);
  const double remaining = static_cast<double>(samples.size()) - std::max(first, 0.0);
  if (remaining < 2.0) {
    throw Error(ErrorCode::InsufficientData, "fewer than 2 samples after motion end");
  }
}

AccelTrace residual_segment(const AccelTrace& trace, const ResidualOptions& options) {
  trace.validate();
  const auto first = static_cast<std::size_t>(
      std::max(0.0, std::ceil((trace.motion_end_time - trace.start_time) * trace.sample_rate - 1e-6)));
  const std::size_t count = trace.samples.size() - first;
  const double needed = 2.0 / options.lowest_expected_mode_hz;
  if (static_cast<double>(count) / trace.sample_rate < needed - 1e-9) {
    throw Error(ErrorCode::InsufficientData,
                "residual window of " + std::to_string(count / trace.sample_rate) +
                    " s is shorter than the required " + std::to_string(needed) + " s");
  }

  AccelTrace seg;
  seg.sample_rate = trace.sample_rate;
  seg.start_time = trace.time_at(first);
  seg.motion_end_time = seg.start_time;
  seg.samples.assign(trace.samples.begin() + static_cast<std::ptrdiff_t>(first), trace.samples.end());
  const double mean = mean_of(seg.samples);
  for (auto& v : seg.samples) v -= mean;
  return seg;
}

FrequencySpectrum spectrum(const AccelTrace& segment, int zero_pad_factor) {
  if (segment.samples.empty()) throw Error(ErrorCode::Input, "cannot transform an empty segment");
  if (zero_pad_factor < 1) throw Error(ErrorCode::Input, "zero-pad factor must be >= 1");
  if (!(segment.sample_rate > 0.0)) throw Error(ErrorCode::Input, "sample rate must be positive");

  const std::size_t n = segment.samples.size();
  const std::size_t padded = n * static_cast<std::size_t>(zero_pad_factor);
  std::vector<double> buf(padded, 0.0);
  double window_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = n == 1 ? 1.0
                            : 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                                    static_cast<double>(n - 1)));
    window_sum += w;
    buf[i] = w * segment.samples[i];
  }
  const auto bins = detail::rfft(buf);

  FrequencySpectrum out;
  out.pad_factor = zero_pad_factor;
  out.frequencies.resize(bins.size());
  out.magnitudes.resize(bins.size());
  const double df = segment.sample_rate / static_cast<double>(padded);
  const double scale = window_sum > 0.0 ? 2.0 / window_sum : 0.0;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    out.frequencies[k] = static_cast<double>(k) * df;
    out.magnitudes[k] = std::abs(bins[k]) * scale;
  }
  return out;
}

std::vector<ModePeak> extract_peaks(const FrequencySpectrum& spec, const PeakOptions& options) {
  if (options.max_modes < 1) throw Error(ErrorCode::Input, "max_modes must be >= 1");
  if (!(options.min_prominence_ratio > 0.0 && options.min_prominence_ratio <= 1.0)) {
    throw Error(ErrorCode::Input, "prominence ratio must lie in (0, 1]");
  }
  const auto& mag = spec.magnitudes;
  const std::size_t n = mag.size();
  if (n != spec.frequencies.size()) throw Error(ErrorCode::Input, "spectrum lengths differ");

  std::size_t lo = 1;
  while (lo < n && spec.frequencies[lo] < options.low_cutoff_hz) ++lo;
  if (n < 3 || lo + 2 > n) throw Error(ErrorCode::NoModesFound, "spectrum has no bins above the cutoff");

  const double global_max = *std::max_element(mag.begin() + static_cast<std::ptrdiff_t>(lo), mag.end());
  if (!(global_max > 0.0)) throw Error(ErrorCode::NoModesFound, "spectrum is zero above the cutoff");
  const double threshold = options.min_prominence_ratio * global_max;

  struct Candidate {
    std::size_t bin;
    double prominence;
  };
  std::vector<Candidate> found;
  for (std::size_t k = std::max<std::size_t>(lo, 1); k + 1 < n; ++k) {
    if (!(mag[k] > mag[k - 1] && mag[k] >= mag[k + 1])) continue;
    // Lowest point between the peak and the nearest higher bin on each side.
    double left = mag[k];
    for (std::size_t j = k; j > lo;) {
      --j;
      if (mag[j] > mag[k]) break;
      left = std::min(left, mag[j]);
    }
    double right = mag[k];
    for (std::size_t j = k + 1; j < n; ++j) {
      if (mag[j] > mag[k]) break;
      right = std::min(right, mag[j]);
    }
    const double prominence = mag[k] - std::max(left, right);
    if (prominence >= threshold) found.push_back({k, prominence});
  }
  if (found.empty()) throw Error(ErrorCode::NoModesFound, "no spectral peak clears the prominence threshold");

  std::stable_sort(found.begin(), found.end(),
                   [](const Candidate& a, const Candidate& b) { return a.prominence > b.prominence; });
  if (found.size() > static_cast<std::size_t>(options.max_modes)) {
    found.resize(static_cast<std::size_t>(options.max_modes));
  }
  std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) { return a.bin < b.bin; });

  std::vector<ModePeak> peaks;
  const double df = spec.bin_width();
  for (const auto& c : found) {
    const double a = mag[c.bin - 1];
    const double b = mag[c.bin];
    const double d = mag[c.bin + 1];
    double offset = 0.0;
    double height = b;
    if (a > 0.0 && d > 0.0) {
      // Log-magnitude parabola fits a Hann main lobe closely.
      const double la = std::log(a), lb = std::log(b), ld = std::log(d);
      offset = std::clamp(parabolic_offset(la, lb, ld), -0.5, 0.5);
      height = std::exp(lb - 0.25 * (la - ld) * offset);
    } else {
      offset = std::clamp(parabolic_offset(a, b, d), -0.5, 0.5);
      height = b - 0.25 * (a - d) * offset;
    }
    peaks.push_back({spec.frequencies[c.bin] + offset * df, height, static_cast<int>(peaks.size())});
  }
  return peaks;
}

double estimate_k0(const AccelTrace& segment, double mode_freq_hz) {
  if (!(mode_freq_hz > 0.0) || !std::isfinite(mode_freq_hz)) {
    throw Error(ErrorCode::Input, "mode frequency must be positive");
  }
  if (segment.samples.empty() || !(segment.sample_rate > 0.0)) {
    throw Error(ErrorCode::Input, "segment is empty");
  }
  const double half_period = 0.5 / mode_freq_hz;
  if (segment.duration() < 4.0 / mode_freq_hz) {
    throw Error(ErrorCode::Estimation, "segment spans fewer than 4 periods of the mode");
  }

  // Mirror extension keeps the band-pass free of a wrap-around discontinuity.
  const std::size_t n = segment.samples.size();
  const double mean = mean_of(segment.samples);
  std::vector<double> ext(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    ext[i] = segment.samples[i] - mean;
    ext[2 * n - 1 - i] = ext[i];
  }
  auto bins = detail::rfft(ext);
  const double df = segment.sample_rate / static_cast<double>(ext.size());
  for (std::size_t k = 0; k < bins.size(); ++k) {
    const double f = static_cast<double>(k) * df;
    if (f < 0.7 * mode_freq_hz || f > 1.3 * mode_freq_hz) bins[k] = 0.0;
  }
  auto band = detail::irfft(bins, ext.size());
  band.resize(n);

  struct Extremum {
    double time;
    double amplitude;
  };
  std::vector<Extremum> extrema;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const bool is_max = band[i] > band[i - 1] && band[i] >= band[i + 1];
    const bool is_min = band[i] < band[i - 1] && band[i] <= band[i + 1];
    if (!is_max && !is_min) continue;
    const double off = std::clamp(parabolic_offset(band[i - 1], band[i], band[i + 1]), -0.5, 0.5);
    const double value = band[i] - 0.25 * (band[i - 1] - band[i + 1]) * off;
    extrema.push_back({(static_cast<double>(i) + off) / segment.sample_rate, std::abs(value)});
  }

  // Extrema near either end carry filter edge effects.
  constexpr std::size_t kEdge = 2;
  constexpr double kEnvelopeFloor = 0.1;
  if (extrema.size() < 2 * kEdge + 4) {
    throw Error(ErrorCode::Estimation, "too few extrema to estimate the damping factor");
  }
  // Once the envelope has decayed far enough, the band edge ringing and any
  // noise dominate and the ratios drift toward 1; skip that tail.
  double largest = 0.0;
  for (std::size_t i = kEdge; i + kEdge < extrema.size(); ++i) largest = std::max(largest, extrema[i].amplitude);
  const double floor = kEnvelopeFloor * largest;
  std::vector<double> ratios;
  for (std::size_t i = kEdge; i + 1 + kEdge < extrema.size(); ++i) {
    const auto& a = extrema[i];
    const auto& b = extrema[i + 1];
    const double dt = b.time - a.time;
    if (!(a.amplitude > floor) || !(b.amplitude > floor) || !(dt > 0.0)) continue;
    // Log-linear decay between neighbours, normalised to a half period.
    ratios.push_back(std::exp(std::log(b.amplitude / a.amplitude) * half_period / dt));
  }
  if (ratios.size() < 3) throw Error(ErrorCode::Estimation, "too few usable extrema");
  const double k0 = median_of(std::move(ratios));
  if (!std::isfinite(k0) || k0 <= 0.0) throw Error(ErrorCode::Estimation, "damping factor estimate is degenerate");
  return std::min(k0, 1.0);
}

}  // namespace vibshape
