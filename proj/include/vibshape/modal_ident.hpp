#pragma once

#include <vector>

namespace vibshape {

/// Single-axis tip acceleration, uniformly sampled. Sample i is at
/// start_time + i / sample_rate. Units are arbitrary but consistent.
struct AccelTrace {
  double sample_rate = 0.0;
  double start_time = 0.0;
  std::vector<double> samples;
  /// Separates commanded motion from residual vibration.
  double motion_end_time = 0.0;

  double time_at(std::size_t i) const noexcept {
    return start_time + static_cast<double>(i) / sample_rate;
  }
  double duration() const noexcept {
    return static_cast<double>(samples.size()) / sample_rate;
  }

  /// Throws Error(Input) on a bad rate or motion_end_time outside the trace,
  /// Error(InsufficientData) with fewer than 2 samples after motion end.
  void validate() const;
};

/// One-sided magnitude spectrum with uniform bins from 0 to Nyquist.
struct FrequencySpectrum {
  std::vector<double> frequencies;
  std::vector<double> magnitudes;
  /// Zero-pad factor used; the un-padded bin width is bin_width() * pad_factor.
  int pad_factor = 1;

  double bin_width() const noexcept {
    return frequencies.size() > 1 ? frequencies[1] - frequencies[0] : 0.0;
  }
};

struct ModePeak {
  double frequency = 0.0;  // Hz
  double magnitude = 0.0;
  int mode_index = 0;      // 0-based, ascending frequency
};

struct ResidualOptions {
  /// The residual window must span at least two periods of this frequency.
  double lowest_expected_mode_hz = 1.0;
};

struct PeakOptions {
  int max_modes = 2;
  /// Minimum prominence as a fraction of the global maximum.
  double min_prominence_ratio = 0.2;
  /// Bins below this frequency are never peaks.
  double low_cutoff_hz = 0.5;
};

/// Slice from motion_end_time to the end and subtract the slice mean.
/// The returned trace has start_time = motion_end_time = first residual time.
AccelTrace residual_segment(const AccelTrace& trace, const ResidualOptions& options = {});

/// Hann-windowed, zero-padded DFT magnitude, scaled so a sinusoid of
/// amplitude A peaks near A.
FrequencySpectrum spectrum(const AccelTrace& segment, int zero_pad_factor = 4);

/// Prominent local maxima, parabolically refined, ascending in frequency.
/// Throws Error(NoModesFound) if nothing clears the threshold.
std::vector<ModePeak> extract_peaks(const FrequencySpectrum& spec, const PeakOptions& options = {});

/// Amplitude ratio of the mode over half a period, from the band-isolated
/// envelope of the segment. Clamped to (0, 1]. Throws Error(Estimation) when
/// too few extrema are found; callers fall back to k0 = 1.
double estimate_k0(const AccelTrace& segment, double mode_freq_hz);

}  // namespace vibshape
