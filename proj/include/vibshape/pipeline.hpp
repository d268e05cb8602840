#pragma once

#include <string>
#include <vector>

#include "vibshape/arm_sim.hpp"
#include "vibshape/freq_map.hpp"
#include "vibshape/modal_ident.hpp"
#include "vibshape/shaper.hpp"

namespace vibshape {

struct IdentifyOptions {
  ResidualOptions residual;
  PeakOptions peaks;
  int zero_pad_factor = 4;
};

struct Identification {
  AccelTrace segment;
  FrequencySpectrum spectrum;
  std::vector<ModePeak> peaks;
};

/// Residual segment -> spectrum -> peaks.
Identification identify(const AccelTrace& trace, const IdentifyOptions& options = {});

/// Cartesian product of the axes, first axis varying slowest.
std::vector<JointPose> grid_poses(const std::vector<std::vector<double>>& axes);

struct CampaignSpec {
  std::vector<std::vector<double>> axes{{0.0, 30.0, 60.0, 90.0}, {0.0, 30.0, 60.0, 90.0}};
  /// Every grid node is reached by a step from here. Keep it off the grid: a
  /// node equal to step_from sees no motion and yields no modes.
  JointPose step_from{{-30.0, -30.0}};
  IdentifyOptions identify;
  /// Scalar damping factor stored in the map.
  double k0 = 1.0;
  StepOptions step;
};

/// Identify each trace and assemble the map. Metadata records the campaign.
FrequencyMap map_from_traces(const std::vector<CampaignTrace>& traces, const CampaignSpec& spec);

/// synth_campaign over the spec's grid followed by map_from_traces.
FrequencyMap run_simulated_campaign(const SimConfig& plant, const CampaignSpec& spec);

struct ShaperDesign {
  ImpulseSequence sequence;
  std::vector<std::size_t> modes;     // ascending frequency
  std::vector<double> frequencies;    // Hz, per mode
  std::vector<ShaperParams> params;   // per mode
};

/// One ZV per requested mode at `pose`, cascaded in ascending-frequency order.
/// An empty mode list gives the identity shaper.
ShaperDesign design_shaper(const FrequencyMap& map, const JointPose& pose, std::vector<std::size_t> modes,
                           const K0Policy& k0 = {}, bool allow_extrapolation = false);

struct LabeledPose {
  std::string label;
  JointPose pose;
};

/// Positions A (45, 45), B (15, 15) and C (75, 60).
std::vector<LabeledPose> reference_positions();

struct ReportRow {
  std::string label;
  JointPose pose;
  double amplitude_without = 0.0;  // mm
  double amplitude_with = 0.0;     // mm
  double reduction_percent = 0.0;
};

struct VerifyOptions {
  JointPose step_from{{0.0, 0.0}};
  StepOptions step;
  double settle_guard = 0.0;
  K0Policy k0;
  bool allow_extrapolation = false;
  /// Empty means every mode of the map.
  std::vector<std::size_t> modes;
};

/// Step into each position with and without the map-tuned shaper and compare
/// residual amplitudes.
std::vector<ReportRow> verify(const SimConfig& plant, const FrequencyMap& map, const std::vector<LabeledPose>& positions,
                              const VerifyOptions& options = {});

struct BodePoint {
  double frequency_hz = 0.0;
  double magnitude_db = 0.0;
  double phase_deg = 0.0;
};

/// Magnitudes below this are reported at this floor in dB.
inline constexpr double kBodeMagnitudeFloor = 1e-15;

/// Linearly spaced response from f_min to f_max inclusive.
std::vector<BodePoint> bode(const ImpulseSequence& seq, double f_min, double f_max, std::size_t points);

}  // namespace vibshape
