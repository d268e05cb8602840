#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vibshape/modal_ident.hpp"
#include "vibshape/shaper.hpp"

namespace vibshape {

/// Joint angles in degrees.
struct JointPose {
  std::vector<double> joints;

  std::size_t size() const noexcept { return joints.size(); }
  std::string to_string() const;
};

/// Natural frequencies (Hz) of each mode on a rectangular joint-space grid.
///
/// Node values are stored row-major over the axes' cartesian product with the
/// first axis varying slowest. Mode m is the m-th lowest frequency at every
/// node. The damping factor is either one scalar or a per-mode grid laid out
/// like the frequencies.
class FrequencyMap {
 public:
  FrequencyMap(std::vector<std::vector<double>> axes, std::vector<std::vector<double>> values,
               std::optional<std::vector<std::vector<double>>> k0_grid = std::nullopt,
               double k0_scalar = 1.0, std::map<std::string, std::string> metadata = {});

  std::size_t dimension() const noexcept { return axes_.size(); }
  std::size_t modes() const noexcept { return values_.size(); }
  std::size_t node_count() const noexcept;

  const std::vector<std::vector<double>>& axes() const noexcept { return axes_; }
  const std::vector<double>& values(std::size_t mode) const { return values_.at(mode); }
  const std::vector<std::vector<double>>& all_values() const noexcept { return values_; }

  bool has_k0_grid() const noexcept { return k0_grid_.has_value(); }
  double k0_scalar() const noexcept { return k0_scalar_; }
  const std::vector<std::vector<double>>& k0_grid() const { return k0_grid_.value(); }

  const std::map<std::string, std::string>& metadata() const noexcept { return metadata_; }

  /// Row-major flat index of a node given per-axis indices.
  std::size_t flat_index(const std::vector<std::size_t>& idx) const;
  JointPose node_pose(std::size_t flat) const;
  double at_node(std::size_t mode, const std::vector<std::size_t>& idx) const {
    return values_.at(mode)[flat_index(idx)];
  }

  bool contains(const JointPose& pose) const;

 private:
  std::vector<std::vector<double>> axes_;
  std::vector<std::vector<double>> values_;
  std::optional<std::vector<std::vector<double>>> k0_grid_;
  double k0_scalar_;
  std::map<std::string, std::string> metadata_;
};

struct PoseMeasurement {
  JointPose pose;
  std::vector<ModePeak> peaks;
};

/// Assemble a map from one measurement per grid node. Throws Error(Grid)
/// naming any absent node, Error(Input) on mode-count mismatch or duplicates.
FrequencyMap build_map(const std::vector<PoseMeasurement>& measurements,
                       std::map<std::string, std::string> metadata = {});

/// Multilinear interpolation inside the grid's bounding box. Throws
/// Error(OutOfDomain) outside it.
double interpolate(const FrequencyMap& map, const JointPose& pose, std::size_t mode);

struct ExtrapolationOptions {
  /// How far outside the box a query may reach, in boundary-cell widths.
  double limit_cells = 1.0;
  /// Results never drop below this frequency.
  double floor_hz = 0.1;
};

struct Extrapolated {
  double value = 0.0;
  bool extrapolated = false;
};

/// Like interpolate inside the box; outside it continues the boundary cell's
/// multilinear surface and flags the result.
Extrapolated extrapolate(const FrequencyMap& map, const JointPose& pose, std::size_t mode,
                         const ExtrapolationOptions& options = {});

/// Where the damping factor comes from.
struct K0Policy {
  enum class Kind { Fixed, PerNode };
  Kind kind = Kind::Fixed;
  double value = 1.0;

  static K0Policy fixed(double k0) { return {Kind::Fixed, k0}; }
  /// Interpolate the map's k0 grid (or use its scalar if it has none).
  static K0Policy per_node() { return {Kind::PerNode, 1.0}; }
};

/// t0 = 1 / (2 f) from the (possibly extrapolated) frequency; k0 per policy.
ShaperParams shaper_params_at(const FrequencyMap& map, const JointPose& pose, std::size_t mode,
                              const K0Policy& policy = {}, bool allow_extrapolation = false);

}  // namespace vibshape
