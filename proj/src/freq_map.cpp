#include "vibshape/freq_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "vibshape/error.hpp"

namespace vibshape {

namespace {

constexpr double kAxisTolerance = 1e-9;

[[noreturn]] void input_error(const std::string& what) { throw Error(ErrorCode::Input, what); }

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

struct CellCoord {
  std::size_t index;  // lower node of the cell
  double t;           // position inside the cell, 0..1 when inside
};

CellCoord locate(const std::vector<double>& axis, double x) {
  const std::size_t n = axis.size();
  std::size_t i = 0;
  if (x >= axis[n - 1]) {
    i = n - 2;
  } else if (x > axis[0]) {
    i = static_cast<std::size_t>(std::upper_bound(axis.begin(), axis.end(), x) - axis.begin()) - 1;
    i = std::min(i, n - 2);
  }
  return {i, (x - axis[i]) / (axis[i + 1] - axis[i])};
}

// Tensor-product (multilinear) blend of the 2^d corners of the located cell.
double blend(const FrequencyMap& map, const std::vector<double>& grid, const std::vector<CellCoord>& cell) {
  const std::size_t d = cell.size();
  std::vector<std::size_t> idx(d);
  double acc = 0.0;
  for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
    double w = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      const bool upper = (corner >> k) & 1U;
      idx[k] = cell[k].index + (upper ? 1 : 0);
      w *= upper ? cell[k].t : 1.0 - cell[k].t;
    }
    acc += w * grid[map.flat_index(idx)];
  }
  return acc;
}

void check_pose(const FrequencyMap& map, const JointPose& pose) {
  if (pose.size() != map.dimension()) {
    input_error("pose has " + std::to_string(pose.size()) + " joints, map has " +
                std::to_string(map.dimension()));
  }
  for (double q : pose.joints) {
    if (!std::isfinite(q)) input_error("pose contains a non-finite angle");
  }
}

void check_mode(const FrequencyMap& map, std::size_t mode) {
  if (mode >= map.modes()) {
    input_error("mode index " + std::to_string(mode) + " out of range (map has " +
                std::to_string(map.modes()) + " modes)");
  }
}

std::vector<CellCoord> locate_all(const FrequencyMap& map, const JointPose& pose) {
  std::vector<CellCoord> cell;
  cell.reserve(map.dimension());
  for (std::size_t k = 0; k < map.dimension(); ++k) cell.push_back(locate(map.axes()[k], pose.joints[k]));
  return cell;
}

// Throws OutOfDomain if the pose exceeds the extrapolation limit.
void check_extrapolation_limit(const FrequencyMap& map, const JointPose& pose, double limit_cells) {
  for (std::size_t k = 0; k < map.dimension(); ++k) {
    const auto& axis = map.axes()[k];
    const double q = pose.joints[k];
    double excess = 0.0;
    if (q < axis.front()) excess = (axis.front() - q) / (axis[1] - axis[0]);
    if (q > axis.back()) excess = (q - axis.back()) / (axis[axis.size() - 1] - axis[axis.size() - 2]);
    if (excess > limit_cells + 1e-12) {
      throw Error(ErrorCode::OutOfDomain, "pose " + pose.to_string() + " lies beyond the extrapolation limit on joint " +
                                              std::to_string(k + 1));
    }
  }
}

}  // namespace

std::string JointPose::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < joints.size(); ++i) {
    if (i > 0) s += ", ";
    s += format_number(joints[i]);
  }
  return s + ")";
}

FrequencyMap::FrequencyMap(std::vector<std::vector<double>> axes, std::vector<std::vector<double>> values,
                           std::optional<std::vector<std::vector<double>>> k0_grid, double k0_scalar,
                           std::map<std::string, std::string> metadata)
    : axes_(std::move(axes)),
      values_(std::move(values)),
      k0_grid_(std::move(k0_grid)),
      k0_scalar_(k0_scalar),
      metadata_(std::move(metadata)) {
  if (axes_.empty()) input_error("map needs at least one joint axis");
  if (axes_.size() > 16) input_error("map dimension is unreasonably large");
  for (const auto& axis : axes_) {
    if (axis.size() < 2) input_error("every map axis needs at least 2 points");
    for (std::size_t i = 0; i < axis.size(); ++i) {
      if (!std::isfinite(axis[i])) input_error("map axis contains a non-finite angle");
      if (i > 0 && !(axis[i] > axis[i - 1])) input_error("map axes must be strictly increasing");
    }
  }
  if (values_.empty()) input_error("map needs at least one mode");
  const std::size_t nodes = node_count();
  for (const auto& grid : values_) {
    if (grid.size() != nodes) {
      throw Error(ErrorCode::Grid, "mode grid has " + std::to_string(grid.size()) + " values, expected " +
                                       std::to_string(nodes));
    }
    for (double f : grid) {
      if (!std::isfinite(f) || f <= 0.0) input_error("map frequencies must be positive");
    }
  }
  for (std::size_t m = 1; m < values_.size(); ++m) {
    for (std::size_t i = 0; i < nodes; ++i) {
      if (!(values_[m][i] > values_[m - 1][i])) {
        input_error("mode " + std::to_string(m + 1) + " is not above mode " + std::to_string(m) + " at node " +
                    node_pose(i).to_string());
      }
    }
  }
  if (!std::isfinite(k0_scalar_) || k0_scalar_ <= 0.0 || k0_scalar_ > 1.0) {
    throw Error(ErrorCode::ParameterDomain, "map k0 must lie in (0, 1]");
  }
  if (k0_grid_) {
    if (k0_grid_->size() != values_.size()) input_error("k0 grid must have one surface per mode");
    for (const auto& grid : *k0_grid_) {
      if (grid.size() != nodes) throw Error(ErrorCode::Grid, "k0 grid size does not match the axes");
      for (double k : grid) {
        if (!std::isfinite(k) || k <= 0.0 || k > 1.0) {
          throw Error(ErrorCode::ParameterDomain, "map k0 values must lie in (0, 1]");
        }
      }
    }
  }
}

std::size_t FrequencyMap::node_count() const noexcept {
  std::size_t n = 1;
  for (const auto& axis : axes_) n *= axis.size();
  return n;
}

std::size_t FrequencyMap::flat_index(const std::vector<std::size_t>& idx) const {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < axes_.size(); ++k) flat = flat * axes_[k].size() + idx[k];
  return flat;
}

JointPose FrequencyMap::node_pose(std::size_t flat) const {
  JointPose pose;
  pose.joints.resize(axes_.size());
  for (std::size_t k = axes_.size(); k-- > 0;) {
    pose.joints[k] = axes_[k][flat % axes_[k].size()];
    flat /= axes_[k].size();
  }
  return pose;
}

bool FrequencyMap::contains(const JointPose& pose) const {
  if (pose.size() != dimension()) return false;
  for (std::size_t k = 0; k < dimension(); ++k) {
    const double q = pose.joints[k];
    if (!(q >= axes_[k].front() && q <= axes_[k].back())) return false;
  }
  return true;
}

FrequencyMap build_map(const std::vector<PoseMeasurement>& measurements,
                       std::map<std::string, std::string> metadata) {
  if (measurements.empty()) input_error("no measurements to build a map from");
  const std::size_t dim = measurements.front().pose.size();
  const std::size_t modes = measurements.front().peaks.size();
  if (dim == 0) input_error("measurement poses are empty");
  if (modes == 0) input_error("measurements carry no modes");

  std::vector<std::vector<double>> axes(dim);
  for (const auto& m : measurements) {
    if (m.pose.size() != dim) input_error("measurement poses differ in joint count");
    if (m.peaks.size() != modes) {
      input_error("pose " + m.pose.to_string() + " has " + std::to_string(m.peaks.size()) + " modes, expected " +
                  std::to_string(modes));
    }
    for (std::size_t k = 0; k < dim; ++k) axes[k].push_back(m.pose.joints[k]);
  }
  for (auto& axis : axes) {
    std::sort(axis.begin(), axis.end());
    std::vector<double> unique;
    for (double q : axis) {
      if (unique.empty() || q - unique.back() > kAxisTolerance) unique.push_back(q);
    }
    if (unique.size() < 2) input_error("each joint needs at least 2 distinct grid angles");
    axis = std::move(unique);
  }

  std::size_t nodes = 1;
  for (const auto& axis : axes) nodes *= axis.size();
  std::vector<std::vector<double>> values(modes, std::vector<double>(nodes, 0.0));
  std::vector<bool> seen(nodes, false);

  for (const auto& m : measurements) {
    std::size_t flat = 0;
    for (std::size_t k = 0; k < dim; ++k) {
      const auto& axis = axes[k];
      const auto it = std::lower_bound(axis.begin(), axis.end(), m.pose.joints[k] - kAxisTolerance);
      flat = flat * axis.size() + static_cast<std::size_t>(it - axis.begin());
    }
    if (seen[flat]) input_error("duplicate measurement at pose " + m.pose.to_string());
    seen[flat] = true;
    auto peaks = m.peaks;
    std::sort(peaks.begin(), peaks.end(),
              [](const ModePeak& a, const ModePeak& b) { return a.frequency < b.frequency; });
    for (std::size_t j = 0; j < modes; ++j) values[j][flat] = peaks[j].frequency;
  }

  FrequencyMap probe(axes, std::vector<std::vector<double>>(1, std::vector<double>(nodes, 1.0)));
  std::string missing;
  std::size_t missing_count = 0;
  for (std::size_t i = 0; i < nodes; ++i) {
    if (seen[i]) continue;
    if (missing_count++ > 0) missing += ", ";
    missing += probe.node_pose(i).to_string();
  }
  if (missing_count > 0) {
    throw Error(ErrorCode::Grid, "incomplete grid: missing " + std::to_string(missing_count) + " pose(s): " + missing);
  }
  return FrequencyMap(std::move(axes), std::move(values), std::nullopt, 1.0, std::move(metadata));
}

double interpolate(const FrequencyMap& map, const JointPose& pose, std::size_t mode) {
  check_pose(map, pose);
  check_mode(map, mode);
  if (!map.contains(pose)) {
    throw Error(ErrorCode::OutOfDomain, "pose " + pose.to_string() + " lies outside the map");
  }
  return blend(map, map.values(mode), locate_all(map, pose));
}

Extrapolated extrapolate(const FrequencyMap& map, const JointPose& pose, std::size_t mode,
                         const ExtrapolationOptions& options) {
  check_pose(map, pose);
  check_mode(map, mode);
  if (map.contains(pose)) return {interpolate(map, pose, mode), false};
  check_extrapolation_limit(map, pose, options.limit_cells);
  const double v = blend(map, map.values(mode), locate_all(map, pose));
  return {std::max(v, options.floor_hz), true};
}

ShaperParams shaper_params_at(const FrequencyMap& map, const JointPose& pose, std::size_t mode,
                              const K0Policy& policy, bool allow_extrapolation) {
  const double f = allow_extrapolation ? extrapolate(map, pose, mode).value : interpolate(map, pose, mode);
  ShaperParams params;
  params.t0 = 1.0 / (2.0 * f);
  if (policy.kind == K0Policy::Kind::Fixed) {
    params.k0 = policy.value;
  } else if (map.has_k0_grid()) {
    // Same weights as the frequency surface; clamp keeps extrapolated values valid.
    const double k = blend(map, map.k0_grid()[mode], locate_all(map, pose));
    params.k0 = std::clamp(k, 1e-6, 1.0);
  } else {
    params.k0 = map.k0_scalar();
  }
  params.validate();
  return params;
}

}  // namespace vibshape
