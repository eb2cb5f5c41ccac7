#pragma once

// Robot-centered voxel occupancy grid stored as a flat array.
//
// Cell coordinates along each axis are  n/2 + floor(coord / voxel),  and the
// linear index is  ix + iy * nx + iz * nx * ny.  The robot sits at the
// corner shared by the eight central voxels when the counts are even.

#include "tentanav/geometry.hpp"
#include "tentanav/params.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace tentanav {

using VoxelIndex = std::uint32_t;

struct GridDims {
  std::array<int, 3> counts{};
  double voxel = 1.0;

  static GridDims from(const OfflineParams& p) { return {p.grid_counts, p.voxel_dim}; }

  std::size_t size() const
  {
    return static_cast<std::size_t>(counts[0]) * static_cast<std::size_t>(counts[1]) *
           static_cast<std::size_t>(counts[2]);
  }

  // Width, length and height of the grid.
  Vec3 extents() const
  {
    return {voxel * counts[0], voxel * counts[1], voxel * counts[2]};
  }

  bool operator==(const GridDims&) const = default;
};

struct VoxelCell {
  int x = 0;
  int y = 0;
  int z = 0;
  bool operator==(const VoxelCell&) const = default;
};

inline int axis_cell(double coord, int count, double voxel)
{
  const double c = std::floor(coord / voxel);
  // Saturate so huge coordinates do not overflow the int conversion.
  if (c < -1e9) return -1;
  if (c > 1e9) return count;
  return count / 2 + static_cast<int>(c);
}

inline bool in_bounds(const VoxelCell& c, const GridDims& d)
{
  return c.x >= 0 && c.x < d.counts[0] && c.y >= 0 && c.y < d.counts[1] && c.z >= 0 &&
         c.z < d.counts[2];
}

inline VoxelCell cell_of(const Vec3& p, const GridDims& d)
{
  return {axis_cell(p.x(), d.counts[0], d.voxel), axis_cell(p.y(), d.counts[1], d.voxel),
          axis_cell(p.z(), d.counts[2], d.voxel)};
}

inline VoxelIndex index_of(const VoxelCell& c, const GridDims& d)
{
  return static_cast<VoxelIndex>(c.x + c.y * d.counts[0] + c.z * d.counts[0] * d.counts[1]);
}

inline VoxelCell cell_of(std::size_t o, const GridDims& d)
{
  const auto nx = static_cast<std::size_t>(d.counts[0]);
  const auto ny = static_cast<std::size_t>(d.counts[1]);
  return {static_cast<int>(o % nx), static_cast<int>((o / nx) % ny),
          static_cast<int>(o / (nx * ny))};
}

// Point in the robot frame to linear index, or nullopt outside the grid.
inline std::optional<VoxelIndex> linearize(const Vec3& p, const GridDims& d)
{
  const VoxelCell c = cell_of(p, d);
  if (!in_bounds(c, d)) return std::nullopt;
  return index_of(c, d);
}

inline Vec3 cell_center(const VoxelCell& c, const GridDims& d)
{
  return {(c.x - d.counts[0] / 2 + 0.5) * d.voxel, (c.y - d.counts[1] / 2 + 0.5) * d.voxel,
          (c.z - d.counts[2] / 2 + 0.5) * d.voxel};
}

// Voxel center of linear index o.
inline Vec3 delinearize(std::size_t o, const GridDims& d)
{
  if (o >= d.size()) throw std::out_of_range("voxel index out of range");
  return cell_center(cell_of(o, d), d);
}

// ---------------------------------------------------------------------------

struct CloudPoint {
  Vec3 position;  // sensor frame
  double belief = 1.0;
};

struct PointCloud {
  std::vector<CloudPoint> points;
  Pose sensor_to_world = Pose::Identity();
  double timestamp = 0.0;
};

// Fixed-capacity buffer of the most recent scans.
class ScanHistory {
 public:
  explicit ScanHistory(std::size_t capacity) : capacity_(std::max<std::size_t>(1, capacity)) {}

  void push(PointCloud cloud)
  {
    if (scans_.size() == capacity_) scans_.pop_front();
    scans_.push_back(std::move(cloud));
  }

  void clear() { scans_.clear(); }
  std::size_t size() const { return scans_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<PointCloud>& scans() const { return scans_; }

 private:
  std::size_t capacity_;
  std::deque<PointCloud> scans_;
};

class OccupancyGrid {
 public:
  explicit OccupancyGrid(const GridDims& dims)
      : dims_(dims), belief_(dims.size(), 0.0f), sum_(dims.size(), 0.0), count_(dims.size(), 0)
  {
    if (dims.size() == 0) throw std::invalid_argument("grid must contain voxels");
    if (dims.size() > std::numeric_limits<VoxelIndex>::max())
      throw std::invalid_argument("grid too large for 32-bit voxel indices");
  }

  const GridDims& dims() const { return dims_; }
  std::size_t size() const { return belief_.size(); }

  // Average belief of voxel o; 0 for voxels that received no points.
  float belief(std::size_t o) const { return belief_[o]; }
  std::span<const float> beliefs() const { return belief_; }
  std::uint32_t count(std::size_t o) const { return count_[o]; }

  // Voxels touched since the last clear, in first-touch order.
  std::span<const VoxelIndex> occupied() const { return touched_; }

  void clear()
  {
    for (VoxelIndex o : touched_) {
      belief_[o] = 0.0f;
      sum_[o] = 0.0;
      count_[o] = 0;
    }
    touched_.clear();
  }

  // Adds one robot-frame point. Returns false when it falls outside the grid.
  bool accumulate(const Vec3& p_robot, double belief)
  {
    const auto o = linearize(p_robot, dims_);
    if (!o) return false;
    belief = std::clamp(belief, 0.0, 1.0);
    if (count_[*o] == 0) touched_.push_back(*o);
    sum_[*o] += belief;
    ++count_[*o];
    belief_[*o] = std::min(1.0f, static_cast<float>(sum_[*o] / count_[*o]));
    return true;
  }

  // Clears the grid and refills it from every buffered scan, expressed in the
  // current robot frame.
  template <typename Range>
  void rebuild(const Range& history, const Pose& robot_to_world)
  {
    clear();
    const Pose world_to_robot = robot_to_world.inverse(Eigen::Isometry);
    for (const PointCloud& cloud : history) {
      const Pose sensor_to_robot = world_to_robot * cloud.sensor_to_world;
      for (const CloudPoint& pt : cloud.points) accumulate(sensor_to_robot * pt.position, pt.belief);
    }
  }

 private:
  GridDims dims_;
  std::vector<float> belief_;
  std::vector<double> sum_;
  std::vector<std::uint32_t> count_;
  std::vector<VoxelIndex> touched_;
};

}  // namespace tentanav
