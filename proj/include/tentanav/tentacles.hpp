#pragma once

// Tentacle bank: straight-ray sampling paths fixed to the robot frame and,
// for each of them, the nearby voxels classified as Priority or Support.

#include "tentanav/geometry.hpp"
#include "tentanav/grid.hpp"
#include "tentanav/params.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace tentanav {

struct Tentacle {
  std::size_t id = 0;
  double yaw = 0.0;
  double pitch = 0.0;
  double length = 0.0;
  // samples[i] is sampling point i+1, at distance (i+1) * length / n.
  std::vector<Vec3> samples;

  Vec3 heading() const { return direction(yaw, pitch); }
  std::size_t sample_count() const { return samples.size(); }
  double spacing() const { return length / static_cast<double>(samples.size()); }
};

enum class VoxelClass : std::uint8_t { support = 0, priority = 1 };

struct ClassifiedVoxel {
  VoxelIndex index = 0;
  std::uint16_t sample = 0;  // 0-based index of the closest sampling point
  VoxelClass cls = VoxelClass::support;
  double weight = 0.0;

  bool priority() const { return cls == VoxelClass::priority; }
  bool operator==(const ClassifiedVoxel&) const = default;
};

// Evenly spaced angles over [-coverage/2, +coverage/2]. The integer numerator
// keeps mirrored angles exact negations of each other.
inline double spread_angle(int i, int n, double coverage)
{
  if (n <= 1) return 0.0;
  return coverage * static_cast<double>(2 * i - (n - 1)) / static_cast<double>(2 * (n - 1));
}

// Tentacle ids run yaw-fastest: id = pitch_index * n_yaw + yaw_index.
inline std::vector<Tentacle> generate_tentacles(const OfflineParams& p)
{
  if (p.n_yaw < 1 || p.n_pitch < 1) throw std::invalid_argument("tentacle counts must be >= 1");
  if (p.samples_per_tentacle < 1) throw std::invalid_argument("samples_per_tentacle must be >= 1");

  std::vector<Tentacle> out;
  out.reserve(p.tentacle_count());
  const auto n_s = static_cast<std::size_t>(p.samples_per_tentacle);
  for (int ip = 0; ip < p.n_pitch; ++ip) {
    for (int iy = 0; iy < p.n_yaw; ++iy) {
      Tentacle t;
      t.id = out.size();
      t.yaw = spread_angle(iy, p.n_yaw, p.yaw_coverage);
      t.pitch = spread_angle(ip, p.n_pitch, p.pitch_coverage);
      t.length = p.tentacle_length;
      const Vec3 dir = t.heading();
      t.samples.reserve(n_s);
      for (std::size_t k = 1; k <= n_s; ++k)
        t.samples.push_back(dir * (p.tentacle_length * static_cast<double>(k) / static_cast<double>(n_s)));
      out.push_back(std::move(t));
    }
  }
  return out;
}

// Closest sampling point by squared distance; the lowest index wins ties.
inline std::pair<std::size_t, double> closest_sample(const Vec3& p, std::span<const Vec3> samples)
{
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double d2 = (p - samples[k]).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = k;
    }
  }
  return {best, best_d2};
}

// Class and weight for a voxel at `distance` from its closest sample, or
// nullopt when it is farther than tau_S.
inline std::optional<std::pair<VoxelClass, double>> classify_distance(double distance,
                                                                       const OfflineParams& p)
{
  if (distance < p.tau_priority) return std::pair{VoxelClass::priority, p.beta_max};
  if (distance < p.tau_support)
    return std::pair{VoxelClass::support, p.beta_max / (p.alpha_beta * distance)};
  return std::nullopt;
}

// Scans only the voxels inside the samples' bounding box inflated by tau_S;
// every voxel outside it is farther than tau_S from all samples. Output is
// sorted by voxel index.
inline std::vector<ClassifiedVoxel> classify_voxels(const Tentacle& t, const OfflineParams& p,
                                                    const GridDims& dims)
{
  std::vector<ClassifiedVoxel> out;
  if (t.samples.empty()) return out;

  Vec3 lo = t.samples.front();
  Vec3 hi = lo;
  for (const Vec3& s : t.samples) {
    lo = lo.cwiseMin(s);
    hi = hi.cwiseMax(s);
  }
  lo.array() -= p.tau_support;
  hi.array() += p.tau_support;

  const VoxelCell c_lo = cell_of(lo, dims);
  const VoxelCell c_hi = cell_of(hi, dims);
  const int x0 = std::max(0, c_lo.x), x1 = std::min(dims.counts[0] - 1, c_hi.x);
  const int y0 = std::max(0, c_lo.y), y1 = std::min(dims.counts[1] - 1, c_hi.y);
  const int z0 = std::max(0, c_lo.z), z1 = std::min(dims.counts[2] - 1, c_hi.z);

  const double tau_s2 = p.tau_support * p.tau_support;
  for (int z = z0; z <= z1; ++z) {
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const VoxelCell cell{x, y, z};
        const Vec3 center = cell_center(cell, dims);
        const auto [k, d2] = closest_sample(center, t.samples);
        if (d2 >= tau_s2) continue;
        const auto cls = classify_distance(std::sqrt(d2), p);
        if (!cls) continue;
        out.push_back({index_of(cell, dims), static_cast<std::uint16_t>(k), cls->first, cls->second});
      }
    }
  }
  return out;
}

class DegenerateBankError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Immutable after construction; share it read-only between navigators.
class TentacleBank {
 public:
  // workers > 1 splits voxel extraction across threads.
  static TentacleBank build(const OfflineParams& p, unsigned workers = 1)
  {
    validate(p);
    TentacleBank bank;
    bank.params_ = p;
    bank.dims_ = GridDims::from(p);
    bank.tentacles_ = generate_tentacles(p);
    const std::size_t n = bank.tentacles_.size();
    bank.voxels_.resize(n);
    bank.total_weight_.assign(n, 0.0);

    auto work = [&bank, &p](std::size_t begin, std::size_t end, std::size_t stride) {
      for (std::size_t j = begin; j < end; j += stride) {
        bank.voxels_[j] = classify_voxels(bank.tentacles_[j], p, bank.dims_);
        double total = 0.0;
        for (const auto& v : bank.voxels_[j]) total += v.weight;
        bank.total_weight_[j] = total;
      }
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    if (workers == 1) {
      work(0, n, 1);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, n, workers);
    }
    return bank;
  }

  const OfflineParams& params() const { return params_; }
  const GridDims& dims() const { return dims_; }
  std::size_t size() const { return tentacles_.size(); }
  std::size_t samples_per_tentacle() const
  {
    return static_cast<std::size_t>(params_.samples_per_tentacle);
  }

  const std::vector<Tentacle>& tentacles() const { return tentacles_; }
  const Tentacle& tentacle(std::size_t j) const { return tentacles_.at(j); }
  std::span<const ClassifiedVoxel> voxels(std::size_t j) const { return voxels_.at(j); }
  double total_weight(std::size_t j) const { return total_weight_.at(j); }

  std::size_t classified_count() const
  {
    std::size_t n = 0;
    for (const auto& v : voxels_) n += v.size();
    return n;
  }

  // The tentacle nearest to straight ahead (zero yaw and pitch).
  std::size_t central_tentacle() const
  {
    std::size_t best = 0;
    double best_dev = std::numeric_limits<double>::infinity();
    for (const auto& t : tentacles_) {
      const double dev = std::abs(t.yaw) + std::abs(t.pitch);
      if (dev < best_dev) {
        best_dev = dev;
        best = t.id;
      }
    }
    return best;
  }

 private:
  TentacleBank() = default;

  OfflineParams params_;
  GridDims dims_;
  std::vector<Tentacle> tentacles_;
  std::vector<std::vector<ClassifiedVoxel>> voxels_;
  std::vector<double> total_weight_;
};

}  // namespace tentanav
