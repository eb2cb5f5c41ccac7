#pragma once

// Independent reference implementations used as test oracles. They follow
// the textbook definitions directly and share no code paths with the
// library beyond the plain data types.

#include "tentanav/tentanav.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using tentanav::Vec3;

// Voxel center of linear index o for counts n and voxel size d.
inline Vec3 center(std::size_t o, const std::array<int, 3>& n, double d)
{
  const std::size_t ix = o % n[0];
  const std::size_t iy = (o / n[0]) % n[1];
  const std::size_t iz = o / (static_cast<std::size_t>(n[0]) * n[1]);
  auto c = [d](std::size_t i, int count) {
    return (static_cast<double>(i) - static_cast<double>(count / 2) + 0.5) * d;
  };
  return {c(ix, n[0]), c(iy, n[1]), c(iz, n[2])};
}

struct Classified {
  std::size_t sample;
  bool priority;
  double beta;
};

// All-pairs scan: every voxel against every sample.
inline std::map<std::uint32_t, Classified> classify(const std::vector<Vec3>& samples,
                                                    const tentanav::OfflineParams& p)
{
  std::map<std::uint32_t, Classified> out;
  const auto& n = p.grid_counts;
  const std::size_t total = static_cast<std::size_t>(n[0]) * n[1] * n[2];
  for (std::size_t o = 0; o < total; ++o) {
    const Vec3 c = center(o, n, p.voxel_dim);
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const double d2 = (c - samples[k]).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = k;
      }
    }
    const double best_d = std::sqrt(best_d2);
    if (best_d < p.tau_priority)
      out[static_cast<std::uint32_t>(o)] = {best, true, p.beta_max};
    else if (best_d < p.tau_support)
      out[static_cast<std::uint32_t>(o)] = {best, false, p.beta_max / (p.alpha_beta * best_d)};
  }
  return out;
}

// Ternary label straight from the definition: the first bin above the error
// threshold gives l_obs = l k / n (or l when there is none), then
// 1 if l_obs = l, 0 if l_obs < l / alpha_crash, -1 otherwise.
inline int navigability(const std::vector<std::uint32_t>& bins, double tau_err, double length,
                        double alpha_crash)
{
  const std::size_t n = bins.size();
  std::size_t k_obs = n;
  for (std::size_t k = 1; k <= n; ++k) {
    if (bins[k - 1] > tau_err) {
      k_obs = k;
      break;
    }
  }
  if (k_obs == n) return 1;  // l k / n = l
  const double l_obs = length * static_cast<double>(k_obs) / static_cast<double>(n);
  return l_obs < length / alpha_crash ? 0 : -1;
}

}  // namespace oracle

namespace fixtures {

inline tentanav::Config default_config()
{
  return tentanav::load_config(std::string(TENTANAV_SOURCE_DIR) + "/configs/default.json");
}

// Small grid and bank for fast closed-loop tests.
inline tentanav::Config small_config()
{
  tentanav::Config c;
  c.offline.voxel_dim = 0.2;
  c.offline.grid_counts = {60, 40, 30};
  c.offline.n_yaw = 9;
  c.offline.n_pitch = 3;
  c.offline.samples_per_tentacle = 15;
  c.offline.tentacle_length = 5.0;
  c.robot.sensor_range = {6.0, 6.0, 6.0};
  c.robot.sensor_resolution = 0.3;
  return c;
}

inline tentanav::sim::WorldMap empty_world(double half = 10.0)
{
  tentanav::sim::WorldMap m;
  m.id = "empty";
  m.bounds = {{-half, -half, 0.0}, {half, half, 12.0}};
  return m;
}

}  // namespace fixtures
