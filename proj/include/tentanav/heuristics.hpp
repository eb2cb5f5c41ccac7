#pragma once

// Per-cycle tentacle scoring: occupancy bins, navigability, clearance,
// clutter, goal closeness, smoothness, weighted cost and best selection.

#include "tentanav/geometry.hpp"
#include "tentanav/grid.hpp"
#include "tentanav/params.hpp"
#include "tentanav/tentacles.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace tentanav {

// Values match the ternary label used in logs.
enum class Navigability : int { non_navigable = 0, navigable = 1, temporarily_navigable = -1 };

inline bool drivable(Navigability n) { return n != Navigability::non_navigable; }

inline std::string_view to_string(Navigability n)
{
  switch (n) {
    case Navigability::navigable: return "navigable";
    case Navigability::non_navigable: return "non_navigable";
    case Navigability::temporarily_navigable: return "temporarily_navigable";
  }
  return "?";
}

struct OccupancyBins {
  // counts[i]: occupied Priority voxels whose closest sample is i (0-based).
  std::vector<std::uint32_t> counts;
  double total_weight = 0.0;     // sum of beta over Priority and Support voxels
  double occupied_weight = 0.0;  // sum of beta * belief
};

inline void bin_occupancy(std::span<const ClassifiedVoxel> voxels, const OccupancyGrid& grid,
                          std::size_t n_samples, OccupancyBins& out)
{
  out.counts.assign(n_samples, 0);
  out.total_weight = 0.0;
  out.occupied_weight = 0.0;
  const std::span<const float> belief = grid.beliefs();
  for (const ClassifiedVoxel& v : voxels) {
    const double a = belief[v.index];
    out.total_weight += v.weight;
    out.occupied_weight += v.weight * a;
    if (v.priority() && a > 0.0) ++out.counts[v.sample];
  }
}

inline OccupancyBins bin_occupancy(std::span<const ClassifiedVoxel> voxels,
                                   const OccupancyGrid& grid, std::size_t n_samples)
{
  OccupancyBins bins;
  bin_occupancy(voxels, grid, n_samples, bins);
  return bins;
}

struct NavigabilityResult {
  Navigability label = Navigability::navigable;
  double obstacle_distance = 0.0;             // l_obs
  std::optional<std::size_t> first_occupied;  // 0-based sample index
};

inline double crash_distance(double length, const OnlineParams& online)
{
  return length / online.alpha_crash;
}

// The label depends on l_obs only: l_obs = l is navigable, which includes an
// obstacle first seen at the last sample. An obstacle exactly at the crash
// distance counts as temporarily navigable; only l_obs strictly below it is
// non-navigable.
inline NavigabilityResult navigability(const OccupancyBins& bins, const OnlineParams& online,
                                       double length, std::size_t n_samples)
{
  NavigabilityResult r;
  for (std::size_t i = 0; i < bins.counts.size() && i < n_samples; ++i) {
    if (static_cast<double>(bins.counts[i]) > online.tau_d_err) {
      r.first_occupied = i;
      break;
    }
  }
  if (!r.first_occupied || *r.first_occupied + 1 == n_samples) {
    r.obstacle_distance = length;
    r.label = Navigability::navigable;
    return r;
  }
  const double k = static_cast<double>(*r.first_occupied + 1);
  r.obstacle_distance = length * k / static_cast<double>(n_samples);
  r.label = r.obstacle_distance < crash_distance(length, online)
                ? Navigability::non_navigable
                : Navigability::temporarily_navigable;
  return r;
}

inline double clearance(double obstacle_distance, double length)
{
  return std::clamp(1.0 - obstacle_distance / length, 0.0, 1.0);
}

inline double clutter(const OccupancyBins& bins)
{
  if (!(bins.total_weight > 0.0))
    throw DegenerateBankError("tentacle has no classified voxels (zero total weight)");
  return std::clamp(bins.occupied_weight / bins.total_weight, 0.0, 1.0);
}

// 0-based index of the sample used by closeness and smoothness.
inline std::size_t designated_index(const OnlineParams& online, std::size_t n_samples)
{
  if (online.designated_sample <= 0) return n_samples - 1;
  return std::min(n_samples, static_cast<std::size_t>(online.designated_sample)) - 1;
}

inline double goal_closeness(const Tentacle& t, const Pose& robot_to_world, const Vec3& goal,
                             std::size_t sample)
{
  return (robot_to_world * t.samples.at(sample) - goal).norm();
}

inline double smoothness(const Tentacle& t, const Tentacle* previous_best, std::size_t sample)
{
  if (previous_best == nullptr || previous_best->id == t.id) return 0.0;
  return (t.samples.at(sample) - previous_best->samples.at(sample)).norm();
}

struct HeuristicScores {
  Navigability nav = Navigability::navigable;
  double clear = 0.0;
  double clut = 0.0;
  double close_raw = 0.0;  // meters
  double close = 0.0;      // min-max normalized over the cycle
  double smo_raw = 0.0;    // meters
  double smo = 0.0;
  double cost = 0.0;
  double obstacle_distance = 0.0;
  std::optional<std::size_t> first_occupied;
};

// Min-max normalizes closeness and smoothness across all tentacles of the
// cycle. A constant metric normalizes to 0.
inline void normalize(std::span<HeuristicScores> scores)
{
  if (scores.empty()) return;
  auto rescale = [&](double HeuristicScores::*raw, double HeuristicScores::*norm) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : scores) {
      lo = std::min(lo, s.*raw);
      hi = std::max(hi, s.*raw);
    }
    const double span = hi - lo;
    for (auto& s : scores) s.*norm = span > 0.0 ? (s.*raw - lo) / span : 0.0;
  };
  rescale(&HeuristicScores::close_raw, &HeuristicScores::close);
  rescale(&HeuristicScores::smo_raw, &HeuristicScores::smo);
}

inline double cost(const HeuristicScores& s, const OnlineParams& online)
{
  return online.lambda_clear * s.clear + online.lambda_clut * s.clut +
         online.lambda_close * s.close + online.lambda_smo * s.smo;
}

// Lowest-cost drivable tentacle. Ties prefer the previous best, then the
// lowest id. nullopt when every tentacle is non-navigable.
inline std::optional<std::size_t> select_best(std::span<const HeuristicScores> scores,
                                              const OnlineParams& online,
                                              std::optional<std::size_t> previous_best = std::nullopt)
{
  std::optional<std::size_t> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (!drivable(scores[j].nav)) continue;
    const double f = cost(scores[j], online);
    if (!best || f < best_cost) {
      best = j;
      best_cost = f;
    } else if (f == best_cost && previous_best && j == *previous_best) {
      best = j;
    }
  }
  return best;
}

// Scores every tentacle of the bank against the grid. `bins` is scratch space
// reused across calls.
struct TentacleScorer {
  const TentacleBank* bank = nullptr;

  void occupancy(const OccupancyGrid& grid, std::vector<OccupancyBins>& bins) const
  {
    bins.resize(bank->size());
    for (std::size_t j = 0; j < bank->size(); ++j)
      bin_occupancy(bank->voxels(j), grid, bank->samples_per_tentacle(), bins[j]);
  }

  void metrics(std::span<const OccupancyBins> bins, const OnlineParams& online,
               const Pose& robot_to_world, const Vec3& goal,
               std::optional<std::size_t> previous_best, std::vector<HeuristicScores>& out) const
  {
    const std::size_t n_s = bank->samples_per_tentacle();
    const std::size_t ds = designated_index(online, n_s);
    const Tentacle* prev = previous_best ? &bank->tentacle(*previous_best) : nullptr;
    out.resize(bank->size());
    for (std::size_t j = 0; j < bank->size(); ++j) {
      const Tentacle& t = bank->tentacle(j);
      HeuristicScores& s = out[j];
      const NavigabilityResult nav = navigability(bins[j], online, t.length, n_s);
      s.nav = nav.label;
      s.obstacle_distance = nav.obstacle_distance;
      s.first_occupied = nav.first_occupied;
      s.clear = clearance(nav.obstacle_distance, t.length);
      s.clut = clutter(bins[j]);
      s.close_raw = goal_closeness(t, robot_to_world, goal, ds);
      s.smo_raw = smoothness(t, prev, ds);
    }
    normalize(out);
    for (auto& s : out) s.cost = cost(s, online);
  }
};

}  // namespace tentanav
