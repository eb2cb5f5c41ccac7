#pragma once

// CSV / JSON writers for run artifacts: trajectory, per-cycle scores,
// grid dumps, tentacle dumps and the final NavResult.

#include "tentanav/grid.hpp"
#include "tentanav/heuristics.hpp"
#include "tentanav/navigator.hpp"
#include "tentanav/tentacles.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <ostream>
#include <span>
#include <string>

namespace tentanav::io {

inline std::string num(double v, int digits = 6)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline constexpr const char* kTrajectoryHeader =
    "t,x,y,z,yaw,pitch,selected_tentacle,F_best,nav_label";

inline void write_trajectory_row(std::ostream& out, const CycleRecord& c)
{
  out << num(c.t, 3) << ',' << num(c.position.x()) << ',' << num(c.position.y()) << ','
      << num(c.position.z()) << ',' << num(c.yaw) << ',' << num(c.pitch) << ',';
  if (c.selected) out << *c.selected;
  out << ',' << num(c.best_cost) << ',' << static_cast<int>(c.nav) << '\n';
}

inline void write_trajectory_csv(std::ostream& out, std::span<const CycleRecord> cycles)
{
  out << kTrajectoryHeader << '\n';
  for (const auto& c : cycles) write_trajectory_row(out, c);
}

inline constexpr const char* kScoresHeader = "cycle,tentacle,nav,clear,clut,close_raw,smo_raw,F";

inline void write_scores_rows(std::ostream& out, std::size_t cycle,
                              std::span<const HeuristicScores> scores)
{
  for (std::size_t j = 0; j < scores.size(); ++j) {
    const auto& s = scores[j];
    out << cycle << ',' << j << ',' << static_cast<int>(s.nav) << ',' << num(s.clear) << ','
        << num(s.clut) << ',' << num(s.close_raw) << ',' << num(s.smo_raw) << ',' << num(s.cost)
        << '\n';
  }
}

// Occupied voxels only.
inline void write_grid_csv(std::ostream& out, const OccupancyGrid& grid)
{
  out << "ix,iy,iz,belief\n";
  for (std::size_t o = 0; o < grid.size(); ++o) {
    if (grid.belief(o) <= 0.0f) continue;
    const VoxelCell c = cell_of(o, grid.dims());
    out << c.x << ',' << c.y << ',' << c.z << ',' << num(grid.belief(o)) << '\n';
  }
}

inline void write_tentacles_jsonl(std::ostream& out, const TentacleBank& bank)
{
  for (std::size_t j = 0; j < bank.size(); ++j) {
    const Tentacle& t = bank.tentacle(j);
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& s : t.samples) samples.push_back({s.x(), s.y(), s.z()});
    std::size_t priority = 0, support = 0;
    for (const auto& v : bank.voxels(j)) (v.priority() ? priority : support) += 1;
    const nlohmann::json rec{{"id", t.id},
                             {"yaw", t.yaw},
                             {"pitch", t.pitch},
                             {"length", t.length},
                             {"samples", samples},
                             {"priority_voxels", priority},
                             {"support_voxels", support}};
    out << rec.dump() << '\n';
  }
}

inline nlohmann::json to_json(const NavResult& r)
{
  return {{"success", r.success},
          {"state", std::string(to_string(r.final_state))},
          {"failure", r.failure ? nlohmann::json(std::string(to_string(*r.failure))) : nlohmann::json(nullptr)},
          {"duration_s", r.duration},
          {"path_length_m", r.path_length},
          {"goals_reached", r.goals_reached},
          {"cycles", r.cycles.size()}};
}

}  // namespace tentanav::io
