#pragma once

// Benchmark harness: repeated seeded trials per map with success / duration
// / path-length statistics, and per-stage timing studies over config variants.

#include "tentanav/navigator.hpp"
#include "tentanav/params.hpp"
#include "tentanav/sim.hpp"
#include "tentanav/tentacles.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace tentanav::bench {

struct TrialRecord {
  std::string map_id;
  std::uint64_t seed = 0;
  std::size_t trial = 0;
  bool success = false;
  double duration = 0.0;
  double path_length = 0.0;
  std::optional<FailureCause> failure;
  std::size_t goals_reached = 0;
  std::size_t cycles = 0;
  StageTimings timings;  // mean over cycles, ms
};

struct Stat {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 0;
};

inline Stat stat_of(const std::vector<double>& v)
{
  Stat s;
  s.n = v.size();
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

// Duration and path length statistics cover successful trials only.
struct MapSummary {
  std::string map_id;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  Stat duration;
  Stat path_length;
};

struct SuiteReport {
  std::vector<TrialRecord> records;
  std::vector<MapSummary> maps;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  Stat duration;
  Stat path_length;
};

struct SuiteOptions {
  std::size_t trials_per_map = 10;
  unsigned workers = 1;
  double time_limit = 90.0;
  double start_jitter = 0.2;      // meters, uniform in x and y
  double start_yaw_jitter = 0.1;  // radians
  std::shared_ptr<const TentacleBank> bank;  // built from the config when empty
};

// splitmix64 finalizer over (map seed, trial index).
inline std::uint64_t trial_seed(std::uint64_t map_seed, std::size_t trial)
{
  std::uint64_t z = map_seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(trial) + 1;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Start pose of a trial: the map's start perturbed by the trial seed.
inline RobotState trial_start(const sim::WorldMap& map, std::uint64_t seed, const SuiteOptions& opt)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RobotState s;
  s.position = map.start;
  s.position.x() += opt.start_jitter * u(rng);
  s.position.y() += opt.start_jitter * u(rng);
  s.yaw = wrap_angle(map.start_yaw + opt.start_yaw_jitter * u(rng));
  return s;
}

inline TrialRecord run_trial(const sim::WorldMap& map, std::size_t trial, std::uint64_t seed,
                             const Config& config, std::shared_ptr<const TentacleBank> bank,
                             const SuiteOptions& opt)
{
  TrialRecord rec;
  rec.map_id = map.id;
  rec.seed = seed;
  rec.trial = trial;
  if (map.goals.empty()) throw sim::MapError("map " + map.id + " has no goals");

  Navigator nav(config, std::move(bank));
  sim::SimWorld world(map, sim::SensorModel::from(config), config.robot, seed);
  const NavResult res = run(nav, world, trial_start(map, seed, opt), map.goals, opt.time_limit);
  rec.success = res.success;
  rec.duration = res.duration;
  rec.path_length = res.path_length;
  rec.failure = res.failure;
  rec.goals_reached = res.goals_reached;
  rec.cycles = res.cycles.size();
  rec.timings = res.mean_timings();
  return rec;
}

inline SuiteReport summarize(std::vector<TrialRecord> records)
{
  SuiteReport rep;
  rep.records = std::move(records);
  std::vector<double> all_dur, all_len;
  for (const auto& r : rep.records) {
    auto it = std::find_if(rep.maps.begin(), rep.maps.end(),
                           [&](const MapSummary& m) { return m.map_id == r.map_id; });
    if (it == rep.maps.end()) {
      rep.maps.emplace_back().map_id = r.map_id;
      it = std::prev(rep.maps.end());
    }
    ++it->trials;
    ++rep.trials;
    if (r.success) {
      ++it->successes;
      ++rep.successes;
      all_dur.push_back(r.duration);
      all_len.push_back(r.path_length);
    }
  }
  for (auto& m : rep.maps) {
    std::vector<double> dur, len;
    for (const auto& r : rep.records)
      if (r.map_id == m.map_id && r.success) {
        dur.push_back(r.duration);
        len.push_back(r.path_length);
      }
    m.success_rate = static_cast<double>(m.successes) / static_cast<double>(m.trials);
    m.duration = stat_of(dur);
    m.path_length = stat_of(len);
  }
  rep.success_rate =
      rep.trials ? static_cast<double>(rep.successes) / static_cast<double>(rep.trials) : 0.0;
  rep.duration = stat_of(all_dur);
  rep.path_length = stat_of(all_len);
  return rep;
}

// Runs trials_per_map trials on every map. Trials fan out over workers;
// record order is (map, trial) regardless of scheduling.
inline SuiteReport run_suite(const std::vector<sim::WorldMap>& maps, const Config& config,
                             SuiteOptions opt = {})
{
  validate(config);
  if (maps.empty()) return summarize({});
  auto bank = opt.bank ? opt.bank
                       : std::make_shared<const TentacleBank>(TentacleBank::build(config.offline));

  struct Job {
    std::size_t map;
    std::size_t trial;
  };
  std::vector<Job> jobs;
  for (std::size_t m = 0; m < maps.size(); ++m)
    for (std::size_t t = 0; t < opt.trials_per_map; ++t) jobs.push_back({m, t});
  std::vector<TrialRecord> records(jobs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto& map = maps[jobs[i].map];
      records[i] = run_trial(map, jobs[i].trial, trial_seed(map.seed, jobs[i].trial), config,
                             bank, opt);
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(opt.workers, static_cast<unsigned>(jobs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return summarize(std::move(records));
}

// The default protocol: one 20 x 20 m cylinder arena and nine 10 x 10 m
// forests at 0.2 obstacles per square meter.
inline std::vector<sim::WorldMap> standard_maps(std::uint64_t base_seed = 1)
{
  std::vector<sim::WorldMap> maps;
  maps.push_back(sim::generate_map(sim::MapKind::cylinders, base_seed,
                                   {{-10.0, -10.0, 0.0}, {10.0, 10.0, 12.0}}, 0.06));
  for (std::uint64_t i = 0; i < 9; ++i)
    maps.push_back(sim::generate_map(sim::MapKind::forest, base_seed + 100 + i,
                                     {{0.0, 0.0, 0.0}, {10.0, 10.0, 12.0}}, 0.2));
  return maps;
}

// ---------------------------------------------------------------------------
// Output

namespace detail {

inline std::string fixed(double v, int digits = 6)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline nlohmann::json stat_json(const Stat& s)
{
  if (s.n == 0) return nullptr;
  return {{"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"n", s.n}};
}

}  // namespace detail

// Timing columns come last so they can be stripped for reproducibility checks.
inline constexpr const char* kResultsHeader =
    "map_id,seed,trial,success,duration_s,path_length_m,failure,goals_reached,cycles,"
    "rebuild_ms,occ_info_ms,heuristics_ms,selection_ms,execution_ms";
inline constexpr std::size_t kResultsTimingColumns = 5;

inline void write_results_csv(std::ostream& out, const std::vector<TrialRecord>& records)
{
  using detail::fixed;
  out << kResultsHeader << '\n';
  for (const auto& r : records) {
    out << r.map_id << ',' << r.seed << ',' << r.trial << ',' << (r.success ? 1 : 0) << ','
        << fixed(r.duration) << ',' << fixed(r.path_length) << ','
        << (r.failure ? to_string(*r.failure) : "") << ',' << r.goals_reached << ',' << r.cycles
        << ',' << fixed(r.timings.rebuild, 4) << ',' << fixed(r.timings.occ_info, 4) << ','
        << fixed(r.timings.heuristics, 4) << ',' << fixed(r.timings.selection, 4) << ','
        << fixed(r.timings.execution, 4) << '\n';
  }
}

inline nlohmann::json summary_json(const SuiteReport& rep)
{
  nlohmann::json maps = nlohmann::json::array();
  for (const auto& m : rep.maps)
    maps.push_back({{"map_id", m.map_id},
                    {"trials", m.trials},
                    {"successes", m.successes},
                    {"success_rate", m.success_rate},
                    {"duration_s", detail::stat_json(m.duration)},
                    {"path_length_m", detail::stat_json(m.path_length)}});
  return {{"trials", rep.trials},
          {"successes", rep.successes},
          {"success_rate", rep.success_rate},
          {"duration_s", detail::stat_json(rep.duration)},
          {"path_length_m", detail::stat_json(rep.path_length)},
          {"maps", maps}};
}

// ---------------------------------------------------------------------------
// Stage timing

struct TimingVariant {
  std::string name;
  OfflineParams offline;
};

struct TimingRow {
  std::string name;
  double voxel_dim = 0.0;
  std::size_t tentacles = 0;
  std::size_t voxels = 0;
  std::size_t classified = 0;
  double grid_init_s = 0.0;
  double tentacle_init_s = 0.0;  // generation + voxel extraction
  StageTimings mean;             // ms per cycle
  StageTimings median;
  double median_total_ms = 0.0;
  std::size_t cycles = 0;
};

namespace detail {

inline double median(std::vector<double> v)
{
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

inline double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

// Times initialization and `cycles` navigation cycles on `scene` for one
// variant. Runs serially.
inline TimingRow time_variant(const TimingVariant& variant, const Config& base,
                              const sim::WorldMap& scene, std::size_t cycles)
{
  Config config = base;
  config.offline = variant.offline;
  validate(config);

  TimingRow row;
  row.name = variant.name;
  row.voxel_dim = config.offline.voxel_dim;

  auto t0 = std::chrono::steady_clock::now();
  { OccupancyGrid probe(GridDims::from(config.offline)); }
  row.grid_init_s = detail::seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  auto bank = std::make_shared<const TentacleBank>(TentacleBank::build(config.offline));
  row.tentacle_init_s = detail::seconds_since(t0);
  row.tentacles = bank->size();
  row.voxels = bank->dims().size();
  row.classified = bank->classified_count();

  Navigator nav(config, bank);
  sim::SimWorld world(scene, sim::SensorModel::from(config), config.robot);
  RobotState state;
  state.position = scene.start;
  state.yaw = scene.start_yaw;
  const Vec3 goal = scene.goals.empty() ? scene.start : scene.goals.front();

  std::vector<StageTimings> samples;
  samples.reserve(cycles);
  for (std::size_t c = 0; c < cycles; ++c) {
    PointCloud cloud = world.sense(state, c);
    StepResult step = nav.step(state, std::move(cloud), goal);
    tentanav::detail::StageClock clock;
    state = execute(state, step.command);
    step.diagnostics.timings.execution = clock.lap();
    samples.push_back(step.diagnostics.timings);
  }

  row.cycles = samples.size();
  StageTimings sum;
  std::vector<double> rb, oc, he, se, ex, tot;
  for (const auto& s : samples) {
    sum += s;
    rb.push_back(s.rebuild);
    oc.push_back(s.occ_info);
    he.push_back(s.heuristics);
    se.push_back(s.selection);
    ex.push_back(s.execution);
    tot.push_back(s.total());
  }
  if (!samples.empty()) row.mean = sum.scaled(1.0 / static_cast<double>(samples.size()));
  row.median = {detail::median(rb), detail::median(oc), detail::median(he), detail::median(se),
                detail::median(ex)};
  row.median_total_ms = detail::median(tot);
  return row;
}

inline std::vector<TimingRow> time_stages(const std::vector<TimingVariant>& variants,
                                          const Config& base, const sim::WorldMap& scene,
                                          std::size_t cycles = 100)
{
  std::vector<TimingRow> rows;
  for (const auto& v : variants) rows.push_back(time_variant(v, base, scene, cycles));
  return rows;
}

// The three variants of the reference study: d_v 0.2 and 0.1 at the base
// tentacle count, then d_v 0.1 with roughly twice the tentacles.
inline std::vector<TimingVariant> reference_variants(const OfflineParams& base)
{
  OfflineParams fine = base;
  fine.voxel_dim = base.voxel_dim / 2;
  for (auto& n : fine.grid_counts) n *= 2;
  OfflineParams fine_dense = fine;
  fine_dense.n_pitch = 2 * base.n_pitch - 1;
  return {{"coarse", base}, {"fine", fine}, {"fine_2x_tentacles", fine_dense}};
}

inline constexpr const char* kTimingsHeader =
    "variant,voxel_dim,tentacles,voxels,classified_voxels,grid_init_s,tentacle_init_s,"
    "rebuild_ms,occ_info_ms,heuristics_ms,selection_ms,execution_ms,total_ms,median_total_ms,"
    "cycles";

inline void write_timings_csv(std::ostream& out, const std::vector<TimingRow>& rows)
{
  using detail::fixed;
  out << kTimingsHeader << '\n';
  for (const auto& r : rows)
    out << r.name << ',' << fixed(r.voxel_dim, 3) << ',' << r.tentacles << ',' << r.voxels << ','
        << r.classified << ',' << fixed(r.grid_init_s, 4) << ',' << fixed(r.tentacle_init_s, 4)
        << ',' << fixed(r.mean.rebuild, 4) << ',' << fixed(r.mean.occ_info, 4) << ','
        << fixed(r.mean.heuristics, 4) << ',' << fixed(r.mean.selection, 4) << ','
        << fixed(r.mean.execution, 4) << ',' << fixed(r.mean.total(), 4) << ','
        << fixed(r.median_total_ms, 4) << ',' << r.cycles << '\n';
}

}  // namespace tentanav::bench
