// tentanav: map generation, single runs, benchmark suites, timing studies
// and data dumps for the tentacle navigator.

#include "tentanav/tentanav.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace tentanav;

namespace {

Vec3 parse_point(const std::string& text)
{
  std::stringstream ss(text);
  std::string item;
  std::vector<double> v;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw std::runtime_error("bad coordinate '" + text + "', expected x,y,z");
    }
  }
  if (v.size() != 3) throw std::runtime_error("bad coordinate '" + text + "', expected x,y,z");
  return {v[0], v[1], v[2]};
}

std::ofstream open_out(const fs::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<sim::WorldMap> load_map_dir(const fs::path& dir)
{
  if (!fs::is_directory(dir)) throw sim::MapError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<sim::WorldMap> maps;
  for (const auto& f : files) {
    auto m = sim::load_map(f.string());
    if (m.id.empty()) m.id = f.stem().string();
    maps.push_back(std::move(m));
  }
  if (maps.empty()) throw sim::MapError("no map files in " + dir.string());
  return maps;
}

struct Options {
  std::string config;
  std::string map;
  std::string maps;
  std::string out = ".";
  std::vector<std::string> goals;
  std::string start;
  std::string kind = "forest";
  std::vector<double> bounds;
  double density = -1.0;
  std::uint64_t seed = 1;
  std::size_t trials = 10;
  unsigned workers = 0;
  double time_limit = 90.0;
  std::size_t cycles = 100;
  bool log_scores = false;
  bool dump_grid = false;
  bool dump_tentacles = false;
  bool timing_serial = false;
  bool standard = false;
};

int cmd_gen_map(const Options& o)
{
  if (o.standard) {
    fs::create_directories(o.out);
    for (const auto& m : bench::standard_maps(o.seed))
      sim::save_map(m, (fs::path(o.out) / (m.id + ".json")).string());
    return 0;
  }
  const auto kind = sim::parse_map_kind(o.kind);
  sim::Bounds b = kind == sim::MapKind::cylinders
                      ? sim::Bounds{{-10, -10, 0}, {10, 10, 12}}
                      : sim::Bounds{{0, 0, 0}, {10, 10, 12}};
  if (!o.bounds.empty()) {
    if (o.bounds.size() != 4) throw std::runtime_error("--bounds expects xmin,ymin,xmax,ymax");
    b.min.x() = o.bounds[0];
    b.min.y() = o.bounds[1];
    b.max.x() = o.bounds[2];
    b.max.y() = o.bounds[3];
  }
  const double density = o.density >= 0 ? o.density : (kind == sim::MapKind::cylinders ? 0.06 : 0.2);
  const auto map = sim::generate_map(kind, o.seed, b, density);
  fs::path path(o.out);
  if (fs::is_directory(path)) path /= map.id + ".json";
  sim::save_map(map, path.string());
  return 0;
}

int cmd_run(const Options& o)
{
  const Config config = load_config(o.config);
  sim::WorldMap map = sim::load_map(o.map);
  std::vector<Vec3> goals;
  for (const auto& g : o.goals) goals.push_back(parse_point(g));
  if (goals.empty()) goals = map.goals;
  if (goals.empty()) throw std::runtime_error("no goals: pass --goal x,y,z or use a map with goals");

  RobotState start;
  start.position = o.start.empty() ? map.start : parse_point(o.start);
  const Vec3 to_goal = goals.front() - start.position;
  start.yaw = o.start.empty() ? map.start_yaw : std::atan2(to_goal.y(), to_goal.x());

  auto bank = std::make_shared<const TentacleBank>(
      TentacleBank::build(config.offline, std::max(1u, o.workers)));
  Navigator nav(config, bank);
  sim::SimWorld world(map, sim::SensorModel::from(config), config.robot, o.seed);

  fs::create_directories(o.out);
  std::ofstream scores;
  if (o.log_scores) {
    scores = open_out(fs::path(o.out) / "scores.csv");
    scores << io::kScoresHeader << '\n';
  }
  CycleObserver observer;
  if (o.log_scores)
    observer = [&scores](std::size_t cycle, const Navigator& n, const CycleRecord&) {
      io::write_scores_rows(scores, cycle, n.scores());
    };
  const NavResult res = run(nav, world, start, goals, o.time_limit, observer);

  auto traj = open_out(fs::path(o.out) / "trajectory.csv");
  io::write_trajectory_csv(traj, res.cycles);
  const std::string result = io::to_json(res).dump(2);
  open_out(fs::path(o.out) / "result.json") << result << '\n';
  if (o.dump_grid) {
    auto grid = open_out(fs::path(o.out) / "grid.csv");
    io::write_grid_csv(grid, nav.grid());
  }
  std::cout << result << std::endl;
  return 0;
}

int cmd_bench(const Options& o)
{
  const Config config = load_config(o.config);
  std::vector<sim::WorldMap> maps =
      o.maps.empty() ? bench::standard_maps(o.seed) : load_map_dir(o.maps);

  bench::SuiteOptions opt;
  opt.trials_per_map = o.trials;
  opt.time_limit = o.time_limit;
  opt.workers = o.timing_serial ? 1u
                                : (o.workers ? o.workers : std::max(1u, std::thread::hardware_concurrency()));
  const auto report = bench::run_suite(maps, config, opt);

  fs::create_directories(o.out);
  auto results = open_out(fs::path(o.out) / "results.csv");
  bench::write_results_csv(results, report.records);
  open_out(fs::path(o.out) / "summary.json") << bench::summary_json(report).dump(2) << '\n';
  std::cout << "trials " << report.trials << ", successes " << report.successes
            << ", success rate " << report.success_rate << std::endl;
  return 0;
}

int cmd_time(const Options& o)
{
  const Config config = load_config(o.config);
  const sim::WorldMap scene = o.map.empty() ? bench::standard_maps(o.seed).at(1) : sim::load_map(o.map);
  const auto rows =
      bench::time_stages(bench::reference_variants(config.offline), config, scene, o.cycles);
  fs::create_directories(o.out);
  auto out = open_out(fs::path(o.out) / "timings.csv");
  bench::write_timings_csv(out, rows);
  bench::write_timings_csv(std::cout, rows);
  return 0;
}

int cmd_dump(const Options& o)
{
  if (!o.dump_tentacles && !o.dump_grid)
    throw std::runtime_error("dump needs --dump-tentacles and/or --dump-grid");
  const Config config = load_config(o.config);
  auto bank = std::make_shared<const TentacleBank>(
      TentacleBank::build(config.offline, std::max(1u, o.workers)));
  fs::create_directories(o.out);
  if (o.dump_tentacles) {
    auto out = open_out(fs::path(o.out) / "tentacles.jsonl");
    io::write_tentacles_jsonl(out, *bank);
  }
  if (o.dump_grid) {
    if (o.map.empty()) throw std::runtime_error("--dump-grid needs --map");
    const auto map = sim::load_map(o.map);
    RobotState s;
    s.position = o.start.empty() ? map.start : parse_point(o.start);
    s.yaw = map.start_yaw;
    OccupancyGrid grid(bank->dims());
    const PointCloud cloud = sim::sense(map, sim::SensorModel::from(config), s.pose());
    grid.rebuild(std::span(&cloud, 1), s.pose());
    auto out = open_out(fs::path(o.out) / "grid.csv");
    io::write_grid_csv(out, grid);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Tentacle-based 3D reactive navigation: simulate, benchmark, time, dump"};
  app.require_subcommand(1, 1);
  Options o;

  auto* gen = app.add_subcommand("gen-map", "Generate a procedural obstacle map");
  gen->add_option("--kind", o.kind, "cylinders | forest")->check(CLI::IsMember({"cylinders", "forest"}));
  gen->add_option("--seed", o.seed, "Generation seed");
  gen->add_option("--density", o.density, "Obstacles per square meter");
  gen->add_option("--bounds", o.bounds, "xmin,ymin,xmax,ymax")->delimiter(',');
  gen->add_flag("--standard", o.standard, "Write the 10-map benchmark suite into --out");
  gen->add_option("--out", o.out, "Output file or directory");

  auto* runc = app.add_subcommand("run", "Navigate one map and print the NavResult JSON");
  runc->add_option("--config", o.config, "Configuration JSON")->required();
  runc->add_option("--map", o.map, "Map JSON")->required();
  runc->add_option("--goal", o.goals, "Goal x,y,z (repeat for a sequence)");
  runc->add_option("--start", o.start, "Start x,y,z (default: map start)");
  runc->add_option("--seed", o.seed, "Sensor noise seed");
  runc->add_option("--t-limit", o.time_limit, "Time limit in seconds");
  runc->add_option("--workers", o.workers, "Threads for tentacle precomputation");
  runc->add_option("--out", o.out, "Output directory");
  runc->add_flag("--log-scores", o.log_scores, "Write per-cycle tentacle scores");
  runc->add_flag("--dump-grid", o.dump_grid, "Write the final occupancy grid");

  auto* benchc = app.add_subcommand("bench", "Run seeded trials over a map suite");
  benchc->add_option("--config", o.config, "Configuration JSON")->required();
  benchc->add_option("--maps", o.maps, "Directory of map JSON files (default: standard suite)");
  benchc->add_option("--seed", o.seed, "Base seed for the standard suite");
  benchc->add_option("--trials", o.trials, "Trials per map");
  benchc->add_option("--workers", o.workers, "Parallel trials (default: cores)");
  benchc->add_option("--t-limit", o.time_limit, "Time limit per trial in seconds");
  benchc->add_option("--out", o.out, "Output directory");
  benchc->add_flag("--timing-serial", o.timing_serial, "Run trials serially for clean timings");

  auto* timec = app.add_subcommand("time", "Per-stage timing study over voxel size and tentacle count");
  timec->add_option("--config", o.config, "Configuration JSON")->required();
  timec->add_option("--map", o.map, "Scene map (default: first standard forest)");
  timec->add_option("--seed", o.seed, "Base seed for the default scene");
  timec->add_option("--cycles", o.cycles, "Cycles per variant");
  timec->add_option("--out", o.out, "Output directory");
  timec->add_flag("--timing-serial", o.timing_serial, "Accepted for symmetry; timing is always serial");

  auto* dump = app.add_subcommand("dump", "Dump the tentacle bank and/or a sensed grid");
  dump->add_option("--config", o.config, "Configuration JSON")->required();
  dump->add_option("--map", o.map, "Map JSON for --dump-grid");
  dump->add_option("--start", o.start, "Sensing position x,y,z (default: map start)");
  dump->add_option("--workers", o.workers, "Threads for tentacle precomputation");
  dump->add_option("--out", o.out, "Output directory");
  dump->add_flag("--dump-tentacles", o.dump_tentacles, "Write tentacles.jsonl");
  dump->add_flag("--dump-grid", o.dump_grid, "Write grid.csv from one scan at the start pose");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen_map(o);
    if (*runc) return cmd_run(o);
    if (*benchc) return cmd_bench(o);
    if (*timec) return cmd_time(o);
    if (*dump) return cmd_dump(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 3;
  } catch (const sim::MapError& e) {
    std::cerr << "map error: " << e.what() << std::endl;
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 1;
}
