#pragma once

// Deterministic stand-in for a physics simulator: procedural obstacle maps,
// a ray-cast range sensor and bounding-box collision checks.

#include "tentanav/geometry.hpp"
#include "tentanav/grid.hpp"
#include "tentanav/navigator.hpp"
#include "tentanav/params.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tentanav::sim {

// Vertical cylinder standing on z = 0.
struct Cylinder {
  double x = 0.0;
  double y = 0.0;
  double radius = 0.0;
  double height = 0.0;
  bool operator==(const Cylinder&) const = default;
};

// Axis-aligned box.
struct Box {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Zero();
  bool operator==(const Box&) const = default;
};

using Obstacle = std::variant<Cylinder, Box>;

struct Bounds {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
  bool operator==(const Bounds&) const = default;
};

struct WorldMap {
  std::string id;
  Bounds bounds;
  std::uint64_t seed = 0;
  bool ground = false;  // solid half-space below z = 0
  std::vector<Obstacle> obstacles;
  // Scenario: start pose and ordered goals.
  Vec3 start = Vec3::Zero();
  double start_yaw = 0.0;
  std::vector<Vec3> goals;

  bool operator==(const WorldMap&) const = default;
};

class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MapKind { cylinders, forest };

inline MapKind parse_map_kind(const std::string& s)
{
  if (s == "cylinders") return MapKind::cylinders;
  if (s == "forest") return MapKind::forest;
  throw MapError("unknown map kind: " + s);
}

inline constexpr double kFlightAltitude = 1.5;

// Placement rules per map kind.
struct MapRecipe {
  double radius_min;
  double radius_max;
  double height_min;
  double height_max;
  double min_gap;        // free space between neighbouring obstacle surfaces
  double clearance;      // obstacle-free disk around start and goal
  double corner_margin;  // start/goal inset from the bounds corners
};

inline MapRecipe recipe(MapKind kind)
{
  switch (kind) {
    case MapKind::cylinders: return {0.3, 0.5, 6.0, 6.0, 1.6, 2.0, 1.5};
    case MapKind::forest: return {0.1, 0.25, 8.0, 12.0, 1.2, 1.5, 1.0};
  }
  return {};
}

// Places round(density * area) obstacles uniformly with rejection sampling.
// Start and goal sit in opposite corners of the bounds.
inline WorldMap generate_map(MapKind kind, std::uint64_t seed, const Bounds& bounds,
                             double density)
{
  if (!(density >= 0.0)) throw MapError("density must be non-negative");
  const Vec3 size = bounds.max - bounds.min;
  if (size.x() <= 0 || size.y() <= 0) throw MapError("bounds must have positive extent");

  const MapRecipe r = recipe(kind);
  WorldMap map;
  map.id = std::string(kind == MapKind::cylinders ? "cylinders" : "forest") + "_" +
           std::to_string(seed);
  map.bounds = bounds;
  map.seed = seed;
  map.ground = true;
  map.start = {bounds.min.x() + r.corner_margin, bounds.min.y() + r.corner_margin, kFlightAltitude};
  map.goals = {{bounds.max.x() - r.corner_margin, bounds.max.y() - r.corner_margin, kFlightAltitude}};
  const Vec3 to_goal = map.goals.front() - map.start;
  map.start_yaw = std::atan2(to_goal.y(), to_goal.x());

  const auto count = static_cast<std::size_t>(std::llround(density * size.x() * size.y()));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(bounds.min.x(), bounds.max.x());
  std::uniform_real_distribution<double> uy(bounds.min.y(), bounds.max.y());
  std::uniform_real_distribution<double> ur(r.radius_min, r.radius_max);
  std::uniform_real_distribution<double> uh(r.height_min, r.height_max);

  std::vector<Cylinder> placed;
  const std::size_t max_attempts = 20000 * std::max<std::size_t>(1, count);
  std::size_t attempts = 0;
  while (placed.size() < count) {
    if (++attempts > max_attempts)
      throw MapError("infeasible density: placed " + std::to_string(placed.size()) + " of " +
                     std::to_string(count) + " obstacles");
    Cylinder c{ux(rng), uy(rng), ur(rng), uh(rng)};
    if (c.x - c.radius < bounds.min.x() || c.x + c.radius > bounds.max.x() ||
        c.y - c.radius < bounds.min.y() || c.y + c.radius > bounds.max.y())
      continue;
    auto clear_of = [&](const Vec3& p) {
      return std::hypot(c.x - p.x(), c.y - p.y()) - c.radius >= r.clearance;
    };
    if (!clear_of(map.start) || !clear_of(map.goals.front())) continue;
    bool ok = true;
    for (const auto& o : placed) {
      if (std::hypot(c.x - o.x, c.y - o.y) - c.radius - o.radius < r.min_gap) {
        ok = false;
        break;
      }
    }
    if (ok) placed.push_back(c);
  }
  map.obstacles.assign(placed.begin(), placed.end());
  return map;
}

// ---------------------------------------------------------------------------
// Ray casting

struct Ray {
  Vec3 origin;
  Vec3 dir;  // unit length
};

// Smallest t >= 0 where the ray enters the solid, if any. A ray starting
// inside the solid hits at t = 0.
inline std::optional<double> intersect(const Ray& ray, const Cylinder& c)
{
  const double ox = ray.origin.x() - c.x, oy = ray.origin.y() - c.y, oz = ray.origin.z();
  const double dx = ray.dir.x(), dy = ray.dir.y(), dz = ray.dir.z();
  const double r2 = c.radius * c.radius;
  auto inside_z = [&](double z) { return z >= 0.0 && z <= c.height; };
  if (ox * ox + oy * oy <= r2 && inside_z(oz)) return 0.0;

  std::optional<double> best;
  auto consider = [&](double t) {
    if (t >= 0.0 && (!best || t < *best)) best = t;
  };
  const double a = dx * dx + dy * dy;
  if (a > 1e-15) {
    const double b = ox * dx + oy * dy;
    const double cc = ox * ox + oy * oy - r2;
    const double disc = b * b - a * cc;
    if (disc >= 0.0) {
      const double t = (-b - std::sqrt(disc)) / a;
      if (inside_z(oz + t * dz)) consider(t);
    }
  }
  if (std::abs(dz) > 1e-15) {
    for (double zc : {0.0, c.height}) {
      const double t = (zc - oz) / dz;
      const double px = ox + t * dx, py = oy + t * dy;
      if (px * px + py * py <= r2) consider(t);
    }
  }
  return best;
}

inline std::optional<double> intersect(const Ray& ray, const Box& b)
{
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const double lo = b.center[i] - b.half_extents[i];
    const double hi = b.center[i] + b.half_extents[i];
    if (std::abs(ray.dir[i]) < 1e-15) {
      if (ray.origin[i] < lo || ray.origin[i] > hi) return std::nullopt;
      continue;
    }
    double t0 = (lo - ray.origin[i]) / ray.dir[i];
    double t1 = (hi - ray.origin[i]) / ray.dir[i];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return std::nullopt;
  }
  if (t_far < 0.0) return std::nullopt;
  return std::max(0.0, t_near);
}

inline std::optional<double> intersect_ground(const Ray& ray)
{
  if (ray.origin.z() <= 0.0) return 0.0;
  if (ray.dir.z() >= 0.0) return std::nullopt;
  return -ray.origin.z() / ray.dir.z();
}

// Nearest intersection with anything in the world.
inline std::optional<double> ray_cast(const WorldMap& world, const Ray& ray)
{
  std::optional<double> best;
  auto take = [&best](std::optional<double> t) {
    if (t && (!best || *t < *best)) best = t;
  };
  if (world.ground) take(intersect_ground(ray));
  for (const auto& ob : world.obstacles)
    take(std::visit([&ray](const auto& o) { return intersect(ray, o); }, ob));
  return best;
}

// ---------------------------------------------------------------------------
// Sensor

struct SensorModel {
  Vec3 max_range{10.0, 10.0, 10.0};  // per sensor-frame axis
  double h_fov = 1.5707963267948966;
  double v_fov = 1.0471975511965976;
  double angular_resolution = 0.015;
  double min_range = 0.3;
  double belief = 1.0;
  double noise_sigma = 0.0;

  static SensorModel from(const Config& c)
  {
    SensorModel s;
    s.max_range = {c.robot.sensor_range[0], c.robot.sensor_range[1], c.robot.sensor_range[2]};
    s.h_fov = c.sensor.h_fov;
    s.v_fov = c.sensor.v_fov;
    s.angular_resolution = c.sensor.angular_resolution > 0.0
                               ? c.sensor.angular_resolution
                               : c.robot.sensor_resolution / s.max_range.maxCoeff();
    s.min_range = c.sensor.min_range;
    s.belief = c.sensor.belief;
    s.noise_sigma = c.sensor.noise_sigma;
    s.validate();
    return s;
  }

  void validate() const
  {
    if (!(angular_resolution > 0.0)) throw std::invalid_argument("sensor resolution must be > 0");
    if (!(min_range < max_range.minCoeff()))
      throw std::invalid_argument("sensor min range must be below max range");
  }

  // Farthest distance along a sensor-frame unit direction that stays inside
  // the per-axis range box.
  double range_limit(const Vec3& dir) const
  {
    double t = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i)
      if (std::abs(dir[i]) > 1e-12) t = std::min(t, max_range[i] / std::abs(dir[i]));
    return t;
  }

  int columns() const { return static_cast<int>(std::floor(h_fov / angular_resolution)) + 1; }
  int rows() const { return static_cast<int>(std::floor(v_fov / angular_resolution)) + 1; }

  // Sensor-frame direction of ray (column, row).
  Vec3 ray_direction(int col, int row) const
  {
    const double az = -h_fov / 2 + h_fov * col / std::max(1, columns() - 1);
    const double el = -v_fov / 2 + v_fov * row / std::max(1, rows() - 1);
    return direction(az, el);
  }
};

// One point per ray whose nearest hit lies between min range and the range
// box. Points are expressed in the sensor frame, which coincides with the
// robot frame.
inline PointCloud sense(const WorldMap& world, const SensorModel& sensor, const Pose& sensor_pose,
                        std::uint64_t noise_seed = 0, double timestamp = 0.0)
{
  PointCloud cloud;
  cloud.sensor_to_world = sensor_pose;
  cloud.timestamp = timestamp;
  if (world.obstacles.empty() && !world.ground) return cloud;

  std::mt19937_64 rng(noise_seed);
  std::normal_distribution<double> noise(0.0, sensor.noise_sigma > 0 ? sensor.noise_sigma : 1.0);
  const Eigen::Matrix3d rot = sensor_pose.linear();
  const int cols = sensor.columns(), rows = sensor.rows();
  for (int row = 0; row < rows; ++row) {
    for (int col = 0; col < cols; ++col) {
      const Vec3 d_sensor = sensor.ray_direction(col, row);
      const double limit = sensor.range_limit(d_sensor);
      const auto hit = ray_cast(world, {sensor_pose.translation(), rot * d_sensor});
      if (!hit) continue;
      double t = *hit;
      if (sensor.noise_sigma > 0.0) t += noise(rng);
      if (t < sensor.min_range || t > limit) continue;
      cloud.points.push_back({d_sensor * t, sensor.belief});
    }
  }
  return cloud;
}

// ---------------------------------------------------------------------------
// Collision

// Robot body: box of length (x) x width (y) x height (z) centered on the
// position and rotated by yaw. Pitch is ignored for collision.
inline bool collides(const WorldMap& world, const RobotParams& robot, const Vec3& position,
                     double yaw)
{
  const double hx = robot.length / 2, hy = robot.width / 2, hz = robot.height / 2;
  const double z_lo = position.z() - hz, z_hi = position.z() + hz;
  if (world.ground && z_lo < 0.0) return true;

  const double c = std::cos(yaw), s = std::sin(yaw);
  // World-frame axis-aligned footprint of the rotated box.
  const double ex = std::abs(c) * hx + std::abs(s) * hy;
  const double ey = std::abs(s) * hx + std::abs(c) * hy;

  for (const auto& ob : world.obstacles) {
    if (const auto* cyl = std::get_if<Cylinder>(&ob)) {
      if (z_hi < 0.0 || z_lo > cyl->height) continue;
      // Circle center in the body frame, then closest point on the rectangle.
      const double dx = cyl->x - position.x(), dy = cyl->y - position.y();
      const double bx = c * dx + s * dy, by = -s * dx + c * dy;
      const double qx = std::clamp(bx, -hx, hx), qy = std::clamp(by, -hy, hy);
      if ((bx - qx) * (bx - qx) + (by - qy) * (by - qy) < cyl->radius * cyl->radius) return true;
    } else {
      const auto& box = std::get<Box>(ob);
      const Vec3 half{ex, ey, hz};
      const Vec3 gap = (box.center - position).cwiseAbs() - box.half_extents - half;
      if (gap.maxCoeff() < 0.0) return true;
    }
  }
  return false;
}

// WorldInterface over a static map.
class SimWorld : public WorldInterface {
 public:
  SimWorld(WorldMap map, SensorModel sensor, RobotParams robot, std::uint64_t noise_seed = 0)
      : map_(std::move(map)), sensor_(sensor), robot_(robot), noise_seed_(noise_seed)
  {
  }

  const WorldMap& map() const { return map_; }
  const SensorModel& sensor() const { return sensor_; }

  PointCloud sense(const RobotState& state, std::size_t cycle) const override
  {
    return sim::sense(map_, sensor_, state.pose(), noise_seed_ * 1000003ULL + cycle, state.time);
  }

  bool collides(const RobotState& state) const override
  {
    return sim::collides(map_, robot_, state.position, state.yaw);
  }

 private:
  WorldMap map_;
  SensorModel sensor_;
  RobotParams robot_;
  std::uint64_t noise_seed_;
};

// ---------------------------------------------------------------------------
// Map files: {id, bounds, seed, ground, obstacles: [{type, ...}], start,
// start_yaw, goals}

namespace detail {

inline nlohmann::json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

inline Vec3 json_vec(const nlohmann::json& j)
{
  if (!j.is_array() || j.size() != 3) throw MapError("expected [x, y, z] array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace detail

inline nlohmann::json to_json(const WorldMap& m)
{
  nlohmann::json obstacles = nlohmann::json::array();
  for (const auto& ob : m.obstacles) {
    if (const auto* c = std::get_if<Cylinder>(&ob)) {
      obstacles.push_back(
          {{"type", "cylinder"}, {"x", c->x}, {"y", c->y}, {"radius", c->radius}, {"height", c->height}});
    } else {
      const auto& b = std::get<Box>(ob);
      obstacles.push_back({{"type", "box"},
                           {"center", detail::vec_json(b.center)},
                           {"half_extents", detail::vec_json(b.half_extents)}});
    }
  }
  nlohmann::json goals = nlohmann::json::array();
  for (const auto& g : m.goals) goals.push_back(detail::vec_json(g));
  return {{"id", m.id},
          {"bounds", {{"min", detail::vec_json(m.bounds.min)}, {"max", detail::vec_json(m.bounds.max)}}},
          {"seed", m.seed},
          {"ground", m.ground},
          {"obstacles", obstacles},
          {"start", detail::vec_json(m.start)},
          {"start_yaw", m.start_yaw},
          {"goals", goals}};
}

inline WorldMap map_from_json(const nlohmann::json& j)
{
  try {
    WorldMap m;
    m.id = j.value("id", std::string{});
    m.bounds.min = detail::json_vec(j.at("bounds").at("min"));
    m.bounds.max = detail::json_vec(j.at("bounds").at("max"));
    m.seed = j.value("seed", std::uint64_t{0});
    m.ground = j.value("ground", false);
    for (const auto& o : j.at("obstacles")) {
      const std::string type = o.at("type").get<std::string>();
      if (type == "cylinder") {
        m.obstacles.emplace_back(Cylinder{o.at("x").get<double>(), o.at("y").get<double>(),
                                          o.at("radius").get<double>(), o.at("height").get<double>()});
      } else if (type == "box") {
        m.obstacles.emplace_back(
            Box{detail::json_vec(o.at("center")), detail::json_vec(o.at("half_extents"))});
      } else {
        throw MapError("unknown obstacle type: " + type);
      }
    }
    if (j.contains("start")) m.start = detail::json_vec(j.at("start"));
    m.start_yaw = j.value("start_yaw", 0.0);
    if (j.contains("goals"))
      for (const auto& g : j.at("goals")) m.goals.push_back(detail::json_vec(g));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw MapError(std::string("malformed map: ") + e.what());
  }
}

inline WorldMap load_map(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MapError("cannot open map file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw MapError("cannot parse map file " + path + ": " + e.what());
  }
  return map_from_json(j);
}

inline void save_map(const WorldMap& m, const std::string& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MapError("cannot write map file: " + path);
  out << to_json(m).dump(2) << '\n';
}

}  // namespace tentanav::sim
