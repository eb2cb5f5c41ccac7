#pragma once

// Parameter groups for the navigator and JSON configuration ingestion.
//
// Three groups mirror how the parameters are used:
//   RobotParams   - body size, kinematic limits and sensor specification
//   OfflineParams - grid and tentacle geometry, fixed before navigation
//   OnlineParams  - crash scale and cost weights, replaceable between cycles
//
// Angles are radians, lengths meters, rates per second throughout.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tentanav {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RobotParams {
  double width = 0.4;    // y extent of the bounding box
  double length = 0.4;   // x extent
  double height = 0.2;   // z extent
  double v_lat = 1.0;    // max forward lateral velocity
  double omega_yaw = 1.0;
  double omega_pitch = 0.5;
  double omega_roll = 0.5;
  double sensor_resolution = 0.15;
  std::array<double, 3> sensor_range{10.0, 10.0, 10.0};
};

struct OfflineParams {
  double voxel_dim = 0.2;
  std::array<int, 3> grid_counts{110, 60, 50};
  int n_yaw = 31;
  int n_pitch = 21;
  int samples_per_tentacle = 30;
  double tentacle_length = 10.0;
  double yaw_coverage = 1.0471975511965976;    // 60 deg
  double pitch_coverage = 0.7853981633974483;  // 45 deg
  double tau_priority = 0.4;
  double tau_support = 1.0;
  double beta_max = 1.0;
  double alpha_beta = 10.0;

  std::size_t tentacle_count() const
  {
    return static_cast<std::size_t>(n_yaw) * static_cast<std::size_t>(n_pitch);
  }
};

struct OnlineParams {
  double alpha_crash = 8.0;
  double lambda_clear = 1.0;
  double lambda_clut = 2.0;
  double lambda_close = 4.0;
  double lambda_smo = 0.5;
  // A sample is flagged as occupied when its bin count exceeds this.
  double tau_d_err = 0.0;
  // Scans held in the history ring buffer, newest included.
  int history_depth = 5;
  // 1-based sample used by goal closeness and smoothness; 0 = last sample.
  int designated_sample = 0;
  double goal_tolerance = 0.5;
  double cycle_period = 0.1;
};

// Synthetic sensor extras that the robot group does not cover.
struct SensorSettings {
  double h_fov = 1.5707963267948966;  // 90 deg
  double v_fov = 1.0471975511965976;  // 60 deg
  double angular_resolution = 0.0;    // 0 derives resolution / max range
  double min_range = 0.3;
  double belief = 1.0;
  double noise_sigma = 0.0;
};

struct Config {
  RobotParams robot;
  OfflineParams offline;
  OnlineParams online;
  SensorSettings sensor;
};

namespace detail {

inline void require(bool ok, const std::string& message)
{
  if (!ok) throw ConfigError(message);
}

}  // namespace detail

inline void validate(const RobotParams& r)
{
  using detail::require;
  require(r.width > 0 && r.length > 0 && r.height > 0,
          "robot width, length and height must be positive");
  require(r.v_lat > 0, "robot v_lat must be positive");
  require(r.omega_yaw > 0 && r.omega_pitch > 0 && r.omega_roll > 0,
          "robot angular velocities must be positive");
  require(r.sensor_resolution > 0, "robot sensor_resolution must be positive");
  for (double range : r.sensor_range)
    require(range > 0, "robot sensor_range entries must be positive");
}

inline void validate(const OfflineParams& o)
{
  using detail::require;
  require(o.voxel_dim > 0, "voxel_dim must be positive");
  for (int n : o.grid_counts) require(n > 0, "grid_counts entries must be positive");
  require(o.n_yaw >= 1 && o.n_pitch >= 1, "n_yaw and n_pitch must be at least 1");
  require(o.samples_per_tentacle >= 2, "samples_per_tentacle must be at least 2");
  require(o.samples_per_tentacle <= 65535, "samples_per_tentacle must fit 16 bits");
  require(o.tentacle_length > 0, "tentacle_length must be positive");
  require(o.yaw_coverage >= 0 && o.pitch_coverage >= 0,
          "coverage angles must be non-negative");
  require(o.tau_priority > 0, "tau_P must be positive");
  require(o.tau_support > o.tau_priority, "tau_S must exceed tau_P");
  require(o.beta_max > 0, "beta_max must be positive");
  require(o.alpha_beta > 0, "alpha_beta must be positive");
  // Support weights beta_max / (alpha_beta * d) with d >= tau_P stay below
  // beta_max only when alpha_beta * tau_P > 1.
  require(o.alpha_beta * o.tau_priority > 1.0,
          "alpha_beta * tau_P must exceed 1 so support weights stay below beta_max");
}

inline void validate(const OnlineParams& p)
{
  using detail::require;
  require(p.alpha_crash > 1, "alpha_crash must exceed 1");
  require(p.lambda_clear >= 0 && p.lambda_clut >= 0 && p.lambda_close >= 0 &&
              p.lambda_smo >= 0,
          "lambda weights must be non-negative");
  require(p.lambda_clear + p.lambda_clut + p.lambda_close + p.lambda_smo > 0,
          "at least one lambda weight must be positive");
  require(p.tau_d_err >= 0, "tau_d_err must be non-negative");
  require(p.history_depth >= 1, "history_depth must be at least 1");
  require(p.designated_sample >= 0, "designated_sample must be non-negative");
  require(p.goal_tolerance > 0, "goal_tolerance must be positive");
  require(p.cycle_period > 0, "cycle_period must be positive");
}

inline void validate(const SensorSettings& s)
{
  using detail::require;
  require(s.h_fov > 0 && s.v_fov > 0, "sensor fields of view must be positive");
  require(s.v_fov < 3.14159, "sensor v_fov must be below 180 deg");
  require(s.angular_resolution >= 0, "sensor angular_resolution must be non-negative");
  require(s.min_range >= 0, "sensor min_range must be non-negative");
  require(s.belief >= 0 && s.belief <= 1, "sensor belief must lie in [0,1]");
  require(s.noise_sigma >= 0, "sensor noise_sigma must be non-negative");
}

inline void validate(const Config& c)
{
  validate(c.robot);
  validate(c.offline);
  validate(c.online);
  validate(c.sensor);
  const auto& range = c.robot.sensor_range;
  const double min_range = std::min({range[0], range[1], range[2]});
  detail::require(c.offline.tentacle_length <= min_range,
                  "tentacle_length must not exceed the minimum sensor range");
  detail::require(c.online.designated_sample <= c.offline.samples_per_tentacle,
                  "designated_sample must not exceed samples_per_tentacle");
  detail::require(c.sensor.min_range < min_range,
                  "sensor min_range must be below the maximum sensor range");
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

template <typename T>
void read_required(const nlohmann::json& obj, const char* group, const char* key, T& out)
{
  if (!obj.contains(key))
    throw ConfigError(std::string("missing field ") + group + "." + key);
  try {
    obj.at(key).get_to(out);
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("wrong type for field ") + group + "." + key);
  }
}

template <typename T>
void read_optional(const nlohmann::json& obj, const char* group, const char* key, T& out)
{
  if (obj.contains(key)) read_required(obj, group, key, out);
}

inline const nlohmann::json& group(const nlohmann::json& root, const char* name)
{
  if (!root.contains(name) || !root.at(name).is_object())
    throw ConfigError(std::string("missing object '") + name + "'");
  return root.at(name);
}

}  // namespace detail

// Robot and offline fields are required; online and sensor fields fall back
// to the defaults above.
inline Config parse_config(const nlohmann::json& root)
{
  using detail::read_optional;
  using detail::read_required;
  if (!root.is_object()) throw ConfigError("configuration root must be an object");

  Config c;
  const auto& r = detail::group(root, "robot");
  read_required(r, "robot", "width", c.robot.width);
  read_required(r, "robot", "length", c.robot.length);
  read_required(r, "robot", "height", c.robot.height);
  read_required(r, "robot", "v_lat", c.robot.v_lat);
  read_required(r, "robot", "omega_yaw", c.robot.omega_yaw);
  read_required(r, "robot", "omega_pitch", c.robot.omega_pitch);
  read_required(r, "robot", "omega_roll", c.robot.omega_roll);
  read_required(r, "robot", "sensor_resolution", c.robot.sensor_resolution);
  read_required(r, "robot", "sensor_range", c.robot.sensor_range);

  const auto& o = detail::group(root, "offline");
  read_required(o, "offline", "voxel_dim", c.offline.voxel_dim);
  read_required(o, "offline", "grid_counts", c.offline.grid_counts);
  read_required(o, "offline", "n_yaw", c.offline.n_yaw);
  read_required(o, "offline", "n_pitch", c.offline.n_pitch);
  read_required(o, "offline", "samples_per_tentacle", c.offline.samples_per_tentacle);
  read_required(o, "offline", "tentacle_length", c.offline.tentacle_length);
  read_required(o, "offline", "yaw_coverage", c.offline.yaw_coverage);
  read_required(o, "offline", "pitch_coverage", c.offline.pitch_coverage);
  read_required(o, "offline", "tau_P", c.offline.tau_priority);
  read_required(o, "offline", "tau_S", c.offline.tau_support);
  read_required(o, "offline", "beta_max", c.offline.beta_max);
  read_required(o, "offline", "alpha_beta", c.offline.alpha_beta);

  if (root.contains("online")) {
    const auto& n = detail::group(root, "online");
    read_optional(n, "online", "alpha_crash", c.online.alpha_crash);
    read_optional(n, "online", "lambda_clear", c.online.lambda_clear);
    read_optional(n, "online", "lambda_clut", c.online.lambda_clut);
    read_optional(n, "online", "lambda_close", c.online.lambda_close);
    read_optional(n, "online", "lambda_smo", c.online.lambda_smo);
    read_optional(n, "online", "tau_d_err", c.online.tau_d_err);
    read_optional(n, "online", "history_depth", c.online.history_depth);
    read_optional(n, "online", "designated_sample", c.online.designated_sample);
    read_optional(n, "online", "goal_tolerance", c.online.goal_tolerance);
    read_optional(n, "online", "cycle_period", c.online.cycle_period);
  }

  if (root.contains("sensor")) {
    const auto& s = detail::group(root, "sensor");
    read_optional(s, "sensor", "h_fov", c.sensor.h_fov);
    read_optional(s, "sensor", "v_fov", c.sensor.v_fov);
    read_optional(s, "sensor", "angular_resolution", c.sensor.angular_resolution);
    read_optional(s, "sensor", "min_range", c.sensor.min_range);
    read_optional(s, "sensor", "belief", c.sensor.belief);
    read_optional(s, "sensor", "noise_sigma", c.sensor.noise_sigma);
  }

  validate(c);
  return c;
}

inline Config parse_config(const std::string& text)
{
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  return parse_config(root);
}

inline Config load_config(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

inline nlohmann::json to_json(const Config& c)
{
  return {
      {"robot",
       {{"width", c.robot.width},
        {"length", c.robot.length},
        {"height", c.robot.height},
        {"v_lat", c.robot.v_lat},
        {"omega_yaw", c.robot.omega_yaw},
        {"omega_pitch", c.robot.omega_pitch},
        {"omega_roll", c.robot.omega_roll},
        {"sensor_resolution", c.robot.sensor_resolution},
        {"sensor_range", c.robot.sensor_range}}},
      {"offline",
       {{"voxel_dim", c.offline.voxel_dim},
        {"grid_counts", c.offline.grid_counts},
        {"n_yaw", c.offline.n_yaw},
        {"n_pitch", c.offline.n_pitch},
        {"samples_per_tentacle", c.offline.samples_per_tentacle},
        {"tentacle_length", c.offline.tentacle_length},
        {"yaw_coverage", c.offline.yaw_coverage},
        {"pitch_coverage", c.offline.pitch_coverage},
        {"tau_P", c.offline.tau_priority},
        {"tau_S", c.offline.tau_support},
        {"beta_max", c.offline.beta_max},
        {"alpha_beta", c.offline.alpha_beta}}},
      {"online",
       {{"alpha_crash", c.online.alpha_crash},
        {"lambda_clear", c.online.lambda_clear},
        {"lambda_clut", c.online.lambda_clut},
        {"lambda_close", c.online.lambda_close},
        {"lambda_smo", c.online.lambda_smo},
        {"tau_d_err", c.online.tau_d_err},
        {"history_depth", c.online.history_depth},
        {"designated_sample", c.online.designated_sample},
        {"goal_tolerance", c.online.goal_tolerance},
        {"cycle_period", c.online.cycle_period}}},
      {"sensor",
       {{"h_fov", c.sensor.h_fov},
        {"v_fov", c.sensor.v_fov},
        {"angular_resolution", c.sensor.angular_resolution},
        {"min_range", c.sensor.min_range},
        {"belief", c.sensor.belief},
        {"noise_sigma", c.sensor.noise_sigma}}}};
}

}  // namespace tentanav
