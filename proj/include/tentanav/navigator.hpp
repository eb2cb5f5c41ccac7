#pragma once

// Reactive navigation loop: rebuild the robot-centered grid, score every
// tentacle, pick the best one and emit a velocity-clamped pose command
// toward its crash-distance sample.

#include "tentanav/geometry.hpp"
#include "tentanav/grid.hpp"
#include "tentanav/heuristics.hpp"
#include "tentanav/params.hpp"
#include "tentanav/tentacles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace tentanav {

struct RobotState {
  Vec3 position = Vec3::Zero();  // world frame
  double yaw = 0.0;
  double pitch = 0.0;
  Vec3 velocity = Vec3::Zero();
  double time = 0.0;

  Pose pose() const { return make_pose(position, yaw, pitch); }
};

struct PoseCommand {
  Vec3 position = Vec3::Zero();  // world frame target
  double yaw = 0.0;
  double pitch = 0.0;
  double duration = 0.0;
};

enum class RunState { running, goal_reached, blocked, timed_out };
enum class FailureCause { collision, timeout, blocked };

inline std::string_view to_string(RunState s)
{
  switch (s) {
    case RunState::running: return "running";
    case RunState::goal_reached: return "goal_reached";
    case RunState::blocked: return "blocked";
    case RunState::timed_out: return "timed_out";
  }
  return "?";
}

inline std::string_view to_string(FailureCause c)
{
  switch (c) {
    case FailureCause::collision: return "collision";
    case FailureCause::timeout: return "timeout";
    case FailureCause::blocked: return "blocked";
  }
  return "?";
}

struct NavStatus {
  RunState state = RunState::running;
  std::size_t goals_remaining = 0;
  double elapsed = 0.0;
  double path_length = 0.0;
};

// Milliseconds spent in each stage of one cycle.
struct StageTimings {
  double rebuild = 0.0;
  double occ_info = 0.0;
  double heuristics = 0.0;
  double selection = 0.0;
  double execution = 0.0;

  double total() const { return rebuild + occ_info + heuristics + selection + execution; }

  StageTimings& operator+=(const StageTimings& o)
  {
    rebuild += o.rebuild;
    occ_info += o.occ_info;
    heuristics += o.heuristics;
    selection += o.selection;
    execution += o.execution;
    return *this;
  }
  StageTimings scaled(double f) const
  {
    return {rebuild * f, occ_info * f, heuristics * f, selection * f, execution * f};
  }
};

struct CycleDiagnostics {
  std::optional<std::size_t> selected;
  double best_cost = 0.0;
  Navigability selected_nav = Navigability::non_navigable;
  std::size_t drivable_count = 0;
  StageTimings timings;
};

struct StepResult {
  PoseCommand command;
  RunState state = RunState::running;
  CycleDiagnostics diagnostics;
};

namespace detail {

class StageClock {
 public:
  StageClock() : last_(std::chrono::steady_clock::now()) {}
  // Milliseconds since the previous lap.
  double lap()
  {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_;
};

}  // namespace detail

// Applies a pose command with the kinematic point model.
inline RobotState execute(const RobotState& state, const PoseCommand& cmd)
{
  RobotState next = state;
  next.velocity = (cmd.position - state.position) / cmd.duration;
  next.position = cmd.position;
  next.yaw = wrap_angle(cmd.yaw);
  next.pitch = cmd.pitch;
  next.time = state.time + cmd.duration;
  return next;
}

class Navigator {
 public:
  Navigator(const Config& config, std::shared_ptr<const TentacleBank> bank)
      : config_(config),
        bank_(std::move(bank)),
        grid_(bank_ ? bank_->dims() : GridDims{}),
        history_(static_cast<std::size_t>(config.online.history_depth))
  {
    validate(config_);
    if (!(bank_->dims() == GridDims::from(config_.offline)))
      throw std::invalid_argument("tentacle bank and config disagree on grid dims");
    scorer_.bank = bank_.get();
  }

  const Config& config() const { return config_; }
  const TentacleBank& bank() const { return *bank_; }
  const OccupancyGrid& grid() const { return grid_; }
  std::span<const HeuristicScores> scores() const { return scores_; }
  std::optional<std::size_t> previous_best() const { return previous_best_; }

  // Only between cycles.
  void set_online(const OnlineParams& online)
  {
    validate(online);
    config_.online = online;
    history_ = rebuffer(history_, static_cast<std::size_t>(online.history_depth));
  }

  void reset()
  {
    history_.clear();
    grid_.clear();
    scores_.clear();
    previous_best_.reset();
  }

  // 0-based index of the sampling point at the crash distance.
  std::size_t crash_sample() const
  {
    const double n_s = static_cast<double>(bank_->samples_per_tentacle());
    const double k = std::round(n_s / config_.online.alpha_crash);
    return static_cast<std::size_t>(std::clamp(k, 1.0, n_s)) - 1;
  }

  // One loop body. `cloud` joins the scan history before the grid rebuild.
  StepResult step(const RobotState& state, PointCloud cloud, const Vec3& goal)
  {
    StepResult out;
    const OnlineParams& online = config_.online;
    const Pose pose = state.pose();
    detail::StageClock clock;

    history_.push(std::move(cloud));
    grid_.rebuild(history_.scans(), pose);
    out.diagnostics.timings.rebuild = clock.lap();

    scorer_.occupancy(grid_, bins_);
    out.diagnostics.timings.occ_info = clock.lap();

    scorer_.metrics(bins_, online, pose, goal, previous_best_, scores_);
    out.diagnostics.timings.heuristics = clock.lap();

    const auto best = select_best(scores_, online, previous_best_);
    out.diagnostics.timings.selection = clock.lap();

    for (const auto& s : scores_) out.diagnostics.drivable_count += drivable(s.nav) ? 1 : 0;
    out.diagnostics.selected = best;
    out.command = synthesize(state, best);
    if (best) {
      previous_best_ = best;
      out.diagnostics.best_cost = scores_[*best].cost;
      out.diagnostics.selected_nav = scores_[*best].nav;
      out.state = RunState::running;
    } else {
      out.state = RunState::blocked;
    }
    if ((state.position - goal).norm() < online.goal_tolerance) out.state = RunState::goal_reached;
    return out;
  }

 private:
  static ScanHistory rebuffer(const ScanHistory& old, std::size_t capacity)
  {
    ScanHistory h(capacity);
    for (const auto& scan : old.scans()) h.push(scan);
    return h;
  }

  // Moves toward the crash-distance sample of the chosen tentacle by at most
  // v_lat * dt and turns the heading toward the tentacle within the angular
  // rate limits. No tentacle means hold position.
  PoseCommand synthesize(const RobotState& state, std::optional<std::size_t> best) const
  {
    const double dt = config_.online.cycle_period;
    PoseCommand cmd{state.position, state.yaw, state.pitch, dt};
    if (!best) return cmd;

    const Tentacle& t = bank_->tentacle(*best);
    const Eigen::Matrix3d rot = attitude(state.yaw, state.pitch);
    const Vec3 target = state.position + rot * t.samples[crash_sample()];
    const Vec3 delta = target - state.position;
    const double dist = delta.norm();
    if (dist > 0.0) {
      const double step = std::min(config_.robot.v_lat * dt, dist);
      cmd.position = state.position + delta * (step / dist);
    }

    const Vec3 dir = rot * t.heading();
    const double want_yaw = std::atan2(dir.y(), dir.x());
    const double want_pitch = std::asin(std::clamp(dir.z(), -1.0, 1.0));
    const double max_yaw = config_.robot.omega_yaw * dt;
    const double max_pitch = config_.robot.omega_pitch * dt;
    cmd.yaw = wrap_angle(state.yaw + std::clamp(wrap_angle(want_yaw - state.yaw), -max_yaw, max_yaw));
    cmd.pitch = state.pitch + std::clamp(want_pitch - state.pitch, -max_pitch, max_pitch);
    return cmd;
  }

  Config config_;
  std::shared_ptr<const TentacleBank> bank_;
  TentacleScorer scorer_;
  OccupancyGrid grid_;
  ScanHistory history_;
  std::vector<OccupancyBins> bins_;
  std::vector<HeuristicScores> scores_;
  std::optional<std::size_t> previous_best_;
};

// ---------------------------------------------------------------------------
// Closed loop against a world.

class WorldInterface {
 public:
  virtual ~WorldInterface() = default;
  virtual PointCloud sense(const RobotState& state, std::size_t cycle) const = 0;
  virtual bool collides(const RobotState& state) const = 0;
};

struct CycleRecord {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
  double pitch = 0.0;
  std::optional<std::size_t> selected;
  double best_cost = 0.0;
  Navigability nav = Navigability::non_navigable;
  StageTimings timings;
};

struct NavResult {
  bool success = false;
  RunState final_state = RunState::running;
  std::optional<FailureCause> failure;
  double duration = 0.0;
  double path_length = 0.0;
  std::size_t goals_reached = 0;
  std::vector<CycleRecord> cycles;

  StageTimings mean_timings() const
  {
    StageTimings sum;
    for (const auto& c : cycles) sum += c.timings;
    return cycles.empty() ? sum : sum.scaled(1.0 / static_cast<double>(cycles.size()));
  }
};

// Called after each cycle with the cycle number and the navigator state.
using CycleObserver = std::function<void(std::size_t, const Navigator&, const CycleRecord&)>;

inline NavResult run(Navigator& nav, const WorldInterface& world, RobotState state,
                     std::span<const Vec3> goals, double time_limit,
                     const CycleObserver& observer = {})
{
  if (goals.empty()) throw std::invalid_argument("run needs at least one goal");
  NavResult result;
  const double dt = nav.config().online.cycle_period;
  const double tol = nav.config().online.goal_tolerance;
  std::size_t goal = 0;
  std::size_t cycle = 0;
  state.time = 0.0;
  bool last_blocked = false;

  for (;;) {
    while (goal < goals.size() && (state.position - goals[goal]).norm() < tol) ++goal;
    result.goals_reached = goal;
    if (goal == goals.size()) {
      result.success = true;
      result.final_state = RunState::goal_reached;
      break;
    }
    if (state.time >= time_limit - 1e-9) {
      result.final_state = last_blocked ? RunState::blocked : RunState::timed_out;
      result.failure = last_blocked ? FailureCause::blocked : FailureCause::timeout;
      break;
    }

    PointCloud cloud = world.sense(state, cycle);
    StepResult step = nav.step(state, std::move(cloud), goals[goal]);
    last_blocked = step.state == RunState::blocked;

    detail::StageClock clock;
    RobotState next = execute(state, step.command);
    next.time = static_cast<double>(cycle + 1) * dt;
    step.diagnostics.timings.execution = clock.lap();

    result.path_length += (next.position - state.position).norm();
    state = next;
    ++cycle;

    CycleRecord rec{state.time,
                    state.position,
                    state.yaw,
                    state.pitch,
                    step.diagnostics.selected,
                    step.diagnostics.best_cost,
                    step.diagnostics.selected_nav,
                    step.diagnostics.timings};
    result.cycles.push_back(rec);
    if (observer) observer(cycle, nav, rec);

    if (world.collides(state)) {
      result.final_state = RunState::running;
      result.failure = FailureCause::collision;
      break;
    }
  }
  result.duration = state.time;
  return result;
}

}  // namespace tentanav
