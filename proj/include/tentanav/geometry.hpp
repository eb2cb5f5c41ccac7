#pragma once

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

namespace tentanav {

using Vec3 = Eigen::Vector3d;
using Pose = Eigen::Isometry3d;

// Frames follow the usual robotics convention: x forward, y left, z up.
// Positive yaw turns left (counter-clockwise seen from above), positive
// pitch climbs.

inline double wrap_angle(double a)
{
  return std::atan2(std::sin(a), std::cos(a));
}

inline Vec3 direction(double yaw, double pitch)
{
  const double cp = std::cos(pitch);
  return {cp * std::cos(yaw), cp * std::sin(yaw), std::sin(pitch)};
}

inline Eigen::Matrix3d attitude(double yaw, double pitch)
{
  return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
          Eigen::AngleAxisd(-pitch, Vec3::UnitY()))
      .toRotationMatrix();
}

inline Pose make_pose(const Vec3& position, double yaw, double pitch)
{
  Pose pose = Pose::Identity();
  pose.linear() = attitude(yaw, pitch);
  pose.translation() = position;
  return pose;
}

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace tentanav
