#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "exactmppi/geometry.hpp"

namespace exactmppi {

enum class ModelTag { kDiff, kAckermann, kOmni, kSpin, kParallel };

/// Planar motion model; wheelbase only meaningful for Ackermann.
struct MotionModel {
  ModelTag tag = ModelTag::kDiff;
  double wheelbase = 0.0;

  static MotionModel diff() { return {ModelTag::kDiff, 0.0}; }
  static MotionModel ackermann(double wheelbase);
  static MotionModel omni() { return {ModelTag::kOmni, 0.0}; }
  static MotionModel spin() { return {ModelTag::kSpin, 0.0}; }
  static MotionModel parallel() { return {ModelTag::kParallel, 0.0}; }

  int control_dim() const;
  std::string name() const;
};

MotionModel model_from_name(const std::string& name, double wheelbase = 0.0);

/// Model-shaped control vector:
///   diff (v, omega) | ackermann (v, delta) | omni (vx, vy, omega)
///   spin (omega)    | parallel (v_para)
struct ControlInput {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  int dim = 0;

  static ControlInput zero(const MotionModel& model);
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
};

struct PoseRate {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;
};

/// Per-component velocity and rate bounds.
struct ComponentLimit {
  double vel_min = -1.0;
  double vel_max = 1.0;
  double acc_min = -1e9;
  double acc_max = 1e9;
};

struct KinematicLimits {
  std::array<ComponentLimit, 3> component{};
  double steer_max = 0.6;  // radians, Ackermann steering angle

  static KinematicLimits unbounded();
};

/// Continuous-time pose rate of the selected model. Throws on a
/// control/model dimension mismatch.
PoseRate derivative(const MotionModel& model, const Pose2& q, const ControlInput& u);

/// Forward-Euler step q + F(q, u) * dt. Heading is left unwrapped.
Pose2 step(const MotionModel& model, const Pose2& q, const ControlInput& u, double dt);

/// Velocity clip, then per-component rate clip against u_prev over dt.
ControlInput clamp_control(const MotionModel& model, const ControlInput& u,
                           const ControlInput& u_prev, const KinematicLimits& limits, double dt);

/// Trajectory of length controls.size() + 1 starting at q0.
std::vector<Pose2> rollout(const MotionModel& model, const Pose2& q0,
                           std::span<const ControlInput> controls, double dt);

}  // namespace exactmppi
