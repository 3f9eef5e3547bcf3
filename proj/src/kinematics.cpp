#include "exactmppi/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exactmppi {

MotionModel MotionModel::ackermann(double wheelbase) {
  if (wheelbase <= 0.0) throw std::invalid_argument("ackermann wheelbase must be positive");
  return {ModelTag::kAckermann, wheelbase};
}

int MotionModel::control_dim() const {
  switch (tag) {
    case ModelTag::kDiff:
    case ModelTag::kAckermann:
      return 2;
    case ModelTag::kOmni:
      return 3;
    case ModelTag::kSpin:
    case ModelTag::kParallel:
      return 1;
  }
  return 0;
}

std::string MotionModel::name() const {
  switch (tag) {
    case ModelTag::kDiff:
      return "diff";
    case ModelTag::kAckermann:
      return "ackermann";
    case ModelTag::kOmni:
      return "omni";
    case ModelTag::kSpin:
      return "spin";
    case ModelTag::kParallel:
      return "parallel";
  }
  return "?";
}

MotionModel model_from_name(const std::string& name, double wheelbase) {
  if (name == "diff") return MotionModel::diff();
  if (name == "ackermann") return MotionModel::ackermann(wheelbase);
  if (name == "omni") return MotionModel::omni();
  if (name == "spin") return MotionModel::spin();
  if (name == "parallel") return MotionModel::parallel();
  throw std::invalid_argument("unknown motion model: " + name);
}

ControlInput ControlInput::zero(const MotionModel& model) {
  ControlInput u;
  u.dim = model.control_dim();
  return u;
}

KinematicLimits KinematicLimits::unbounded() {
  KinematicLimits lims;
  for (auto& c : lims.component) c = {-1e9, 1e9, -1e18, 1e18};
  lims.steer_max = 1e9;
  return lims;
}

namespace {

void check_dim(const MotionModel& model, const ControlInput& u) {
  if (u.dim != model.control_dim())
    throw std::invalid_argument("control dimension does not match motion model");
}

}  // namespace

PoseRate derivative(const MotionModel& model, const Pose2& q, const ControlInput& u) {
  check_dim(model, u);
  const double ct = std::cos(q.theta);
  const double st = std::sin(q.theta);
  switch (model.tag) {
    case ModelTag::kDiff:
      return {u[0] * ct, u[0] * st, u[1]};
    case ModelTag::kAckermann:
      return {u[0] * ct, u[0] * st, u[0] / model.wheelbase * std::tan(u[1])};
    case ModelTag::kOmni:
      return {u[0] * ct - u[1] * st, u[0] * st + u[1] * ct, u[2]};
    case ModelTag::kSpin:
      return {0.0, 0.0, u[0]};
    case ModelTag::kParallel:
      return {-u[0] * st, u[0] * ct, 0.0};
  }
  return {};
}

Pose2 step(const MotionModel& model, const Pose2& q, const ControlInput& u, double dt) {
  PoseRate f = derivative(model, q, u);
  return {q.x + f.dx * dt, q.y + f.dy * dt, q.theta + f.dtheta * dt};
}

ControlInput clamp_control(const MotionModel& model, const ControlInput& u,
                           const ControlInput& u_prev, const KinematicLimits& limits, double dt) {
  check_dim(model, u);
  check_dim(model, u_prev);
  ControlInput out = u;
  for (int i = 0; i < u.dim; ++i) {
    const auto& lim = limits.component[static_cast<std::size_t>(i)];
    double lo = lim.vel_min;
    double hi = lim.vel_max;
    if (model.tag == ModelTag::kAckermann && i == 1) {
      lo = std::max(lo, -limits.steer_max);
      hi = std::min(hi, limits.steer_max);
    }
    double v = std::clamp(out[i], lo, hi);
    v = std::clamp(v, u_prev[i] + lim.acc_min * dt, u_prev[i] + lim.acc_max * dt);
    out[i] = v;
  }
  return out;
}

std::vector<Pose2> rollout(const MotionModel& model, const Pose2& q0,
                           std::span<const ControlInput> controls, double dt) {
  if (controls.empty()) throw std::invalid_argument("rollout needs a nonempty control sequence");
  std::vector<Pose2> traj;
  traj.reserve(controls.size() + 1);
  traj.push_back(q0);
  for (const auto& u : controls) traj.push_back(step(model, traj.back(), u, dt));
  return traj;
}

}  // namespace exactmppi
