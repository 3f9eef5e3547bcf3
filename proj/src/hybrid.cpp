#include "exactmppi/hybrid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace exactmppi {

void HybridParams::validate() const {
  if (lambda_switch < 0.0) throw std::invalid_argument("hybrid: lambda_switch must be >= 0");
  if (tau_cool_max < 0) throw std::invalid_argument("hybrid: tau_cool_max must be >= 0");
  if (noise_deadzone_v < 0.0 || noise_deadzone_v >= v_min)
    throw std::invalid_argument("hybrid: noise_deadzone_v must lie in [0, v_min)");
  if (noise_deadzone_omega < 0.0 || noise_deadzone_omega >= omega_min)
    throw std::invalid_argument("hybrid: noise_deadzone_omega must lie in [0, omega_min)");
}

ControlInput project_to_mode(const ControlInput& u_raw, const MotionModel& mode) {
  ControlInput out = ControlInput::zero(mode);
  if (u_raw.dim == mode.control_dim()) {
    out = u_raw;
    return out;
  }
  // Generic twist layouts: (vx, vy, omega) or (v, omega).
  double vx = 0.0, vy = 0.0, omega = 0.0;
  if (u_raw.dim == 3) {
    vx = u_raw[0];
    vy = u_raw[1];
    omega = u_raw[2];
  } else if (u_raw.dim == 2) {
    vx = u_raw[0];
    omega = u_raw[1];
  } else if (u_raw.dim == 1) {
    vx = u_raw[0];
  }
  switch (mode.tag) {
    case ModelTag::kDiff:
      out[0] = vx;
      out[1] = omega;
      break;
    case ModelTag::kAckermann:
      out[0] = vx;  // steering has no twist equivalent, dropped to 0
      break;
    case ModelTag::kOmni:
      out[0] = vx;
      out[1] = vy;
      out[2] = omega;
      break;
    case ModelTag::kSpin:
      out[0] = omega;
      break;
    case ModelTag::kParallel:
      out[0] = vy;
      break;
  }
  return out;
}

ControlInput deadzone_correct(const ControlInput& u, const MotionModel& mode,
                              const HybridParams& params) {
  ControlInput out = u;
  if (mode.tag == ModelTag::kSpin) {
    double w = out[0];
    if (params.noise_deadzone_omega < std::abs(w) && std::abs(w) < params.omega_min)
      out[0] = std::copysign(params.omega_min, w);
    return out;
  }
  // Translational modes: rescale the linear part, leave steering/yaw alone.
  int lin_count = (mode.tag == ModelTag::kOmni) ? 2 : 1;
  double mag2 = 0.0;
  for (int i = 0; i < lin_count; ++i) mag2 += out[i] * out[i];
  double mag = std::sqrt(mag2);
  if (params.noise_deadzone_v < mag && mag < params.v_min) {
    double scale = params.v_min / mag;
    for (int i = 0; i < lin_count; ++i) out[i] *= scale;
  }
  return out;
}

HybridController::HybridController(std::vector<HybridMode> modes, const FootprintSpec& footprint,
                                   MppiParams params, HybridParams hybrid_params, int threads)
    : modes_(std::move(modes)), hybrid_params_(hybrid_params) {
  if (modes_.empty()) throw std::invalid_argument("hybrid: at least one active mode required");
  hybrid_params_.validate();
  controllers_.reserve(modes_.size());
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    MppiParams p = params;
    // Independent streams per mode family.
    p.seed = params.seed ^ (0x9E3779B97F4A7C15ull * (i + 1));
    controllers_.push_back(std::make_unique<MppiController>(modes_[i].model, modes_[i].limits,
                                                            footprint, p, threads));
  }
}

HybridDecision HybridController::hybrid_cycle(const Pose2& q0, const ObstacleSet& obstacles,
                                              const Guidance& guidance) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<ControlDecision> decisions;
  decisions.reserve(modes_.size());
  HybridDecision out;
  out.mode_costs.assign(modes_.size(), inf);

  for (std::size_t m = 0; m < modes_.size(); ++m) {
    auto d = controllers_[m]->control_cycle(q0, obstacles, guidance);
    if (d.validated) {
      double barred = d.diagnostics.nominal_cost;
      if (static_cast<int>(m) != m_prev_) barred += hybrid_params_.lambda_switch;
      out.mode_costs[m] = barred;
    }
    decisions.push_back(std::move(d));
  }

  bool any_valid = false;
  for (double c : out.mode_costs) any_valid = any_valid || std::isfinite(c);
  if (!any_valid) {
    // Safe stop: zero command, previous mode retained, cooldown untouched.
    out.mode_index = m_prev_;
    out.mode_name = modes_[static_cast<std::size_t>(m_prev_)].name;
    out.command = ControlInput::zero(modes_[static_cast<std::size_t>(m_prev_)].model);
    out.validated = false;
    out.diagnostics = decisions[static_cast<std::size_t>(m_prev_)].diagnostics;
    return out;
  }

  // argmin with ties broken toward m_prev, then declaration order.
  int best = m_prev_;
  double best_cost = out.mode_costs[static_cast<std::size_t>(m_prev_)];
  for (std::size_t m = 0; m < modes_.size(); ++m) {
    if (out.mode_costs[m] < best_cost) {
      best = static_cast<int>(m);
      best_cost = out.mode_costs[m];
    }
  }
  if (tau_cool_ > 0 && best != m_prev_) best = m_prev_;  // blocked switch
  tau_cool_ = (best != m_prev_) ? hybrid_params_.tau_cool_max : std::max(tau_cool_ - 1, 0);

  const auto& selected = decisions[static_cast<std::size_t>(best)];
  ControlInput raw = selected.command;
  ControlInput projected = project_to_mode(raw, modes_[static_cast<std::size_t>(best)].model);
  out.command = deadzone_correct(projected, modes_[static_cast<std::size_t>(best)].model,
                                 hybrid_params_);
  out.mode_index = best;
  out.mode_name = modes_[static_cast<std::size_t>(best)].name;
  out.validated = selected.validated;
  out.diagnostics = selected.diagnostics;

  // Unselected families anchor their next rate clamp on the command the
  // robot actually executed, re-expressed in their own control space.
  for (std::size_t m = 0; m < modes_.size(); ++m) {
    if (static_cast<int>(m) == best) continue;
    controllers_[m]->set_rate_anchor(project_to_mode(raw, modes_[m].model));
  }

  m_prev_ = best;
  return out;
}

}  // namespace exactmppi
