#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "exactmppi/controller.hpp"

namespace exactmppi {

struct HybridParams {
  double lambda_switch = 5.0;
  int tau_cool_max = 10;
  double v_min = 0.05;
  double omega_min = 0.05;
  double noise_deadzone_v = 0.01;
  double noise_deadzone_omega = 0.01;

  void validate() const;  // deadzones must sit below the minimum executables
};

struct HybridMode {
  std::string name;
  MotionModel model;
  KinematicLimits limits;
};

/// Zero every component inadmissible for the mode. A 3-component input is
/// read as a generic (vx, vy, omega) twist; a 2-component one as (v, omega).
/// Inputs already shaped for the mode pass through unchanged.
ControlInput project_to_mode(const ControlInput& u_raw, const MotionModel& mode);

/// Rescale commands between the noise deadzone and the minimum executable
/// magnitude up to that minimum. Direction is preserved for translational
/// modes, sign for pure rotation.
ControlInput deadzone_correct(const ControlInput& u, const MotionModel& mode,
                              const HybridParams& params);

struct HybridDecision {
  ControlInput command;
  int mode_index = 0;
  std::string mode_name;
  bool validated = false;           // false => all modes failed, safe stop
  std::vector<double> mode_costs;   // switch-penalized, +inf when invalid
  CycleDiagnostics diagnostics;     // from the selected mode
};

/// Per-cycle mode selection over independent MPPI families (Algorithm-style
/// switching penalty, cooldown, projection, deadzone correction).
class HybridController {
 public:
  HybridController(std::vector<HybridMode> modes, const FootprintSpec& footprint,
                   MppiParams params, HybridParams hybrid_params, int threads = 1);

  HybridDecision hybrid_cycle(const Pose2& q0, const ObstacleSet& obstacles,
                              const Guidance& guidance);

  int previous_mode() const { return m_prev_; }
  int cooldown() const { return tau_cool_; }
  const std::vector<HybridMode>& modes() const { return modes_; }

 private:
  std::vector<HybridMode> modes_;
  std::vector<std::unique_ptr<MppiController>> controllers_;
  HybridParams hybrid_params_;
  int m_prev_ = 0;
  int tau_cool_ = 0;
};

}  // namespace exactmppi
