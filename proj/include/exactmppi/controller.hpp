#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "exactmppi/geometry.hpp"
#include "exactmppi/kinematics.hpp"

namespace exactmppi {

struct TaskWeights {
  double goal_pos = 1.0;
  double goal_head = 0.5;
  double xtrack = 2.0;
  double progress = 2.0;
};

struct MppiParams {
  int rollouts = 1000;  // K
  int horizon = 50;     // T
  double dt = 0.1;
  double lambda = 1.0;
  std::array<double, 3> sigma{0.3, 0.3, 0.3};  // per control component
  double d_safe = 0.1;
  double w_coll = 1e6;
  double w_rep = 50.0;
  double w_inf = 1e9;
  TaskWeights task;
  double w_ctrl = 0.02;
  std::uint64_t seed = 0;

  void validate() const;  // throws on invariant violations
};

/// Weak guidance: waypoint polyline plus the goal pose.
struct Guidance {
  std::vector<Point2> path;
  Pose2 goal;
};

struct NominalSequence {
  std::vector<ControlInput> controls;

  static NominalSequence zero(const MotionModel& model, int horizon);
  static NominalSequence constant(const ControlInput& u, int horizon);
};

struct RolloutBatch {
  int rollouts = 0;
  int horizon = 0;
  std::vector<ControlInput> perturbations;  // K*T, sampled epsilon
  std::vector<ControlInput> controls;       // K*T, clamped nominal+epsilon
  std::vector<Pose2> states;                // K*(T+1)
  std::vector<double> d_min;                // K*T, at pre-step states
  std::vector<double> costs;                // K
  std::vector<std::uint8_t> unsafe;         // K

  std::size_t at(int r, int h) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(horizon) +
           static_cast<std::size_t>(h);
  }
};

struct CycleDiagnostics {
  double best_cost = 0.0;       // beta over augmented costs
  double weight_entropy = 0.0;  // -sum(w log w)
  double nominal_cost = 0.0;    // task+ctrl+obs of the updated nominal
  std::vector<double> nominal_d_min;
};

struct ControlDecision {
  ControlInput command;
  bool validated = false;
  NominalSequence nominal;
  CycleDiagnostics diagnostics;
};

struct ValidationResult {
  bool valid = false;
  std::vector<double> d_min;  // per horizon step, pre-step states
  double cost = 0.0;          // task+ctrl+obs of the validated sequence
};

// --- polyline guidance helpers ---------------------------------------------

double polyline_distance(Point2 p, std::span<const Point2> path);
/// Arc length up to the projection of p onto the polyline.
double polyline_progress(Point2 p, std::span<const Point2> path);
double polyline_length(std::span<const Point2> path);

// --- cycle operations -------------------------------------------------------

/// K*T i.i.d. zero-mean Gaussian perturbations; a pure function of
/// (seed, cycle, rollout, step, component).
std::vector<ControlInput> sample_perturbations(std::uint64_t seed, std::uint64_t cycle,
                                               const MotionModel& model, const MppiParams& params);

/// w_coll * 1(d < 0) + w_rep * max(d_safe - d, 0)^2
double obstacle_cost(double d, const MppiParams& params);

/// Running task cost at (q, u). The heading error term applies at the
/// terminal fold only.
double task_cost(const Pose2& q, const ControlInput& u, const Guidance& guidance,
                 const TaskWeights& weights, bool terminal = false);

/// Goal terms evaluated at the terminal state, folded into step T-1.
double terminal_goal_cost(const Pose2& q_end, const Guidance& guidance,
                          const TaskWeights& weights);

double control_cost(const ControlInput& u, const MppiParams& params);

/// Propagate, score, and flag all K rollouts. Data-parallel across rollouts;
/// results independent of `threads`.
RolloutBatch evaluate_rollouts(const Pose2& q0, const NominalSequence& nominal,
                               std::span<const ControlInput> perturbations,
                               const ObstacleSet& obstacles, const PreparedFootprint& footprint,
                               const MotionModel& model, const KinematicLimits& limits,
                               const MppiParams& params, const Guidance& guidance,
                               const ControlInput& u_prev, int threads = 1);

/// Softmax weights with beta subtraction; sums to 1.
std::vector<double> weights_from_costs(std::span<const double> costs, double lambda);

/// u_h += sum_r w_r eps_h_r using the given costs (already augmented).
NominalSequence path_integral_update(const NominalSequence& nominal,
                                     std::span<const ControlInput> perturbations,
                                     std::span<const double> costs_augmented, double lambda);

/// Roll out the nominal once; valid iff every horizon step clears d_safe.
ValidationResult validate_nominal(const NominalSequence& nominal, const Pose2& q0,
                                  const ObstacleSet& obstacles, const PreparedFootprint& footprint,
                                  const MotionModel& model, const KinematicLimits& limits,
                                  const MppiParams& params, const Guidance& guidance,
                                  const ControlInput& u_prev);

/// One receding-horizon MPPI controller instance. Sendable between threads,
/// not concurrently shared.
class MppiController {
 public:
  MppiController(MotionModel model, KinematicLimits limits, const FootprintSpec& footprint,
                 MppiParams params, int threads = 1);

  /// Fill the nominal sequence with the measured chassis velocity.
  void warm_start(const ControlInput& measured);

  ControlDecision control_cycle(const Pose2& q0, const ObstacleSet& obstacles,
                                const Guidance& guidance);

  const NominalSequence& nominal() const { return nominal_; }
  const MotionModel& model() const { return model_; }
  const MppiParams& params() const { return params_; }
  const ControlInput& last_command() const { return u_prev_; }
  std::uint64_t cycle_index() const { return cycle_; }

  /// Rate-clamp anchor for the next cycle (used by the hybrid wrapper to
  /// track the physically executed command across modes).
  void set_rate_anchor(const ControlInput& u);

 private:
  MotionModel model_;
  KinematicLimits limits_;
  PreparedFootprint footprint_;
  MppiParams params_;
  int threads_ = 1;
  NominalSequence nominal_;
  ControlInput u_prev_;
  std::uint64_t cycle_ = 0;
};

}  // namespace exactmppi
