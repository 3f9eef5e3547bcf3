#include "exactmppi/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "exactmppi/rng.hpp"

namespace exactmppi {

void MppiParams::validate() const {
  if (rollouts < 1) throw std::invalid_argument("mppi: rollouts must be >= 1");
  if (horizon < 1) throw std::invalid_argument("mppi: horizon must be >= 1");
  if (dt <= 0.0) throw std::invalid_argument("mppi: dt must be positive");
  if (lambda <= 0.0) throw std::invalid_argument("mppi: lambda must be positive");
  for (double s : sigma)
    if (s <= 0.0) throw std::invalid_argument("mppi: sigma components must be positive");
  if (d_safe < 0.0) throw std::invalid_argument("mppi: d_safe must be nonnegative");
  if (w_coll < 0.0 || w_rep < 0.0 || w_inf < 0.0)
    throw std::invalid_argument("mppi: penalty weights must be nonnegative");
}

NominalSequence NominalSequence::zero(const MotionModel& model, int horizon) {
  NominalSequence seq;
  seq.controls.assign(static_cast<std::size_t>(horizon), ControlInput::zero(model));
  return seq;
}

NominalSequence NominalSequence::constant(const ControlInput& u, int horizon) {
  NominalSequence seq;
  seq.controls.assign(static_cast<std::size_t>(horizon), u);
  return seq;
}

double polyline_length(std::span<const Point2> path) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) len += norm(path[i + 1] - path[i]);
  return len;
}

namespace {

struct PolylineHit {
  double distance = 0.0;
  double progress = 0.0;
};

PolylineHit project_on_polyline(Point2 p, std::span<const Point2> path) {
  if (path.empty()) throw std::invalid_argument("guidance polyline is empty");
  if (path.size() == 1) return {norm(p - path[0]), 0.0};
  PolylineHit best{std::numeric_limits<double>::infinity(), 0.0};
  double arc = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    Point2 a = path[i];
    Point2 b = path[i + 1];
    double seg_len = norm(b - a);
    double t = 0.0;
    if (seg_len > 0.0) t = std::clamp(dot(p - a, b - a) / (seg_len * seg_len), 0.0, 1.0);
    double d = norm(p - (a + t * (b - a)));
    if (d < best.distance) best = {d, arc + t * seg_len};
    arc += seg_len;
  }
  return best;
}

}  // namespace

double polyline_distance(Point2 p, std::span<const Point2> path) {
  return project_on_polyline(p, path).distance;
}

double polyline_progress(Point2 p, std::span<const Point2> path) {
  return project_on_polyline(p, path).progress;
}

std::vector<ControlInput> sample_perturbations(std::uint64_t seed, std::uint64_t cycle,
                                               const MotionModel& model,
                                               const MppiParams& params) {
  params.validate();
  const int dim = model.control_dim();
  const std::size_t total =
      static_cast<std::size_t>(params.rollouts) * static_cast<std::size_t>(params.horizon);
  std::vector<ControlInput> eps(total, ControlInput::zero(model));
  for (int r = 0; r < params.rollouts; ++r) {
    for (int h = 0; h < params.horizon; ++h) {
      auto& e = eps[static_cast<std::size_t>(r) * params.horizon + h];
      for (int c = 0; c < dim; ++c)
        e[c] = params.sigma[static_cast<std::size_t>(c)] *
               gaussian_at(seed, cycle, static_cast<std::uint64_t>(r),
                           static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(c));
    }
  }
  return eps;
}

double obstacle_cost(double d, const MppiParams& params) {
  double margin = std::max(params.d_safe - d, 0.0);
  return params.w_coll * (d < 0.0 ? 1.0 : 0.0) + params.w_rep * margin * margin;
}

double task_cost(const Pose2& q, const ControlInput& u, const Guidance& guidance,
                 const TaskWeights& weights, bool terminal) {
  (void)u;  // running control effort lives in control_cost
  Point2 pos{q.x, q.y};
  double dx = pos.x - guidance.goal.x;
  double dy = pos.y - guidance.goal.y;
  double cost = weights.goal_pos * (dx * dx + dy * dy);
  if (terminal) {
    double e = wrap_angle(q.theta - guidance.goal.theta);
    cost += weights.goal_head * e * e;
  }
  auto hit = project_on_polyline(pos, guidance.path);
  cost += weights.xtrack * hit.distance * hit.distance;
  cost -= weights.progress * hit.progress;
  return cost;
}

double terminal_goal_cost(const Pose2& q_end, const Guidance& guidance,
                          const TaskWeights& weights) {
  double dx = q_end.x - guidance.goal.x;
  double dy = q_end.y - guidance.goal.y;
  double e = wrap_angle(q_end.theta - guidance.goal.theta);
  return weights.goal_pos * (dx * dx + dy * dy) + weights.goal_head * e * e;
}

double control_cost(const ControlInput& u, const MppiParams& params) {
  double s = 0.0;
  for (int i = 0; i < u.dim; ++i) s += u[i] * u[i];
  return params.w_ctrl * s;
}

namespace {

// Scores rollout r in place. Cost of step h pairs the pre-step state q_h with
// u_h; the terminal state contributes through goal terms folded into h = T-1.
void score_rollout(int r, const Pose2& q0, const NominalSequence& nominal,
                   std::span<const ControlInput> perturbations, const ObstacleSet& obstacles,
                   const PreparedFootprint& footprint, const MotionModel& model,
                   const KinematicLimits& limits, const MppiParams& params,
                   const Guidance& guidance, const ControlInput& u_prev, RolloutBatch& batch) {
  const int T = params.horizon;
  const std::size_t row = static_cast<std::size_t>(r) * static_cast<std::size_t>(T);
  const std::size_t srow = static_cast<std::size_t>(r) * static_cast<std::size_t>(T + 1);

  ControlInput prev = u_prev;
  batch.states[srow] = q0;
  double cost = 0.0;
  bool unsafe = false;
  for (int h = 0; h < T; ++h) {
    ControlInput u = nominal.controls[static_cast<std::size_t>(h)];
    const ControlInput& e = perturbations[row + static_cast<std::size_t>(h)];
    for (int c = 0; c < u.dim; ++c) u[c] += e[c];
    u = clamp_control(model, u, prev, limits, params.dt);
    batch.controls[row + static_cast<std::size_t>(h)] = u;
    prev = u;

    const Pose2& q_h = batch.states[srow + static_cast<std::size_t>(h)];
    double d = min_signed_distance_at(footprint, q_h, obstacles);
    batch.d_min[row + static_cast<std::size_t>(h)] = d;
    unsafe = unsafe || (d < params.d_safe);

    cost += task_cost(q_h, u, guidance, params.task, false);
    cost += control_cost(u, params);
    cost += obstacle_cost(d, params);

    batch.states[srow + static_cast<std::size_t>(h) + 1] = step(model, q_h, u, params.dt);
  }
  cost += terminal_goal_cost(batch.states[srow + static_cast<std::size_t>(T)], guidance,
                             params.task);
  batch.costs[static_cast<std::size_t>(r)] = cost;
  batch.unsafe[static_cast<std::size_t>(r)] = unsafe ? 1 : 0;
}

}  // namespace

RolloutBatch evaluate_rollouts(const Pose2& q0, const NominalSequence& nominal,
                               std::span<const ControlInput> perturbations,
                               const ObstacleSet& obstacles, const PreparedFootprint& footprint,
                               const MotionModel& model, const KinematicLimits& limits,
                               const MppiParams& params, const Guidance& guidance,
                               const ControlInput& u_prev, int threads) {
  params.validate();
  const int K = params.rollouts;
  const int T = params.horizon;
  if (static_cast<int>(nominal.controls.size()) != T)
    throw std::invalid_argument("nominal length does not match horizon");
  if (perturbations.size() != static_cast<std::size_t>(K) * static_cast<std::size_t>(T))
    throw std::invalid_argument("perturbation array does not match K*T");

  RolloutBatch batch;
  batch.rollouts = K;
  batch.horizon = T;
  batch.perturbations.assign(perturbations.begin(), perturbations.end());
  batch.controls.assign(batch.perturbations.size(), ControlInput::zero(model));
  batch.states.assign(static_cast<std::size_t>(K) * static_cast<std::size_t>(T + 1), Pose2{});
  batch.d_min.assign(batch.perturbations.size(), 0.0);
  batch.costs.assign(static_cast<std::size_t>(K), 0.0);
  batch.unsafe.assign(static_cast<std::size_t>(K), 0);

  auto run = [&](int begin, int end) {
    for (int r = begin; r < end; ++r)
      score_rollout(r, q0, nominal, perturbations, obstacles, footprint, model, limits, params,
                    guidance, u_prev, batch);
  };
  if (threads <= 1 || K < 2 * threads) {
    run(0, K);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
      int begin = K * w / threads;
      int end = K * (w + 1) / threads;
      if (begin < end) pool.emplace_back(run, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  return batch;
}

std::vector<double> weights_from_costs(std::span<const double> costs, double lambda) {
  if (costs.empty()) throw std::invalid_argument("weights need at least one cost");
  double beta = *std::min_element(costs.begin(), costs.end());
  std::vector<double> w(costs.size());
  double sum = 0.0;
  for (std::size_t r = 0; r < costs.size(); ++r) {
    w[r] = std::exp(-(costs[r] - beta) / lambda);
    sum += w[r];
  }
  for (double& x : w) x /= sum;
  return w;
}

NominalSequence path_integral_update(const NominalSequence& nominal,
                                     std::span<const ControlInput> perturbations,
                                     std::span<const double> costs_augmented, double lambda) {
  const std::size_t K = costs_augmented.size();
  const std::size_t T = nominal.controls.size();
  if (perturbations.size() != K * T)
    throw std::invalid_argument("perturbation array does not match K*T");
  auto w = weights_from_costs(costs_augmented, lambda);
  NominalSequence out = nominal;
  for (std::size_t h = 0; h < T; ++h) {
    auto& u = out.controls[h];
    for (std::size_t r = 0; r < K; ++r) {
      const auto& e = perturbations[r * T + h];
      for (int c = 0; c < u.dim; ++c) u[c] += w[r] * e[c];
    }
  }
  return out;
}

ValidationResult validate_nominal(const NominalSequence& nominal, const Pose2& q0,
                                  const ObstacleSet& obstacles, const PreparedFootprint& footprint,
                                  const MotionModel& model, const KinematicLimits& limits,
                                  const MppiParams& params, const Guidance& guidance,
                                  const ControlInput& u_prev) {
  const int T = static_cast<int>(nominal.controls.size());
  ValidationResult res;
  res.d_min.reserve(static_cast<std::size_t>(T));
  res.valid = true;

  Pose2 q = q0;
  ControlInput prev = u_prev;
  double cost = 0.0;
  for (int h = 0; h < T; ++h) {
    ControlInput u = clamp_control(model, nominal.controls[static_cast<std::size_t>(h)], prev,
                                   limits, params.dt);
    prev = u;
    double d = min_signed_distance_at(footprint, q, obstacles);
    res.d_min.push_back(d);
    if (d < params.d_safe) res.valid = false;
    cost += task_cost(q, u, guidance, params.task, false);
    cost += control_cost(u, params);
    cost += obstacle_cost(d, params);
    q = step(model, q, u, params.dt);
  }
  cost += terminal_goal_cost(q, guidance, params.task);
  res.cost = cost;
  return res;
}

MppiController::MppiController(MotionModel model, KinematicLimits limits,
                               const FootprintSpec& footprint, MppiParams params, int threads)
    : model_(model),
      limits_(limits),
      footprint_(prepare(footprint)),
      params_(params),
      threads_(std::max(threads, 1)),
      nominal_(NominalSequence::zero(model, params.horizon)),
      u_prev_(ControlInput::zero(model)) {
  params_.validate();
}

void MppiController::warm_start(const ControlInput& measured) {
  ControlInput u = clamp_control(model_, measured, measured, limits_, params_.dt);
  nominal_ = NominalSequence::constant(u, params_.horizon);
  u_prev_ = u;
}

void MppiController::set_rate_anchor(const ControlInput& u) { u_prev_ = u; }

ControlDecision MppiController::control_cycle(const Pose2& q0, const ObstacleSet& obstacles,
                                              const Guidance& guidance) {
  auto eps = sample_perturbations(params_.seed, cycle_, model_, params_);
  auto batch = evaluate_rollouts(q0, nominal_, eps, obstacles, footprint_, model_, limits_,
                                 params_, guidance, u_prev_, threads_);

  std::vector<double> augmented(batch.costs);
  for (std::size_t r = 0; r < augmented.size(); ++r)
    if (batch.unsafe[r]) augmented[r] += params_.w_inf;

  auto weights = weights_from_costs(augmented, params_.lambda);
  double beta = *std::min_element(augmented.begin(), augmented.end());
  double entropy = 0.0;
  for (double w : weights)
    if (w > 0.0) entropy -= w * std::log(w);

  NominalSequence updated = nominal_;
  const std::size_t T = static_cast<std::size_t>(params_.horizon);
  for (std::size_t h = 0; h < T; ++h) {
    auto& u = updated.controls[h];
    for (std::size_t r = 0; r < weights.size(); ++r) {
      const auto& e = eps[r * T + h];
      for (int c = 0; c < u.dim; ++c) u[c] += weights[r] * e[c];
    }
  }
  // Keep the stored nominal executable: sequential clamp from the last
  // executed command.
  {
    ControlInput prev = u_prev_;
    for (auto& u : updated.controls) {
      u = clamp_control(model_, u, prev, limits_, params_.dt);
      prev = u;
    }
  }

  auto validation = validate_nominal(updated, q0, obstacles, footprint_, model_, limits_, params_,
                                     guidance, u_prev_);

  ControlDecision decision;
  decision.diagnostics.best_cost = beta;
  decision.diagnostics.weight_entropy = entropy;
  decision.diagnostics.nominal_cost = validation.cost;
  decision.diagnostics.nominal_d_min = validation.d_min;
  decision.validated = validation.valid;

  if (validation.valid) {
    decision.command = updated.controls.front();
    // Receding-horizon shift: drop the executed command, repeat the last.
    NominalSequence shifted = updated;
    for (std::size_t h = 0; h + 1 < T; ++h) shifted.controls[h] = updated.controls[h + 1];
    shifted.controls[T - 1] = updated.controls[T - 1];
    nominal_ = shifted;
  } else {
    // Zero-velocity hold; nominal re-seeded to zero for the next cycle.
    decision.command = ControlInput::zero(model_);
    nominal_ = NominalSequence::zero(model_, params_.horizon);
  }
  decision.nominal = nominal_;
  u_prev_ = decision.command;
  ++cycle_;
  return decision;
}

}  // namespace exactmppi
