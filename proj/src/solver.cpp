#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "lumen/cost.hpp"
#include "lumen/estimator.hpp"

namespace lumen {

namespace {

constexpr double kDampingFactor = 10.0;
// Reciprocal condition number below which the normal equations count as singular.
constexpr double kSingularRcond = 1e-14;

double reciprocal_condition(const Eigen::Matrix2d& m) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double hi = std::abs(ev(1));
  if (!(hi > 0.0) || !std::isfinite(hi)) {
    return 0.0;
  }
  return std::max(ev(0), 0.0) / hi;
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kStepTolerance: return "step-tolerance";
    case SolveStatus::kCostTolerance: return "cost-tolerance";
    case SolveStatus::kMaxIterations: return "max-iterations";
    case SolveStatus::kSingular: return "singular";
    case SolveStatus::kNoUsableObservations: return "no-usable-observations";
  }
  return "unknown";
}

SolveResult solve_position(std::span<const Observation> observations, double k_tilde,
                           Vec2 initial, const EstimatorConfig& cfg) {
  const SolverConfig& sc = cfg.solver;
  const double eps = cfg.distance_epsilon;

  SolveResult result;
  result.position = initial;

  CostEvaluation current = evaluate_cost(observations, initial, k_tilde, sc, eps);
  result.final_cost = current.cost;
  if (current.used == 0) {
    result.status = SolveStatus::kNoUsableObservations;
    return result;
  }
  result.accepted_costs.push_back(current.cost);

  Vec2 p = initial;
  double damping = sc.initial_damping;
  result.status = SolveStatus::kMaxIterations;
  for (int iter = 1; iter <= sc.max_iterations; ++iter) {
    result.iterations = iter;
    if (reciprocal_condition(current.normal) < kSingularRcond) {
      result.status = SolveStatus::kSingular;
      break;
    }
    const Eigen::Matrix2d lhs = current.normal + damping * Eigen::Matrix2d::Identity();
    const Eigen::Vector2d step = lhs.ldlt().solve(-current.gradient);
    if (!step.allFinite()) {
      result.status = SolveStatus::kSingular;
      break;
    }
    if (step.norm() < sc.step_tolerance) {
      result.status = SolveStatus::kStepTolerance;
      break;
    }

    const Vec2 candidate{p.x + step(0), p.y + step(1)};
    CostEvaluation next = evaluate_cost(observations, candidate, k_tilde, sc, eps);
    if (next.used > 0 && next.cost <= current.cost) {
      const double decrease = current.cost - next.cost;
      const double relative =
          current.cost > 0.0 ? decrease / current.cost : 0.0;
      p = candidate;
      current = std::move(next);
      result.accepted_costs.push_back(current.cost);
      damping /= kDampingFactor;
      if (relative < sc.cost_tolerance) {
        result.status = SolveStatus::kCostTolerance;
        break;
      }
    } else {
      damping *= kDampingFactor;
    }
  }

  result.final_cost = current.cost;
  if (result.status == SolveStatus::kSingular) {
    result.position = initial;
    result.converged = false;
    return result;
  }
  result.position = p;
  result.converged = result.status == SolveStatus::kStepTolerance ||
                     result.status == SolveStatus::kCostTolerance;
  return result;
}

SolveResult solve_position(const LedTrack& track, const EstimatorConfig& cfg,
                           std::optional<Vec2> warm_start) {
  if (!track.rough_position || !track.k_refined) {
    throw std::invalid_argument(
        "solve_position: track needs a rough position and a refined scale");
  }
  if (track.observations.size() < cfg.min_obs_for_solve) {
    throw std::invalid_argument("solve_position: not enough observations");
  }
  const Vec2 start = warm_start.value_or(*track.rough_position);
  SolveResult r = solve_position(track.observations, *track.k_refined, start, cfg);
  if (r.status == SolveStatus::kSingular) {
    r.position = *track.rough_position;
  }
  return r;
}

}  // namespace lumen
