#include "lumen/cost.hpp"

#include <cmath>
#include <stdexcept>

namespace lumen {

std::optional<Posterior> posterior(Vec2 x_cam, Vec2 p, double k_tilde, double eps) {
  const double a = x_cam.x - p.x;
  const double b = x_cam.y - p.y;
  const double planar = std::hypot(a, b);
  if (planar < eps || planar == 0.0) {
    return std::nullopt;
  }
  return Posterior{k_tilde * planar, bearing(a, b)};
}

std::optional<Residual> residual(const Observation& obs, Vec2 p, double k_tilde,
                                 double eps) {
  const Vec2 x_cam = obs.cam2_pose_pre.position();
  const auto pos = posterior(x_cam, p, k_tilde, eps);
  if (!pos) {
    return std::nullopt;
  }
  const double a = x_cam.x - p.x;
  const double b = x_cam.y - p.y;
  const double planar = std::hypot(a, b);
  const double planar_sq = planar * planar;

  Residual r;
  r.dist = obs.d_obs - pos->distance;
  r.dist_jacobian << k_tilde * a / planar, k_tilde * b / planar;
  if (obs.bearing_defined) {
    r.ang = wrap_angle(obs.phi_obs - pos->bearing);
    r.ang_jacobian << b / planar_sq, -a / planar_sq;
  }
  return r;
}

CostEvaluation evaluate_cost(std::span<const Observation> observations, Vec2 p,
                             double k_tilde, const SolverConfig& weights, double eps) {
  const double wd = weights.distance_weight;
  const double wa = weights.angle_weight;
  CostEvaluation out;
  for (const auto& obs : observations) {
    const auto r = residual(obs, p, k_tilde, eps);
    if (!r) {
      continue;
    }
    ++out.used;
    out.cost += 0.5 * (wd * r->dist * r->dist + wa * r->ang * r->ang);
    out.gradient += wd * r->dist * r->dist_jacobian.transpose() +
                    wa * r->ang * r->ang_jacobian.transpose();
    out.normal += wd * r->dist_jacobian.transpose() * r->dist_jacobian +
                  wa * r->ang_jacobian.transpose() * r->ang_jacobian;
  }
  return out;
}

double cost_j1(const LedTrack& track, Vec2 p, const EstimatorConfig& cfg) {
  if (!track.k_refined) {
    throw std::invalid_argument("cost_j1: track has no refined scale");
  }
  const auto eval = evaluate_cost(track.observations, p, *track.k_refined, cfg.solver,
                                  cfg.distance_epsilon);
  if (eval.used == 0) {
    throw std::invalid_argument("cost_j1: no usable observations");
  }
  return eval.cost;
}

}  // namespace lumen
