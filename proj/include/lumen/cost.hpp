#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include <Eigen/Core>

#include "lumen/estimator.hpp"
#include "lumen/geometry.hpp"

namespace lumen {

/// Predicted polar observation (pixel distance, bearing) of an LED at `p`
/// seen from a camera at `x_cam`.
struct Posterior {
  double distance{0.0};  // pixels
  double bearing{0.0};   // radians
};

struct Residual {
  double dist{0.0};  // pixels
  double ang{0.0};   // radians, wrapped
  // Partial derivatives with respect to the LED position (x, y).
  Eigen::RowVector2d dist_jacobian = Eigen::RowVector2d::Zero();
  Eigen::RowVector2d ang_jacobian = Eigen::RowVector2d::Zero();
};

/// Empty when the camera is within `eps` of `p`.
std::optional<Posterior> posterior(Vec2 x_cam, Vec2 p, double k_tilde, double eps);

/// Empty when the camera is within `eps` of `p`. Observations without a
/// defined bearing contribute a zero angular residual.
std::optional<Residual> residual(const Observation& obs, Vec2 p, double k_tilde,
                                 double eps);

struct CostEvaluation {
  double cost{0.0};
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
  Eigen::Matrix2d normal = Eigen::Matrix2d::Zero();  // J^T W J
  std::size_t used{0};
};

CostEvaluation evaluate_cost(std::span<const Observation> observations, Vec2 p,
                             double k_tilde, const SolverConfig& weights, double eps);

/// Sum over the track of 0.5 * (w_d errdist^2 + w_a errang^2). Throws when
/// k_refined is missing or no observation is usable at `p`.
double cost_j1(const LedTrack& track, Vec2 p, const EstimatorConfig& cfg);

}  // namespace lumen
