#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lumen/geometry.hpp"

namespace lumen {

struct SolverConfig {
  int max_iterations{50};
  double step_tolerance{1e-9};   // meters
  double cost_tolerance{1e-12};  // relative cost decrease
  double initial_damping{1e-3};
  double angle_weight{1.0};
  double distance_weight{1.0};

  bool operator==(const SolverConfig&) const = default;
  void validate() const;
};

struct EstimatorConfig {
  // ROI radius below which the camera position is taken as a candidate LED position.
  double alt_threshold_tau{40.0};
  std::size_t pauta_min_samples{3};
  std::size_t min_obs_for_solve{3};
  // Cameras closer than this to the LED estimate are dropped from the cost.
  double distance_epsilon{1e-3};
  SolverConfig solver;
  double cam_height_h1{0.4};
  CameraIntrinsics intrinsics{640.0, 480.0, 600.0};
  FixedTransform2D cam1_to_cam2;

  bool operator==(const EstimatorConfig&) const = default;
  void validate() const;
};

enum class SolveStatus {
  kStepTolerance,
  kCostTolerance,
  kMaxIterations,
  kSingular,
  kNoUsableObservations,
};

const char* to_string(SolveStatus status);

struct SolveResult {
  Vec2 position;
  int iterations{0};
  double final_cost{0.0};
  bool converged{false};
  SolveStatus status{SolveStatus::kMaxIterations};
  // Cost at the start point followed by the cost after every accepted step.
  std::vector<double> accepted_costs;
};

/// Per-LED accumulator for the mapping pipeline.
struct LedTrack {
  LedKey led_key;
  std::vector<Observation> observations;
  std::vector<Vec2> alt_positions;
  std::optional<Vec2> rough_position;
  std::vector<double> k_samples;  // pixels per meter
  // Rough position the current k samples were computed against.
  std::optional<Vec2> k_basis;
  std::optional<double> k_refined;
  std::optional<double> height;
  std::optional<Vec2> optimized_position;
  std::optional<SolveResult> last_solve;
};

/// Camera position of `obs` when its ROI lies strictly inside `tau` pixels.
std::optional<Vec2> accept_alternative(const Observation& obs, double tau);

/// Pauta-filtered mean of the alternative positions, per axis.
std::optional<Vec2> rough_position(const LedTrack& track, const EstimatorConfig& cfg);

/// Pixel-to-meter scale d_obs / D for one observation against the rough LED
/// position. Empty when D < eps or when d_obs is zero.
std::optional<double> sample_k(const Observation& obs, Vec2 p_tilde, double eps);

std::optional<double> refine_k(const LedTrack& track, const EstimatorConfig& cfg);

/// LED height from the refined scale: h1 + f / k. Throws on k <= 0.
double estimate_height(double k_tilde, double f, double h1);

/// Damped Gauss-Newton minimization of the track cost, started at
/// `warm_start` or at the rough position. Requires rough_position and k_refined.
SolveResult solve_position(const LedTrack& track, const EstimatorConfig& cfg,
                           std::optional<Vec2> warm_start = std::nullopt);

SolveResult solve_position(std::span<const Observation> observations, double k_tilde,
                           Vec2 initial, const EstimatorConfig& cfg);

/// Appends one observation and refreshes every derived quantity of the track.
/// Throws std::invalid_argument when the observation belongs to another LED.
void update(LedTrack& track, const Observation& obs, const EstimatorConfig& cfg);

/// One-shot processing of a complete observation set.
LedTrack process_batch(const LedKey& key, std::span<const Observation> observations,
                       const EstimatorConfig& cfg);

}  // namespace lumen
