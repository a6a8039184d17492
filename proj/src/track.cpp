#include <cmath>
#include <stdexcept>
#include <vector>

#include "lumen/estimator.hpp"
#include "lumen/pauta.hpp"

namespace lumen {

namespace {

// k samples depend on the rough position; refresh them all once it moves this far.
constexpr double kRoughShiftRefresh = 1e-3;

void recompute_k_samples(LedTrack& track, Vec2 basis, double eps) {
  track.k_samples.clear();
  for (const auto& obs : track.observations) {
    if (auto k = sample_k(obs, basis, eps)) {
      track.k_samples.push_back(*k);
    }
  }
  track.k_basis = basis;
}

void refresh_scale_and_height(LedTrack& track, const EstimatorConfig& cfg) {
  track.k_refined = refine_k(track, cfg);
  if (track.k_refined) {
    track.height = estimate_height(*track.k_refined, cfg.intrinsics.f, cfg.cam_height_h1);
  } else {
    track.height.reset();
  }
}

void resolve(LedTrack& track, const EstimatorConfig& cfg, std::optional<Vec2> warm) {
  if (track.observations.size() < cfg.min_obs_for_solve || !track.k_refined ||
      !track.rough_position) {
    return;
  }
  SolveResult r = solve_position(track, cfg, warm);
  if (r.status == SolveStatus::kNoUsableObservations) {
    return;
  }
  track.optimized_position = r.position;
  track.last_solve = std::move(r);
}

}  // namespace

void SolverConfig::validate() const {
  if (max_iterations < 1) {
    throw std::invalid_argument("solver max_iterations must be >= 1");
  }
  if (!(step_tolerance > 0.0) || !(cost_tolerance > 0.0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
  if (!(initial_damping > 0.0) || !std::isfinite(initial_damping)) {
    throw std::invalid_argument("solver initial_damping must be positive");
  }
  if (!(angle_weight >= 0.0) || !(distance_weight >= 0.0) ||
      !std::isfinite(angle_weight) || !std::isfinite(distance_weight)) {
    throw std::invalid_argument("solver weights must be finite and >= 0");
  }
}

void EstimatorConfig::validate() const {
  if (!(alt_threshold_tau > 0.0) || !std::isfinite(alt_threshold_tau)) {
    throw std::invalid_argument("alt_threshold_tau must be positive");
  }
  if (pauta_min_samples < 3) {
    throw std::invalid_argument("pauta_min_samples must be >= 3");
  }
  if (min_obs_for_solve < 1) {
    throw std::invalid_argument("min_obs_for_solve must be >= 1");
  }
  if (!(distance_epsilon > 0.0) || !std::isfinite(distance_epsilon)) {
    throw std::invalid_argument("distance_epsilon must be positive");
  }
  if (!(cam_height_h1 > 0.0) || !std::isfinite(cam_height_h1)) {
    throw std::invalid_argument("cam_height_h1 must be positive");
  }
  solver.validate();
  intrinsics.validate();
  cam1_to_cam2.validate();
}

std::optional<Vec2> accept_alternative(const Observation& obs, double tau) {
  if (obs.d_obs < tau) {
    return obs.cam2_pose_pre.position();
  }
  return std::nullopt;
}

std::optional<Vec2> rough_position(const LedTrack& track, const EstimatorConfig& cfg) {
  if (track.alt_positions.empty()) {
    return std::nullopt;
  }
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(track.alt_positions.size());
  ys.reserve(track.alt_positions.size());
  for (const auto& p : track.alt_positions) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  return Vec2{pauta_filter(xs, cfg.pauta_min_samples).mean,
              pauta_filter(ys, cfg.pauta_min_samples).mean};
}

std::optional<double> sample_k(const Observation& obs, Vec2 p_tilde, double eps) {
  const double planar = (obs.cam2_pose_pre.position() - p_tilde).norm();
  // A zero pixel offset away from the estimate carries no scale information.
  if (planar < eps || !(obs.d_obs > 0.0)) {
    return std::nullopt;
  }
  return obs.d_obs / planar;
}

std::optional<double> refine_k(const LedTrack& track, const EstimatorConfig& cfg) {
  if (track.k_samples.empty()) {
    return std::nullopt;
  }
  return pauta_filter(track.k_samples, cfg.pauta_min_samples).mean;
}

double estimate_height(double k_tilde, double f, double h1) {
  if (!(k_tilde > 0.0) || !std::isfinite(k_tilde)) {
    throw std::invalid_argument("estimate_height: scale must be positive");
  }
  return h1 + f / k_tilde;
}

void update(LedTrack& track, const Observation& obs, const EstimatorConfig& cfg) {
  if (obs.led_key != track.led_key) {
    throw std::invalid_argument("update: observation for '" + obs.led_key.value +
                                "' routed to track '" + track.led_key.value + "'");
  }
  track.observations.push_back(obs);
  if (auto alt = accept_alternative(obs, cfg.alt_threshold_tau)) {
    track.alt_positions.push_back(*alt);
  }
  track.rough_position = rough_position(track, cfg);
  if (!track.rough_position) {
    return;
  }

  const Vec2 rough = *track.rough_position;
  if (!track.k_basis || (rough - *track.k_basis).norm() > kRoughShiftRefresh) {
    recompute_k_samples(track, rough, cfg.distance_epsilon);
  } else if (auto k = sample_k(obs, *track.k_basis, cfg.distance_epsilon)) {
    track.k_samples.push_back(*k);
  }
  refresh_scale_and_height(track, cfg);
  resolve(track, cfg, track.optimized_position);
}

LedTrack process_batch(const LedKey& key, std::span<const Observation> observations,
                       const EstimatorConfig& cfg) {
  LedTrack track;
  track.led_key = key;
  for (const auto& obs : observations) {
    if (obs.led_key != key) {
      throw std::invalid_argument("process_batch: mixed LED keys");
    }
    track.observations.push_back(obs);
    if (auto alt = accept_alternative(obs, cfg.alt_threshold_tau)) {
      track.alt_positions.push_back(*alt);
    }
  }
  track.rough_position = rough_position(track, cfg);
  if (!track.rough_position) {
    return track;
  }
  recompute_k_samples(track, *track.rough_position, cfg.distance_epsilon);
  refresh_scale_and_height(track, cfg);
  resolve(track, cfg, std::nullopt);
  return track;
}

}  // namespace lumen
