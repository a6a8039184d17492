#include "lumen/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace lumen::sim {

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

std::vector<Vec2> lawnmower_vertices(const TrajectorySpec& spec) {
  const int lanes =
      static_cast<int>(std::floor(spec.height / spec.lane_spacing + 1e-9)) + 1;
  std::vector<Vec2> v;
  v.reserve(2 * static_cast<std::size_t>(lanes));
  for (int lane = 0; lane < lanes; ++lane) {
    const double y = lane * spec.lane_spacing;
    const bool forward = lane % 2 == 0;
    v.push_back({forward ? 0.0 : spec.width, y});
    v.push_back({forward ? spec.width : 0.0, y});
  }
  return v;
}

std::vector<TrajectorySample> resample_polyline(const std::vector<Vec2>& vertices,
                                                int count, double speed) {
  // Drop zero-length legs so every remaining segment has a direction.
  std::vector<Vec2> pts;
  for (const auto& p : vertices) {
    if (pts.empty() || !(p == pts.back())) {
      pts.push_back(p);
    }
  }
  std::vector<double> cumulative{0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    cumulative.push_back(cumulative.back() + (pts[i] - pts[i - 1]).norm());
  }
  const double total = cumulative.back();
  if (count > 1 && total <= 0.0) {
    throw std::invalid_argument(
        "trajectory has zero length but more than one sample was requested");
  }

  std::vector<TrajectorySample> out;
  out.reserve(static_cast<std::size_t>(count));
  std::size_t seg = 0;
  for (int i = 0; i < count; ++i) {
    const double s = count == 1 ? 0.0 : total * i / (count - 1);
    while (seg + 2 < pts.size() && s >= cumulative[seg + 1]) {
      ++seg;
    }
    TrajectorySample sample;
    sample.distance = s;
    sample.t = s / speed;
    if (pts.size() == 1) {
      sample.pose = PlanarPose{pts[0].x, pts[0].y, 0.0};
    } else {
      const Vec2 dir = pts[seg + 1] - pts[seg];
      const double len = dir.norm();
      const Vec2 p = pts[seg] + dir * ((s - cumulative[seg]) / len);
      sample.pose = PlanarPose{p.x, p.y, wrap_angle(std::atan2(dir.y, dir.x))};
    }
    out.push_back(sample);
  }
  // The world frame is the departure pose.
  out.front().pose = PlanarPose{0.0, 0.0, 0.0};
  return out;
}

std::vector<TrajectorySample> sample_circuit(const TrajectorySpec& spec) {
  std::vector<TrajectorySample> out;
  out.reserve(static_cast<std::size_t>(spec.sample_count));
  const double r = spec.radius;
  for (int i = 0; i < spec.sample_count; ++i) {
    const double psi = kTwoPi * i / spec.sample_count;
    TrajectorySample sample;
    sample.distance = r * psi;
    sample.t = sample.distance / spec.speed;
    sample.pose = PlanarPose{r * std::sin(psi), r - r * std::cos(psi),
                             i == 0 ? 0.0 : wrap_angle(psi)};
    out.push_back(sample);
  }
  return out;
}

}  // namespace

void TrajectorySpec::validate() const {
  if (sample_count < 1) {
    throw std::invalid_argument("trajectory sample_count must be >= 1");
  }
  if (!finite_positive(speed)) {
    throw std::invalid_argument("trajectory speed must be positive");
  }
  switch (kind) {
    case TrajectoryKind::kLawnmower:
      if (!finite_positive(width) || !finite_positive(lane_spacing) ||
          !std::isfinite(height) || height < 0.0) {
        throw std::invalid_argument(
            "lawnmower needs width > 0, lane_spacing > 0, height >= 0");
      }
      break;
    case TrajectoryKind::kCircuit:
      if (!finite_positive(radius)) {
        throw std::invalid_argument("circuit radius must be positive");
      }
      break;
    case TrajectoryKind::kWaypointList:
      if (waypoints.empty()) {
        throw std::invalid_argument("waypoint list is empty");
      }
      for (const auto& w : waypoints) {
        if (!std::isfinite(w.x) || !std::isfinite(w.y)) {
          throw std::invalid_argument("waypoint is not finite");
        }
      }
      if (!(waypoints.front() == Vec2{0.0, 0.0})) {
        throw std::invalid_argument(
            "first waypoint must be the departure origin (0, 0)");
      }
      break;
  }
}

void NoiseModel::validate() const {
  for (double s : {pixel_sigma, yaw_sigma, vo_position_sigma, vo_drift_rate}) {
    if (!std::isfinite(s) || s < 0.0) {
      throw std::invalid_argument("noise parameters must be finite and >= 0");
    }
  }
}

void ScenarioConfig::validate() const {
  trajectory.validate();
  noise.validate();
  intrinsics.validate();
  cam1_to_cam2.validate();
  if (!finite_positive(cam_height_h1)) {
    throw std::invalid_argument("cam_height_h1 must be positive");
  }
  if (!finite_positive(fov_max_pixel_radius)) {
    throw std::invalid_argument("fov_max_pixel_radius must be positive");
  }
  std::set<std::string> keys;
  for (const auto& led : leds) {
    if (!std::isfinite(led.x) || !std::isfinite(led.y) || !std::isfinite(led.h)) {
      throw std::invalid_argument("LED '" + led.led + "' has non-finite coordinates");
    }
    if (led.h <= cam_height_h1) {
      throw std::invalid_argument("LED '" + led.led +
                                  "' is not above the camera mount height");
    }
    if (!keys.insert(led.led).second) {
      throw std::invalid_argument("duplicate LED key '" + led.led + "'");
    }
  }
}

std::vector<TrajectorySample> generate_trajectory(const TrajectorySpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case TrajectoryKind::kLawnmower:
      return resample_polyline(lawnmower_vertices(spec), spec.sample_count,
                               spec.speed);
    case TrajectoryKind::kCircuit:
      return sample_circuit(spec);
    case TrajectoryKind::kWaypointList:
      return resample_polyline(spec.waypoints, spec.sample_count, spec.speed);
  }
  throw std::invalid_argument("unknown trajectory kind");
}

PixelPoint project_led(const PlanarPose& cam2_pose, double h1,
                       const GroundTruthLed& led,
                       const CameraIntrinsics& intrinsics) {
  intrinsics.validate();
  cam2_pose.validate();
  const double h2 = led.h - h1;
  if (!(h2 > 0.0)) {
    throw std::invalid_argument("LED height must exceed the camera height");
  }
  const double a = cam2_pose.x - led.x;
  const double b = cam2_pose.y - led.y;
  const double planar = std::hypot(a, b);
  if (planar == 0.0) {
    return {intrinsics.c_x, intrinsics.c_y};
  }
  // Similar triangles: d / D = f / H2.
  const double d = intrinsics.f * planar / h2;
  const double alpha = wrap_angle(bearing(a, b) + cam2_pose.theta);
  return {intrinsics.c_x + d * std::sin(alpha), intrinsics.c_y + d * std::cos(alpha)};
}

SimulationResult synthesize_log(const ScenarioConfig& cfg) {
  cfg.validate();

  SimulationResult result;
  result.truth = cfg.leds;

  std::mt19937_64 rng(cfg.noise.seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit_angle(-kPi, kPi);
  // Drawn unconditionally so the stream layout does not depend on the rate.
  const double drift_heading = unit_angle(rng);
  const Vec2 drift_dir{std::cos(drift_heading), std::sin(drift_heading)};

  const auto& noise = cfg.noise;
  const auto samples = generate_trajectory(cfg.trajectory);
  for (const auto& sample : samples) {
    const PlanarPose cam2_true = apply_fixed_transform(sample.pose, cfg.cam1_to_cam2);

    const double vo_nx = noise.vo_position_sigma * unit_normal(rng);
    const double vo_ny = noise.vo_position_sigma * unit_normal(rng);
    const double yaw_n = noise.yaw_sigma * unit_normal(rng);
    const Vec2 drift = drift_dir * (noise.vo_drift_rate * sample.distance);
    const PlanarPose vo_pose{sample.pose.x + vo_nx + drift.x,
                             sample.pose.y + vo_ny + drift.y, sample.pose.theta};
    const double yaw = wrap_angle(cam2_true.theta + yaw_n);

    for (const auto& led : cfg.leds) {
      const PixelPoint px = project_led(cam2_true, cfg.cam_height_h1, led, cfg.intrinsics);
      const double radius =
          std::hypot(px.u - cfg.intrinsics.c_x, px.v - cfg.intrinsics.c_y);
      if (radius > cfg.fov_max_pixel_radius) {
        continue;
      }
      ObservationRecord rec;
      rec.t = sample.t;
      rec.led = led.led;
      rec.u = px.u + noise.pixel_sigma * unit_normal(rng);
      rec.v = px.v + noise.pixel_sigma * unit_normal(rng);
      rec.yaw = yaw;
      rec.x = vo_pose.x;
      rec.y = vo_pose.y;
      rec.theta = vo_pose.theta;
      result.records.push_back(std::move(rec));
    }
  }

  if (result.records.empty()) {
    result.warning = samples.empty()
                         ? "trajectory produced no poses"
                         : "no LED came within the field of view; log is empty";
  }
  return result;
}

ScenarioConfig default_scenario() {
  ScenarioConfig cfg;
  // 4 m lanes, 1 m apart, 19 m of path sampled every 0.1 m.
  cfg.trajectory.kind = TrajectoryKind::kLawnmower;
  cfg.trajectory.width = 4.0;
  cfg.trajectory.height = 3.0;
  cfg.trajectory.lane_spacing = 1.0;
  cfg.trajectory.sample_count = 191;
  cfg.trajectory.speed = 0.2;
  cfg.intrinsics = CameraIntrinsics{640.0, 480.0, 600.0};
  cfg.cam_height_h1 = 0.4;
  // Cam2 rides 0.1 m ahead of Cam1, one sample spacing.
  cfg.cam1_to_cam2 = FixedTransform2D{0.1, 0.0, 0.0};
  cfg.fov_max_pixel_radius = 560.0;
  cfg.leds = {
      {"led-a", 1.0, 0.0, 2.3},
      {"led-b", 3.0, 1.0, 2.5},
      {"led-c", 1.5, 2.0, 2.7},
      {"led-d", 2.5, 3.0, 2.4},
  };
  cfg.noise = NoiseModel{};
  return cfg;
}

}  // namespace lumen::sim
