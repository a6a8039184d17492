#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lumen/geometry.hpp"
#include "lumen/records.hpp"

namespace lumen::sim {

enum class TrajectoryKind { kLawnmower, kCircuit, kWaypointList };

/// Robot (Cam1) path description. The path always departs from the world
/// origin and is resampled at sample_count points equally spaced in arc length.
struct TrajectorySpec {
  TrajectoryKind kind{TrajectoryKind::kLawnmower};
  // lawnmower: lanes along +x/-x of length `width`, stacked along +y every
  // `lane_spacing` while they fit inside `height`.
  double width{4.0};
  double height{3.0};
  double lane_spacing{1.0};
  // circuit: circle of `radius` through the origin, centered at (0, radius).
  double radius{1.0};
  // waypoint-list: polyline; the first waypoint must be the origin.
  std::vector<Vec2> waypoints;
  int sample_count{100};
  double speed{0.2};  // m/s, sets timestamps

  bool operator==(const TrajectorySpec&) const = default;
  void validate() const;
};

struct NoiseModel {
  double pixel_sigma{0.0};
  double yaw_sigma{0.0};
  double vo_position_sigma{0.0};
  double vo_drift_rate{0.0};  // meters of drift per meter traveled
  std::uint64_t seed{0};

  bool operator==(const NoiseModel&) const = default;
  void validate() const;
};

struct ScenarioConfig {
  std::vector<GroundTruthLed> leds;
  TrajectorySpec trajectory;
  NoiseModel noise;
  CameraIntrinsics intrinsics{640.0, 480.0, 600.0};
  double cam_height_h1{0.4};
  FixedTransform2D cam1_to_cam2;
  double fov_max_pixel_radius{480.0};

  bool operator==(const ScenarioConfig&) const = default;
  void validate() const;
};

struct TrajectorySample {
  double t{0.0};         // seconds since departure
  double distance{0.0};  // arc length traveled, meters
  PlanarPose pose;       // Cam1 pose
};

/// Throws std::invalid_argument for invalid or unreachable geometry.
std::vector<TrajectorySample> generate_trajectory(const TrajectorySpec& spec);

/// Exact forward model of the upward camera. Throws std::invalid_argument when
/// the LED is not above the camera.
PixelPoint project_led(const PlanarPose& cam2_pose, double h1,
                       const GroundTruthLed& led,
                       const CameraIntrinsics& intrinsics);

struct SimulationResult {
  std::vector<ObservationRecord> records;
  std::vector<GroundTruthLed> truth;
  // Set when the log came out empty (no poses or no LED ever in view).
  std::optional<std::string> warning;
};

/// Deterministic for a given config (including the noise seed).
SimulationResult synthesize_log(const ScenarioConfig& cfg);

/// Four-LED lawnmower scenario used by the CLI defaults and the test suites.
/// LEDs sit on Cam2 sample points of straight lanes.
ScenarioConfig default_scenario();

}  // namespace lumen::sim
