#pragma once

#include <string>

namespace lumen {

/// Wire form of one sensor sample: ROI center, odometer yaw and the VO pose of
/// the pose-providing camera. Field names match the log format
/// (`t, led, u, v, yaw, x, y, theta`).
struct ObservationRecord {
  double t{0.0};
  std::string led;
  double u{0.0};
  double v{0.0};
  double yaw{0.0};
  double x{0.0};
  double y{0.0};
  double theta{0.0};

  bool operator==(const ObservationRecord&) const = default;
};

/// Surveyed LED position; h is the absolute height above the floor.
struct GroundTruthLed {
  std::string led;
  double x{0.0};
  double y{0.0};
  double h{0.0};

  bool operator==(const GroundTruthLed&) const = default;
};

}  // namespace lumen
