#pragma once

#include <cmath>
#include <compare>
#include <stdexcept>
#include <string>

namespace lumen {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Opaque identifier grouping observations of one LED. Only equality and
/// ordering are meaningful; the content is never interpreted.
struct LedKey {
  std::string value;

  LedKey() = default;
  explicit LedKey(std::string v) : value(std::move(v)) {}

  auto operator<=>(const LedKey&) const = default;
  bool operator==(const LedKey&) const = default;
};

/// Planar vector in meters.
struct Vec2 {
  double x{0.0};
  double y{0.0};

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
};

struct CameraIntrinsics {
  double c_x{0.0};  // principal point, pixels
  double c_y{0.0};
  double f{1.0};    // focal length, pixels

  bool operator==(const CameraIntrinsics&) const = default;
  void validate() const;
};

struct PixelPoint {
  double u{0.0};
  double v{0.0};

  bool operator==(const PixelPoint&) const = default;
};

/// Planar pose; theta in (-pi, pi].
struct PlanarPose {
  double x{0.0};
  double y{0.0};
  double theta{0.0};

  Vec2 position() const { return {x, y}; }
  bool operator==(const PlanarPose&) const = default;
  void validate() const;
};

/// Rigid planar offset of the upward camera (Cam2) expressed in the frame of
/// the pose-providing camera (Cam1).
struct FixedTransform2D {
  double dx{0.0};
  double dy{0.0};
  double dtheta{0.0};

  bool operator==(const FixedTransform2D&) const = default;
  void validate() const;
};

/// One sensor sample. Build through make_observation() so that d_obs and
/// phi_obs stay consistent with the pixel, yaw and intrinsics.
struct Observation {
  LedKey led_key;
  PixelPoint pixel;
  double yaw{0.0};
  PlanarPose cam2_pose_pre;
  double d_obs{0.0};
  double phi_obs{0.0};
  double timestamp{0.0};
  // False when the ROI sits exactly on the principal point.
  bool bearing_defined{true};
};

class UndefinedBearing : public std::domain_error {
 public:
  UndefinedBearing() : std::domain_error("bearing undefined for a zero vector") {}
};

/// Wraps an angle into (-pi, pi]. Throws std::invalid_argument on non-finite input.
double wrap_angle(double a);

/// Two-argument arctangent with the first argument as the sine component and
/// the second as the cosine component: du = r sin(a), dv = r cos(a).
/// Throws UndefinedBearing when both are zero.
double bearing(double du, double dv);

Observation make_observation(const PixelPoint& pixel, double yaw,
                             const CameraIntrinsics& intrinsics,
                             const PlanarPose& cam2_pose_pre, LedKey led_key,
                             double timestamp);

PlanarPose apply_fixed_transform(const PlanarPose& cam1_pose,
                                 const FixedTransform2D& t);

}  // namespace lumen
