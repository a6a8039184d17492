#include "lumen/geometry.hpp"

namespace lumen {

namespace {

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

}  // namespace

void CameraIntrinsics::validate() const {
  require_finite(c_x, "c_x");
  require_finite(c_y, "c_y");
  require_finite(f, "f");
  if (f <= 0.0) {
    throw std::invalid_argument("focal length must be positive");
  }
}

void PlanarPose::validate() const {
  require_finite(x, "pose x");
  require_finite(y, "pose y");
  require_finite(theta, "pose theta");
}

void FixedTransform2D::validate() const {
  require_finite(dx, "transform dx");
  require_finite(dy, "transform dy");
  require_finite(dtheta, "transform dtheta");
}

double wrap_angle(double a) {
  require_finite(a, "angle");
  // remainder() lands in [-pi, pi]; fold the closed lower end over.
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) {
    r += kTwoPi;
  }
  return r;
}

double bearing(double du, double dv) {
  if (du == 0.0 && dv == 0.0) {
    throw UndefinedBearing();
  }
  // atan2 may return -pi for a negative-zero sine component.
  return wrap_angle(std::atan2(du, dv));
}

Observation make_observation(const PixelPoint& pixel, double yaw,
                             const CameraIntrinsics& intrinsics,
                             const PlanarPose& cam2_pose_pre, LedKey led_key,
                             double timestamp) {
  intrinsics.validate();
  require_finite(pixel.u, "pixel u");
  require_finite(pixel.v, "pixel v");
  require_finite(yaw, "yaw");
  cam2_pose_pre.validate();

  Observation obs;
  obs.led_key = std::move(led_key);
  obs.pixel = pixel;
  obs.yaw = yaw;
  obs.cam2_pose_pre = cam2_pose_pre;
  obs.timestamp = timestamp;

  const double du = pixel.u - intrinsics.c_x;
  const double dv = pixel.v - intrinsics.c_y;
  obs.d_obs = std::hypot(du, dv);
  if (obs.d_obs == 0.0) {
    obs.phi_obs = 0.0;
    obs.bearing_defined = false;
  } else {
    obs.phi_obs = wrap_angle(bearing(du, dv) - yaw);
    obs.bearing_defined = true;
  }
  return obs;
}

PlanarPose apply_fixed_transform(const PlanarPose& cam1_pose,
                                 const FixedTransform2D& t) {
  cam1_pose.validate();
  t.validate();
  const double c = std::cos(cam1_pose.theta);
  const double s = std::sin(cam1_pose.theta);
  return PlanarPose{cam1_pose.x + c * t.dx - s * t.dy,
                    cam1_pose.y + s * t.dx + c * t.dy,
                    wrap_angle(cam1_pose.theta + t.dtheta)};
}

}  // namespace lumen
