#include "pcrast/core.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pcrast {

void Camera::validate() const {
  if (width < 1 || height < 1) throw std::invalid_argument("camera: image size must be at least 1x1");
  if (!(fov_y_deg > 0.0) || !(fov_y_deg < 180.0))
    throw std::invalid_argument("camera: fov_y must be in (0, 180) degrees");
  if (!eye.allFinite() || !target.allFinite() || !up.allFinite())
    throw std::invalid_argument("camera: eye/target/up must be finite");
  const Eigen::Vector3d gaze = target - eye;
  if (gaze.squaredNorm() == 0.0) throw std::invalid_argument("camera: target must differ from eye");
  if (gaze.cross(up).squaredNorm() == 0.0)
    throw std::invalid_argument("camera: view direction must not be parallel to up");
  if (!(near_clip > 0.0) || !(near_clip < far_clip))
    throw std::invalid_argument("camera: clip planes require 0 < near < far");
}

Projector::Projector(const Camera& camera) {
  camera.validate();
  eye_ = camera.eye;
  forward_ = (camera.target - camera.eye).normalized();
  right_ = forward_.cross(camera.up).normalized();
  up_ = right_.cross(forward_);
  const double tan_half = std::tan(0.5 * camera.fov_y_deg * std::numbers::pi / 180.0);
  const double aspect = double(camera.width) / double(camera.height);
  ndc_scale_x_ = tan_half * aspect;
  ndc_scale_y_ = tan_half;
  width_ = double(camera.width);
  height_ = double(camera.height);
}

std::optional<ProjectedPoint> Projector::operator()(const Eigen::Vector3d& p) const {
  const Eigen::Vector3d rel = p - eye_;
  const double depth = forward_.dot(rel);
  if (!(depth > 0.0)) return std::nullopt;
  const double ndc_x = right_.dot(rel) / (depth * ndc_scale_x_);
  const double ndc_y = up_.dot(rel) / (depth * ndc_scale_y_);
  const double px = std::floor((ndc_x * 0.5 + 0.5) * width_);
  const double py = std::floor((0.5 - ndc_y * 0.5) * height_);
  if (!(px >= 0.0) || px >= width_ || !(py >= 0.0) || py >= height_) return std::nullopt;
  return ProjectedPoint{int(px), int(py), depth};
}

std::optional<ProjectedPoint> project(const Camera& camera, const Point& point) {
  return Projector(camera)(point.position);
}

}  // namespace pcrast
