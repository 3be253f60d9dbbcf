#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ablate {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Error hierarchy. The CLI maps these onto its exit codes; library code throws
// and never exits.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent inputs (bad config values, mismatched point sets,
// non-finite coordinates).
struct InvalidInput : Error {
  using Error::Error;
};

// Geometric configuration where a derivative is undefined (e.g. the surface
// point coincides with the incident center).
struct SingularConfig : Error {
  using Error::Error;
};

// Occupancy grid with no inside or no outside voxels; no boundary exists.
struct DegenerateBoundary : Error {
  using Error::Error;
};

// Too few usable samples to fit the beam model.
struct InsufficientData : Error {
  using Error::Error;
};

// Fit samples span no usable range (all projected distances identical).
struct RankDeficient : Error {
  using Error::Error;
};

inline double deg2rad(double deg) { return deg * (std::numbers::pi / 180.0); }
inline double rad2deg(double rad) { return rad * (180.0 / std::numbers::pi); }

// Rotation angles about the frame axes, radians. Degrees appear only at file
// and CLI boundaries.
struct Angles {
  double x{0.0}, y{0.0}, z{0.0};

  static Angles from_vec(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
  static Angles from_degrees(double dx, double dy, double dz) {
    return {deg2rad(dx), deg2rad(dy), deg2rad(dz)};
  }
  Vec3 vec() const { return {x, y, z}; }
  Vec3 degrees() const { return {rad2deg(x), rad2deg(y), rad2deg(z)}; }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

// Component-wise box constraint on Angles.
struct AngleBounds {
  Angles lo{-deg2rad(30.0), -deg2rad(30.0), -deg2rad(30.0)};
  Angles hi{deg2rad(30.0), deg2rad(30.0), deg2rad(30.0)};

  bool contains(const Angles& a) const {
    return a.x >= lo.x && a.x <= hi.x && a.y >= lo.y && a.y <= hi.y &&
           a.z >= lo.z && a.z <= hi.z;
  }
  void validate() const {
    if (!lo.finite() || !hi.finite())
      throw InvalidInput("angle bounds must be finite");
    if (lo.x > hi.x || lo.y > hi.y || lo.z > hi.z)
      throw InvalidInput("angle bounds must satisfy lo <= hi");
  }
};

}  // namespace ablate
