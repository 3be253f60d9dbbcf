#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "ablate/common.hpp"

namespace ablate {

// Axis-aligned voxel grid with cubic voxels. `origin` is the world position of
// the center of voxel (0,0,0); voxel (i,j,k) is centered at
// origin + spacing * (i,j,k). Linear storage is x-fastest:
// index = i + dims[0] * (j + dims[1] * k).
struct GridSpec {
  Vec3 origin{0.0, 0.0, 0.0};
  double spacing{1.0};
  std::array<int, 3> dims{64, 64, 64};

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1]) * k);
  }
  Vec3 position(int i, int j, int k) const {
    return origin + spacing * Vec3(i, j, k);
  }
  void validate() const;
};

struct ScalarField3 {
  GridSpec spec;
  std::vector<double> values;  // x-fastest, one per voxel

  double at(int i, int j, int k) const { return values[spec.index(i, j, k)]; }
  void validate() const;
};

struct VectorField3 {
  GridSpec spec;
  std::vector<Vec3> values;  // x-fastest, one per voxel

  const Vec3& at(int i, int j, int k) const { return values[spec.index(i, j, k)]; }
  void validate() const;
};

// Inside/outside voxel classification of the target region.
struct Occupancy {
  GridSpec spec;
  std::vector<std::uint8_t> inside;  // x-fastest, 1 = inside target region

  std::size_t inside_count() const;
};

// Designed cavity boundary: the target region is above the Gaussian dip,
// inside iff z - apex.z > -amplitude * exp(-((x-apex.x)^2+(y-apex.y)^2) /
// (2 sigma^2)). `apex` carries the dip axis in x/y and the rim level in z.
struct GaussianBowl {
  Vec3 apex{0.0, 0.0, 0.0};
  double amplitude{2.0};
  double sigma{1.0};

  bool inside(const Vec3& p) const {
    const double dx = p.x() - apex.x(), dy = p.y() - apex.y();
    return p.z() - apex.z() >
           -amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
  }
};

// Half-space target region: inside iff normal . p < offset.
struct HalfSpace {
  Vec3 normal{0.0, 0.0, 1.0};
  double offset{0.0};

  bool inside(const Vec3& p) const { return normal.dot(p) < offset; }
};

// Classifies every voxel center with `inside`. Throws DegenerateBoundary when
// all voxels land on one side (no boundary in the grid).
Occupancy occupancy_from_boundary(const GridSpec& spec,
                                  const std::function<bool(const Vec3&)>& inside);

// Signed Euclidean distance field on voxel centers: for inside voxels the
// distance to the nearest outside voxel center (positive), for outside voxels
// minus the distance to the nearest inside voxel center. Exact (Felzenszwalb
// separable squared-distance transform in integer voxel units).
ScalarField3 signed_edt(const Occupancy& occ);

// 3D Sobel gradient of a scalar field: per axis, the [-1,0,1] difference along
// the axis smoothed by [1,2,1] x [1,2,1] across it, normalized by 32 * spacing
// so a linear ramp reproduces its gradient exactly at interior voxels. Edges
// use replicated border values.
VectorField3 sobel_gradient(const ScalarField3& field);

// Trilinear interpolation on voxel centers. Queries outside the center lattice
// are clamped onto it; `clamped`, if non-null, is set accordingly.
double sample_scalar(const ScalarField3& field, const Vec3& p, bool* clamped = nullptr);
Vec3 sample_vector(const VectorField3& field, const Vec3& p, bool* clamped = nullptr);

// Obstacle cost parameters: margin epsilon (mm) of the penalized band inside
// the target region.
struct CostParams {
  double epsilon{0.6};

  void validate() const;
};

// Piecewise obstacle cost of a signed distance phi:
//   phi <= 0:          -phi + epsilon/2
//   0 < phi <= epsilon: (phi - epsilon)^2 / (2 epsilon)
//   phi > epsilon:      0
// C1 at epsilon, C0 at 0 with matching one-sided value.
double obstacle_cost(double phi, const CostParams& cost);

// dC/dphi; at the branch points the left-limit value is used (-1 at 0, 0 at
// epsilon). Non-positive everywhere.
double obstacle_cost_grad(double phi, const CostParams& cost);

}  // namespace ablate
