// Independent reference implementations the unit suites compare against. Each
// oracle takes a different computational route than the library code: rotations
// via angle-axis composition, projected distance via the cross product, the
// distance transform by exhaustive search, the Sobel filter by direct kernel
// convolution.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "ablate/field.hpp"
#include "ablate/geometry.hpp"

namespace testutil {

using ablate::Angles;
using ablate::Mat3;
using ablate::Vec3;

inline Mat3 rotation_oracle(const Angles& a) {
  return (Eigen::AngleAxisd(a.x, Vec3::UnitX()) *
          Eigen::AngleAxisd(a.y, Vec3::UnitY()) *
          Eigen::AngleAxisd(a.z, Vec3::UnitZ()))
      .toRotationMatrix();
}

// Distance from q to the line through p0 with unit direction u.
inline double point_line_distance(const Vec3& q, const Vec3& p0, const Vec3& u) {
  return (q - p0).cross(u).norm() / u.norm();
}

template <typename F>
Vec3 fd_grad(F f, const Vec3& x, double h) {
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = h;
    g[i] = (f(x + e) - f(x - e)) / (2.0 * h);
  }
  return g;
}

template <typename F>
Mat3 fd_jac(F f, const Vec3& x, double h) {
  Mat3 j;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = h;
    j.col(i) = (f(x + e) - f(x - e)) / (2.0 * h);
  }
  return j;
}

// Exhaustive signed distance transform: for every voxel scan all voxels of the
// opposite class. Same integer squared-distance arithmetic and the same final
// expression as the library, so agreement must be exact.
inline ablate::ScalarField3 brute_signed_edt(const ablate::Occupancy& occ) {
  const auto& spec = occ.spec;
  ablate::ScalarField3 out;
  out.spec = spec;
  out.values.assign(spec.voxel_count(), 0.0);
  const int nx = spec.dims[0], ny = spec.dims[1], nz = spec.dims[2];
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const bool in = occ.inside[spec.index(i, j, k)] != 0;
        std::int64_t best = std::numeric_limits<std::int64_t>::max();
        for (int kk = 0; kk < nz; ++kk)
          for (int jj = 0; jj < ny; ++jj)
            for (int ii = 0; ii < nx; ++ii) {
              if ((occ.inside[spec.index(ii, jj, kk)] != 0) == in) continue;
              const std::int64_t dx = ii - i, dy = jj - j, dz = kk - k;
              best = std::min(best, dx * dx + dy * dy + dz * dz);
            }
        const double d = spec.spacing * std::sqrt(static_cast<double>(best));
        out.values[spec.index(i, j, k)] = in ? d : -d;
      }
  return out;
}

// Direct 27-point convolution with explicitly tabulated kernels, accumulated
// kernel-index-first (the library loops neighbor offsets and accumulates the
// smooth/difference factors instead).
inline ablate::VectorField3 sobel_oracle(const ablate::ScalarField3& f) {
  const auto& spec = f.spec;
  ablate::VectorField3 out;
  out.spec = spec;
  out.values.assign(spec.voxel_count(), Vec3::Zero());
  const double w1[3] = {1.0, 2.0, 1.0};
  const double wd[3] = {-1.0, 0.0, 1.0};
  double kx[3][3][3], ky[3][3][3], kz[3][3][3];
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        kx[a][b][c] = wd[a] * w1[b] * w1[c];
        ky[a][b][c] = w1[a] * wd[b] * w1[c];
        kz[a][b][c] = w1[a] * w1[b] * wd[c];
      }
  const auto clampi = [](int v, int n) { return v < 0 ? 0 : (v >= n ? n - 1 : v); };
  const double scale = 1.0 / (32.0 * spec.spacing);
  for (int k = 0; k < spec.dims[2]; ++k)
    for (int j = 0; j < spec.dims[1]; ++j)
      for (int i = 0; i < spec.dims[0]; ++i) {
        Vec3 g = Vec3::Zero();
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) {
              const double val = f.at(clampi(i + a - 1, spec.dims[0]),
                                      clampi(j + b - 1, spec.dims[1]),
                                      clampi(k + c - 1, spec.dims[2]));
              g.x() += kx[a][b][c] * val;
              g.y() += ky[a][b][c] * val;
              g.z() += kz[a][b][c] * val;
            }
        out.values[spec.index(i, j, k)] = g * scale;
      }
  return out;
}

// Linear field phi = slope . p + offset on the given grid, with its exact
// gradient; trilinear sampling and interior Sobel values are exact on it.
inline ablate::ScalarField3 ramp_field(const ablate::GridSpec& spec,
                                       const Vec3& slope, double offset) {
  ablate::ScalarField3 f;
  f.spec = spec;
  f.values.resize(spec.voxel_count());
  for (int k = 0; k < spec.dims[2]; ++k)
    for (int j = 0; j < spec.dims[1]; ++j)
      for (int i = 0; i < spec.dims[0]; ++i)
        f.values[spec.index(i, j, k)] = slope.dot(spec.position(i, j, k)) + offset;
  return f;
}

inline ablate::VectorField3 const_vector_field(const ablate::GridSpec& spec,
                                               const Vec3& value) {
  ablate::VectorField3 f;
  f.spec = spec;
  f.values.assign(spec.voxel_count(), value);
  return f;
}

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uni(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng);
  }
  Vec3 vec(double lo, double hi) {
    return {uni(lo, hi), uni(lo, hi), uni(lo, hi)};
  }
  Angles angles(double lo, double hi) {
    return {uni(lo, hi), uni(lo, hi), uni(lo, hi)};
  }
  double gauss(double sigma) {
    return std::normal_distribution<double>(0.0, sigma)(eng);
  }
  Vec3 unit() {
    for (;;) {
      const Vec3 v = vec(-1.0, 1.0);
      const double n = v.norm();
      if (n > 1e-3) return v / n;
    }
  }
};

}  // namespace testutil
