#include "ablate/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ablate {

void GridSpec::validate() const {
  if (!origin.allFinite() || !std::isfinite(spacing))
    throw InvalidInput("grid spec must be finite");
  if (!(spacing > 0.0)) throw InvalidInput("grid spacing must be positive");
  for (int d : dims)
    if (d < 2) throw InvalidInput("grid dims must be >= 2 per axis");
}

void ScalarField3::validate() const {
  spec.validate();
  if (values.size() != spec.voxel_count())
    throw InvalidInput("scalar field size does not match grid");
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidInput("scalar field contains non-finite value");
}

void VectorField3::validate() const {
  spec.validate();
  if (values.size() != spec.voxel_count())
    throw InvalidInput("vector field size does not match grid");
  for (const Vec3& v : values)
    if (!v.allFinite()) throw InvalidInput("vector field contains non-finite value");
}

std::size_t Occupancy::inside_count() const {
  return static_cast<std::size_t>(
      std::count(inside.begin(), inside.end(), std::uint8_t{1}));
}

Occupancy occupancy_from_boundary(const GridSpec& spec,
                                  const std::function<bool(const Vec3&)>& inside) {
  spec.validate();
  if (!inside) throw InvalidInput("boundary classifier must be callable");
  Occupancy occ;
  occ.spec = spec;
  occ.inside.resize(spec.voxel_count());
  for (int k = 0; k < spec.dims[2]; ++k)
    for (int j = 0; j < spec.dims[1]; ++j)
      for (int i = 0; i < spec.dims[0]; ++i)
        occ.inside[spec.index(i, j, k)] = inside(spec.position(i, j, k)) ? 1 : 0;
  const std::size_t n_in = occ.inside_count();
  if (n_in == 0 || n_in == occ.inside.size())
    throw DegenerateBoundary("boundary does not intersect the grid");
  return occ;
}

namespace {

constexpr std::int64_t kFar = std::numeric_limits<std::int64_t>::max() / 4;

// 1D squared-distance transform: d[q] = min_p ((q-p)^2 + f[p]), the lower
// envelope of parabolas. Costs stay in integer voxel units so the final
// distances are exact.
void dt1d(const std::int64_t* f, int n, std::int64_t* d, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = 0.0;
    while (true) {
      const int p = v[k];
      s = (static_cast<double>(f[q] - f[p]) +
           (static_cast<double>(q) * q - static_cast<double>(p) * p)) /
          (2.0 * (q - p));
      if (s <= z[k] && k > 0) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const std::int64_t dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

// Separable squared EDT to the voxel set marked by `feature`.
std::vector<std::int64_t> edt_sq(const GridSpec& spec,
                                 const std::vector<std::uint8_t>& feature) {
  const int nx = spec.dims[0], ny = spec.dims[1], nz = spec.dims[2];
  const int nmax = std::max({nx, ny, nz});
  std::vector<std::int64_t> d(spec.voxel_count());
  std::vector<std::int64_t> fline(nmax), dline(nmax);
  std::vector<int> vbuf(nmax);
  std::vector<double> zbuf(nmax + 1);

  for (std::size_t idx = 0; idx < d.size(); ++idx)
    d[idx] = feature[idx] ? 0 : kFar;

  // x pass
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j) {
      std::int64_t* row = d.data() + spec.index(0, j, k);
      dt1d(row, nx, dline.data(), vbuf.data(), zbuf.data());
      std::copy_n(dline.data(), nx, row);
    }
  // y pass
  for (int k = 0; k < nz; ++k)
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) fline[j] = d[spec.index(i, j, k)];
      dt1d(fline.data(), ny, dline.data(), vbuf.data(), zbuf.data());
      for (int j = 0; j < ny; ++j) d[spec.index(i, j, k)] = dline[j];
    }
  // z pass
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      for (int k = 0; k < nz; ++k) fline[k] = d[spec.index(i, j, k)];
      dt1d(fline.data(), nz, dline.data(), vbuf.data(), zbuf.data());
      for (int k = 0; k < nz; ++k) d[spec.index(i, j, k)] = dline[k];
    }
  return d;
}

}  // namespace

ScalarField3 signed_edt(const Occupancy& occ) {
  occ.spec.validate();
  if (occ.inside.size() != occ.spec.voxel_count())
    throw InvalidInput("occupancy size does not match grid");
  const std::size_t n_in = occ.inside_count();
  if (n_in == 0 || n_in == occ.inside.size())
    throw DegenerateBoundary("occupancy has no boundary");

  std::vector<std::uint8_t> outside(occ.inside.size());
  for (std::size_t i = 0; i < outside.size(); ++i) outside[i] = occ.inside[i] ? 0 : 1;
  const std::vector<std::int64_t> to_outside = edt_sq(occ.spec, outside);
  const std::vector<std::int64_t> to_inside = edt_sq(occ.spec, occ.inside);

  ScalarField3 field;
  field.spec = occ.spec;
  field.values.resize(occ.inside.size());
  const double h = occ.spec.spacing;
  for (std::size_t i = 0; i < field.values.size(); ++i)
    field.values[i] = occ.inside[i]
                          ? h * std::sqrt(static_cast<double>(to_outside[i]))
                          : -h * std::sqrt(static_cast<double>(to_inside[i]));
  return field;
}

VectorField3 sobel_gradient(const ScalarField3& field) {
  field.validate();
  const int nx = field.spec.dims[0], ny = field.spec.dims[1], nz = field.spec.dims[2];
  static constexpr double smooth[3] = {1.0, 2.0, 1.0};
  static constexpr double diff[3] = {-1.0, 0.0, 1.0};
  const double norm = 1.0 / (32.0 * field.spec.spacing);

  VectorField3 out;
  out.spec = field.spec;
  out.values.resize(field.values.size());
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        double gx = 0.0, gy = 0.0, gz = 0.0;
        for (int dk = -1; dk <= 1; ++dk) {
          const int kk = std::clamp(k + dk, 0, nz - 1);
          for (int dj = -1; dj <= 1; ++dj) {
            const int jj = std::clamp(j + dj, 0, ny - 1);
            for (int di = -1; di <= 1; ++di) {
              const int ii = std::clamp(i + di, 0, nx - 1);
              const double val = field.at(ii, jj, kk);
              gx += val * diff[di + 1] * smooth[dj + 1] * smooth[dk + 1];
              gy += val * smooth[di + 1] * diff[dj + 1] * smooth[dk + 1];
              gz += val * smooth[di + 1] * smooth[dj + 1] * diff[dk + 1];
            }
          }
        }
        out.values[field.spec.index(i, j, k)] = Vec3(gx, gy, gz) * norm;
      }
  return out;
}

namespace {

struct CellCoord {
  int i0, j0, k0;
  double fx, fy, fz;
  bool clamped;
};

CellCoord locate(const GridSpec& spec, const Vec3& p) {
  if (!p.allFinite()) throw InvalidInput("sample point must be finite");
  double u[3];
  bool cl = false;
  for (int ax = 0; ax < 3; ++ax) {
    u[ax] = (p[ax] - spec.origin[ax]) / spec.spacing;
    const double umax = static_cast<double>(spec.dims[ax] - 1);
    if (u[ax] < 0.0) {
      u[ax] = 0.0;
      cl = true;
    } else if (u[ax] > umax) {
      u[ax] = umax;
      cl = true;
    }
  }
  CellCoord c;
  c.i0 = std::min(static_cast<int>(u[0]), spec.dims[0] - 2);
  c.j0 = std::min(static_cast<int>(u[1]), spec.dims[1] - 2);
  c.k0 = std::min(static_cast<int>(u[2]), spec.dims[2] - 2);
  c.fx = u[0] - c.i0;
  c.fy = u[1] - c.j0;
  c.fz = u[2] - c.k0;
  c.clamped = cl;
  return c;
}

template <typename Field, typename Value>
Value trilinear(const Field& field, const Vec3& p, bool* clamped) {
  const CellCoord c = locate(field.spec, p);
  if (clamped) *clamped = c.clamped;
  const double wx[2] = {1.0 - c.fx, c.fx};
  const double wy[2] = {1.0 - c.fy, c.fy};
  const double wz[2] = {1.0 - c.fz, c.fz};
  Value acc = Value(field.at(c.i0, c.j0, c.k0)) * (wx[0] * wy[0] * wz[0]);
  for (int dk = 0; dk < 2; ++dk)
    for (int dj = 0; dj < 2; ++dj)
      for (int di = 0; di < 2; ++di) {
        if (di == 0 && dj == 0 && dk == 0) continue;
        acc += Value(field.at(c.i0 + di, c.j0 + dj, c.k0 + dk)) *
               (wx[di] * wy[dj] * wz[dk]);
      }
  return acc;
}

}  // namespace

double sample_scalar(const ScalarField3& field, const Vec3& p, bool* clamped) {
  return trilinear<ScalarField3, double>(field, p, clamped);
}

Vec3 sample_vector(const VectorField3& field, const Vec3& p, bool* clamped) {
  return trilinear<VectorField3, Vec3>(field, p, clamped);
}

void CostParams::validate() const {
  if (!(std::isfinite(epsilon) && epsilon > 0.0))
    throw InvalidInput("cost epsilon must be positive");
}

double obstacle_cost(double phi, const CostParams& cost) {
  if (!std::isfinite(phi)) throw InvalidInput("cost input must be finite");
  if (phi <= 0.0) return -phi + 0.5 * cost.epsilon;
  if (phi <= cost.epsilon) {
    const double t = phi - cost.epsilon;
    return t * t / (2.0 * cost.epsilon);
  }
  return 0.0;
}

double obstacle_cost_grad(double phi, const CostParams& cost) {
  if (!std::isfinite(phi)) throw InvalidInput("cost input must be finite");
  if (phi <= 0.0) return -1.0;
  if (phi <= cost.epsilon) return (phi - cost.epsilon) / cost.epsilon;
  return 0.0;
}

}  // namespace ablate
