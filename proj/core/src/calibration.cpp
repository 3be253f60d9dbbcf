#include "ablate/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

namespace ablate {

std::vector<ProjectedSample> project_measurement(const CavityMeasurement& m,
                                                 const PointSet& pre_surface,
                                                 const AblationFrame& frame) {
  if (m.cloud.size() != pre_surface.size())
    throw InvalidInput("measurement cloud and pre-surface sizes differ");
  const Vec3 v = incident_vector(m.theta, frame);
  std::vector<ProjectedSample> out;
  out.reserve(pre_surface.size());
  for (std::size_t i = 0; i < pre_surface.size(); ++i) {
    ProjectedSample ps;
    ps.s = projected_distance(pre_surface.points[i], v, frame);
    ps.d = (m.cloud.points[i] - pre_surface.points[i]).norm();
    out.push_back(ps);
  }
  return out;
}

namespace {

double sum_sq_residuals(const std::vector<ProjectedSample>& samples, double depth,
                        double width) {
  double ssr = 0.0;
  for (const ProjectedSample& ps : samples) {
    const double r = ps.d - depth * std::exp(-(ps.s * ps.s) / (2.0 * width * width));
    ssr += r * r;
  }
  return ssr;
}

// Least-squares line ln d = c0 + c1 * s^2 on the positive-depth samples.
void log_linear_init(const std::vector<ProjectedSample>& samples, double* depth,
                     double* width) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  double max_s = 0.0;
  int n = 0;
  for (const ProjectedSample& ps : samples) {
    max_s = std::max(max_s, std::abs(ps.s));
    if (ps.d <= 1e-12) continue;
    const double x = ps.s * ps.s;
    const double y = std::log(ps.d);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n == 0) {
    // Every sample sits below the logarithm floor; start flat and let the
    // refinement move from there.
    *depth = 1e-12;
    *width = 10.0 * (max_s + 1.0);
    return;
  }
  const double det = n * sxx - sx * sx;
  double c0, c1;
  if (std::abs(det) < 1e-30) {
    // Single distinct s^2 among the positive samples; start from the mean
    // depth and a wide profile, LM refines from there.
    c0 = sy / n;
    c1 = 0.0;
  } else {
    c0 = (sy * sxx - sx * sxy) / det;
    c1 = (n * sxy - sx * sy) / det;
  }
  *depth = std::exp(c0);
  *width = c1 < -1e-30 ? std::sqrt(-1.0 / (2.0 * c1)) : 10.0 * (max_s + 1.0);
}

}  // namespace

FitResult fit_gaussian(const std::vector<ProjectedSample>& samples, int max_iters) {
  int positive = 0;
  for (const ProjectedSample& ps : samples) {
    if (!std::isfinite(ps.s) || !std::isfinite(ps.d))
      throw InvalidInput("fit samples must be finite");
    if (ps.d > 0.0) ++positive;
  }
  if (positive < 3)
    throw InsufficientData("need at least 3 samples with positive depth");
  const double s_front = samples.front().s;
  const bool all_equal = std::all_of(samples.begin(), samples.end(),
                                     [&](const ProjectedSample& ps) {
                                       return ps.s == s_front;
                                     });
  if (all_equal)
    throw RankDeficient("all samples share one projected distance");

  double depth, width;
  log_linear_init(samples, &depth, &width);

  double lambda = 1e-3;
  double ssr = sum_sq_residuals(samples, depth, width);
  int iters = 0;
  bool converged = false;
  while (iters < max_iters) {
    ++iters;
    // Normal equations of the damped step: (J^T J + lambda diag(J^T J)) dp = -J^T r.
    Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
    Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
    for (const ProjectedSample& ps : samples) {
      const double e = std::exp(-(ps.s * ps.s) / (2.0 * width * width));
      const double r = ps.d - depth * e;
      const Eigen::Vector2d jrow(-e, -depth * e * (ps.s * ps.s) /
                                         (width * width * width));
      jtj += jrow * jrow.transpose();
      jtr += jrow * r;
    }
    Eigen::Matrix2d damped = jtj;
    damped(0, 0) += lambda * std::max(jtj(0, 0), 1e-12);
    damped(1, 1) += lambda * std::max(jtj(1, 1), 1e-12);
    const Eigen::Vector2d step = damped.ldlt().solve(-jtr);
    const double trial_depth = depth + step(0);
    const double trial_width = width + step(1);
    const double trial_ssr =
        std::isfinite(trial_width) && trial_width != 0.0 &&
                std::isfinite(trial_depth)
            ? sum_sq_residuals(samples, trial_depth, trial_width)
            : std::numeric_limits<double>::infinity();
    if (trial_ssr <= ssr) {
      const double rel = std::max(std::abs(step(0)) / std::max(std::abs(depth), 1e-30),
                                  std::abs(step(1)) / std::max(std::abs(width), 1e-30));
      depth = trial_depth;
      width = trial_width;
      ssr = trial_ssr;
      lambda = std::max(lambda * 0.3, 1e-14);
      if (rel < 1e-10) {
        converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e14) break;  // no acceptable step exists anymore
    }
  }

  FitResult res;
  res.params.depth = depth;
  res.params.width = std::abs(width);
  res.rmse = std::sqrt(ssr / static_cast<double>(samples.size()));
  res.iterations = iters;
  res.converged = converged;
  return res;
}

FitResult fit_measurements(const std::vector<CavityMeasurement>& measurements,
                           const PointSet& pre_surface, const AblationFrame& frame,
                           int max_iters) {
  std::vector<ProjectedSample> pooled;
  for (const CavityMeasurement& m : measurements) {
    const std::vector<ProjectedSample> part =
        project_measurement(m, pre_surface, frame);
    pooled.insert(pooled.end(), part.begin(), part.end());
  }
  return fit_gaussian(pooled, max_iters);
}

CavityMeasurement synthesize_cavity(const Angles& theta, const AblationFrame& frame,
                                    const BeamParams& beam, const CalibPatch& patch,
                                    double noise_sigma, std::uint64_t seed,
                                    PointSet* pre_surface) {
  if (noise_sigma < 0.0) throw InvalidInput("noise sigma must be >= 0");
  const PointSet pre = make_grid_patch(patch.nx, patch.ny, patch.spacing, patch.center);
  CavityMeasurement m;
  m.theta = theta;
  m.cloud = ablate_set(pre, theta, frame, beam);
  if (noise_sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sigma);
    for (Vec3& p : m.cloud.points) {
      p.x() += noise(rng);
      p.y() += noise(rng);
      p.z() += noise(rng);
    }
  }
  if (pre_surface) *pre_surface = pre;
  return m;
}

std::vector<CavityMeasurement> synthesize_measurements(
    const std::vector<Angles>& angles, int repeats, const AblationFrame& frame,
    const BeamParams& beam, const CalibPatch& patch, double noise_sigma,
    std::uint64_t seed, PointSet* pre_surface) {
  if (repeats < 1) throw InvalidInput("repeats must be >= 1");
  if (pre_surface)
    *pre_surface = make_grid_patch(patch.nx, patch.ny, patch.spacing, patch.center);
  std::vector<CavityMeasurement> out;
  out.reserve(angles.size() * static_cast<std::size_t>(repeats));
  std::uint64_t k = 0;
  for (const Angles& a : angles)
    for (int r = 0; r < repeats; ++r)
      out.push_back(synthesize_cavity(a, frame, beam, patch, noise_sigma,
                                      seed + 0x9e3779b97f4a7c15ull * ++k));
  return out;
}

}  // namespace ablate
