#pragma once

#include <cstdint>
#include <vector>

#include "ablate/geometry.hpp"

namespace ablate {

// One measured cavity: the rotation angles the pulse was fired with and the
// post-ablation point cloud, aligned index-by-index with the pre-ablation
// surface it was cut from.
struct CavityMeasurement {
  Angles theta{};
  PointSet cloud;
};

// (projected distance to the beam axis, measured depth of cut) pair.
struct ProjectedSample {
  double s{0.0};
  double d{0.0};
};

struct FitResult {
  BeamParams params{};
  double rmse{0.0};
  int iterations{0};
  bool converged{false};
};

// Reduces a measurement to (s, d) samples: s from the pre-surface point and
// the measurement's beam axis, d the displacement magnitude between aligned
// pre/post points. Throws InvalidInput on size mismatch.
std::vector<ProjectedSample> project_measurement(const CavityMeasurement& m,
                                                 const PointSet& pre_surface,
                                                 const AblationFrame& frame);

// Fits depth(s) = depth * exp(-s^2 / (2 width^2)) by Levenberg-Marquardt.
// Initialization log-linearizes the model (samples with d <= 1e-12 are dropped
// for the logarithm only; the refinement uses every sample). The width is
// fitted unconstrained and reported as |width|. Converged means the relative
// parameter change fell below 1e-10 within `max_iters` iterations.
// Throws InsufficientData (< 3 samples with d > 0) or RankDeficient (all s
// equal).
FitResult fit_gaussian(const std::vector<ProjectedSample>& samples, int max_iters = 200);

// Pools the projected samples of several measurements into one fit.
FitResult fit_measurements(const std::vector<CavityMeasurement>& measurements,
                           const PointSet& pre_surface, const AblationFrame& frame,
                           int max_iters = 200);

// Synthetic planar calibration patch.
struct CalibPatch {
  int nx{21}, ny{21};
  double spacing{0.15};
  Vec3 center{0.0, 0.0, 0.0};
};

// Generates a measurement by ablating the patch and adding isotropic Gaussian
// displacement noise (per coordinate, std `noise_sigma`) to the cloud. The RNG
// stream is fully determined by `seed`.
CavityMeasurement synthesize_cavity(const Angles& theta, const AblationFrame& frame,
                                    const BeamParams& beam, const CalibPatch& patch,
                                    double noise_sigma, std::uint64_t seed,
                                    PointSet* pre_surface = nullptr);

// Dataset with the reference acquisition shape: one measurement per
// (angle, repeat) pair, seeds derived from `seed`.
std::vector<CavityMeasurement> synthesize_measurements(
    const std::vector<Angles>& angles, int repeats, const AblationFrame& frame,
    const BeamParams& beam, const CalibPatch& patch, double noise_sigma,
    std::uint64_t seed, PointSet* pre_surface = nullptr);

}  // namespace ablate
