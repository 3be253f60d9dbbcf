#include <doctest.h>

#include <cmath>
#include <vector>

#include "ablate/calibration.hpp"
#include "oracles.hpp"

using namespace ablate;

namespace {

double model(double s, const BeamParams& p) {
  return p.depth * std::exp(-s * s / (2.0 * p.width * p.width));
}

double ssr(const std::vector<ProjectedSample>& samples, const BeamParams& p) {
  double acc = 0.0;
  for (const ProjectedSample& sm : samples) {
    const double r = sm.d - model(sm.s, p);
    acc += r * r;
  }
  return acc;
}

std::vector<ProjectedSample> clean_samples(const BeamParams& truth) {
  std::vector<ProjectedSample> samples;
  for (int i = 0; i <= 10; ++i) {
    const double s = 0.2 * i;
    samples.push_back({s, model(s, truth)});
  }
  return samples;
}

}  // namespace

TEST_CASE("noiseless projection reproduces the depth profile") {
  AblationFrame frame;
  BeamParams beam;
  CalibPatch patch;
  PointSet pre;
  const Angles theta = Angles::from_degrees(12.0, -7.0, 0.0);
  const CavityMeasurement m = synthesize_cavity(theta, frame, beam, patch, 0.0, 7, &pre);
  REQUIRE(pre.size() == static_cast<std::size_t>(patch.nx * patch.ny));
  REQUIRE(m.cloud.size() == pre.size());
  const std::vector<ProjectedSample> samples = project_measurement(m, pre, frame);
  REQUIRE(samples.size() == pre.size());
  for (const ProjectedSample& sm : samples)
    CHECK(sm.d == doctest::Approx(depth_of_cut(sm.s, beam)).epsilon(1e-12));
}

TEST_CASE("projection rejects mismatched cloud sizes") {
  AblationFrame frame;
  PointSet pre;
  pre.points = {Vec3::Zero(), Vec3(1, 0, 0)};
  CavityMeasurement m;
  m.cloud.points = {Vec3::Zero()};
  CHECK_THROWS_AS(project_measurement(m, pre, frame), InvalidInput);
}

TEST_CASE("noiseless fit recovers the generating parameters") {
  const BeamParams truth{1.4376, 0.6486};
  const FitResult fit = fit_gaussian(clean_samples(truth));
  CHECK(fit.converged);
  CHECK(std::abs(fit.params.depth - truth.depth) / truth.depth < 1e-8);
  CHECK(std::abs(fit.params.width - truth.width) / truth.width < 1e-8);
  CHECK(fit.rmse < 1e-10);
}

TEST_CASE("reported rmse is the root mean squared residual") {
  const BeamParams truth{1.2, 0.8};
  std::vector<ProjectedSample> samples = clean_samples(truth);
  samples[3].d += 0.05;
  samples[7].d -= 0.03;
  const FitResult fit = fit_gaussian(samples);
  const double n = static_cast<double>(samples.size());
  CHECK(fit.rmse * fit.rmse * n == doctest::Approx(ssr(samples, fit.params)).epsilon(1e-12));
}

TEST_CASE("the fit sits at a local minimum of the squared residuals") {
  const BeamParams truth{1.3, 0.7};
  std::vector<ProjectedSample> samples = clean_samples(truth);
  testutil::Rng rng(401);
  for (ProjectedSample& sm : samples) sm.d += rng.uni(-0.02, 0.02);
  const FitResult fit = fit_gaussian(samples);
  CHECK(fit.converged);
  const double base = ssr(samples, fit.params);
  for (const double fd : {0.99, 1.0, 1.01}) {
    for (const double fw : {0.99, 1.0, 1.01}) {
      BeamParams p{fit.params.depth * fd, fit.params.width * fw};
      CHECK(ssr(samples, p) >= base - 1e-12);
    }
  }
}

TEST_CASE("noisy depth samples recover the parameters on average") {
  const BeamParams truth{1.4376, 0.6486};
  double sum_depth = 0.0, sum_width = 0.0;
  const int seeds = 100;
  for (int seed = 0; seed < seeds; ++seed) {
    testutil::Rng rng(1000 + seed);
    std::vector<ProjectedSample> samples;
    for (int i = 0; i <= 20; ++i) {
      const double s = 0.1 * i;
      samples.push_back({s, model(s, truth) + rng.gauss(0.05)});
    }
    const FitResult fit = fit_gaussian(samples);
    CHECK(fit.converged);
    sum_depth += fit.params.depth;
    sum_width += fit.params.width;
  }
  CHECK(std::abs(sum_depth / seeds - truth.depth) / truth.depth < 0.02);
  CHECK(std::abs(sum_width / seeds - truth.width) / truth.width < 0.02);
}

TEST_CASE("fewer than three usable samples is an error") {
  std::vector<ProjectedSample> samples{{0.0, 1.0}, {0.5, 0.5}, {1.0, 0.0}, {1.5, 0.0}};
  CHECK_THROWS_AS(fit_gaussian(samples), InsufficientData);
}

TEST_CASE("identical projected distances cannot constrain the width") {
  std::vector<ProjectedSample> samples(5, ProjectedSample{0.5, 1.0});
  CHECK_THROWS_AS(fit_gaussian(samples), RankDeficient);
}

TEST_CASE("fitted width is reported positive") {
  const BeamParams truth{1.0, 0.5};
  std::vector<ProjectedSample> samples = clean_samples(truth);
  testutil::Rng rng(402);
  for (ProjectedSample& sm : samples) sm.d += rng.uni(-0.1, 0.1);
  const FitResult fit = fit_gaussian(samples);
  CHECK(fit.params.width > 0.0);
}

TEST_CASE("cavity synthesis is reproducible per seed") {
  AblationFrame frame;
  BeamParams beam;
  CalibPatch patch;
  const Angles theta = Angles::from_degrees(5.0, 5.0, 0.0);
  const CavityMeasurement a = synthesize_cavity(theta, frame, beam, patch, 0.02, 99);
  const CavityMeasurement b = synthesize_cavity(theta, frame, beam, patch, 0.02, 99);
  const CavityMeasurement c = synthesize_cavity(theta, frame, beam, patch, 0.02, 100);
  REQUIRE(a.cloud.size() == b.cloud.size());
  bool identical = true, differs = false;
  for (std::size_t i = 0; i < a.cloud.size(); ++i) {
    if (a.cloud.points[i] != b.cloud.points[i]) identical = false;
    if (a.cloud.points[i] != c.cloud.points[i]) differs = true;
  }
  CHECK(identical);
  CHECK(differs);
}

TEST_CASE("the dataset generator emits one measurement per angle and repeat") {
  AblationFrame frame;
  BeamParams beam;
  CalibPatch patch;
  const std::vector<Angles> angles{Angles{}, Angles::from_degrees(10, 0, 0),
                                   Angles::from_degrees(0, 10, 0),
                                   Angles::from_degrees(-10, 5, 0)};
  PointSet pre;
  const auto data = synthesize_measurements(angles, 10, frame, beam, patch, 0.01, 3, &pre);
  CHECK(data.size() == 40);
  CHECK(pre.size() == static_cast<std::size_t>(patch.nx * patch.ny));
  for (std::size_t i = 0; i < data.size(); ++i)
    CHECK(data[i].theta.vec() == angles[i / 10].vec());
}

TEST_CASE("pooled fit over noisy synthetic cavities lands near the truth") {
  AblationFrame frame;
  BeamParams beam;
  CalibPatch patch;
  const std::vector<Angles> angles{Angles{}, Angles::from_degrees(15, 0, 0),
                                   Angles::from_degrees(0, -15, 0),
                                   Angles::from_degrees(10, 10, 0)};
  PointSet pre;
  const auto data = synthesize_measurements(angles, 3, frame, beam, patch, 0.01, 11, &pre);
  const FitResult fit = fit_measurements(data, pre, frame);
  CHECK(fit.converged);
  CHECK(std::abs(fit.params.depth - beam.depth) / beam.depth < 0.1);
  CHECK(std::abs(fit.params.width - beam.width) / beam.width < 0.1);
}
