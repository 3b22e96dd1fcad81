#include "sglab/analytic.hpp"
#include "sglab/eval.hpp"
#include "sglab/field.hpp"
#include "sglab/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace sglab;

namespace {

double phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

DensityGrid gaussian_grid(const GridSpec& box, double mean, double std) {
  return diffused_density_grid(MixtureDensity({{1.0, Vec::Constant(1, mean), std}}), NoiseSchedule::vp(), 0.0, box);
}

}  // namespace

TEST_CASE("histogram_density basics") {
  const GridSpec box = GridSpec::line(0.0, 1.0, 10);
  const Mat same = Mat::Constant(50, 1, 0.55);
  const Histogram h = histogram_density(same, box);
  CHECK(h.grid[5] == doctest::Approx(1.0 / box.cell_volume()));
  CHECK(h.escaped == 0);

  Mat mixed(4, 1);
  mixed << 0.5, 0.5, 3.0, -2.0;
  const Histogram e = histogram_density(mixed, box);
  CHECK(e.escaped == 2);
  CHECK(e.escaped_fraction == 0.5);
  CHECK(e.grid.mass() == doctest::Approx(1.0));
  CHECK_THROWS(histogram_density(Mat(0, 1), box));
}

TEST_CASE("uniform samples give a flat histogram") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Mat x(1000000, 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, 0) = u(rng);
  const auto h = histogram_density(x, GridSpec::line(0.0, 1.0, 100));
  const auto [lo, hi] = std::minmax_element(h.grid.values().begin(), h.grid.values().end());
  CHECK(*hi / *lo < 1.2);
}

TEST_CASE("histogram of normal samples converges to the analytic density") {
  // Sampling noise alone is ~0.028 TV on 600 cells at n = 1e5, so this check uses 120 cells.
  const GridSpec box = GridSpec::line(-3.0, 3.0, 120);
  const auto truth = gaussian_grid(box, 0.0, 1.0);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n01;
  Mat x(1000000, 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, 0) = n01(rng);
  CHECK(tv_distance(histogram_density(x.topRows(100000), box).grid, truth) < 0.02);
  double prev = 1.0;
  for (Eigen::Index n = 1000; n <= 1000000; n *= 4) {
    const double tv = tv_distance(histogram_density(x.topRows(n), box).grid, truth);
    CHECK(tv < prev);
    prev = tv;
  }
}

TEST_CASE("tv_distance") {
  const GridSpec box = GridSpec::line(-6.0, 6.0, 1200);
  const auto a = gaussian_grid(box, 0.0, 1.0);
  const auto b = gaussian_grid(box, 0.5, 1.0);
  CHECK(tv_distance(a, a) == 0.0);
  CHECK(std::abs(tv_distance(a, b) - (2.0 * phi(0.25) - 1.0)) < 0.01);
  const GridSpec small = GridSpec::line(0.0, 2.0, 2);
  CHECK(tv_distance(DensityGrid(small, {1.0, 0.0}), DensityGrid(small, {0.0, 1.0})) == 1.0);
  CHECK_THROWS_AS(tv_distance(a, DensityGrid(small, {0.5, 0.5})), DimensionError);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const GridSpec g = GridSpec::line(0.0, 1.0, 20);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<DensityGrid> v;
    for (int k = 0; k < 3; ++k) {
      DensityGrid d(g);
      for (auto& x : d.values()) x = u(rng);
      d.normalize();
      v.push_back(d);
    }
    CHECK(std::abs(tv_distance(v[0], v[1]) - tv_distance(v[1], v[0])) < 1e-12);
    CHECK(tv_distance(v[0], v[2]) <= tv_distance(v[0], v[1]) + tv_distance(v[1], v[2]) + 1e-12);
  }
}

TEST_CASE("valley_mass") {
  const GridSpec box = GridSpec::line(-3.0, 3.0, 600);
  const auto g = gaussian_grid(box, 0.0, 1.0);
  CHECK(valley_mass(g, 5.0, 6.0) == 0.0);
  CHECK(valley_mass(g, -3.0, 3.0) == doctest::Approx(1.0));
  CHECK(valley_mass(g, -0.25, 0.25) == doctest::Approx(2.0 * phi(0.25) - 1.0).epsilon(1e-3));
  // Partial cells are split by overlap.
  const GridSpec coarse = GridSpec::line(0.0, 1.0, 2);
  CHECK(valley_mass(DensityGrid(coarse, {2.0, 0.0}), 0.25, 0.75) == doctest::Approx(0.5));
  Mat s(4, 1);
  s << -0.1, 0.2, 0.9, -2.0;
  CHECK(valley_mass(s, -0.25, 0.25) == 0.5);
  CHECK(valley_mass(s, 10.0, 11.0) == 0.0);
  CHECK_THROWS(valley_mass(s, 0.3, 0.3));
}

TEST_CASE("bootstrap standard error of a proportion") {
  std::mt19937_64 rng(4);
  std::bernoulli_distribution b(0.3);
  Mat x(20000, 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, 0) = b(rng) ? 0.0 : 5.0;
  const double se = bootstrap_se(x, [](const Mat& m) { return valley_mass(m, -1.0, 1.0); }, 300, 7);
  const double analytic = std::sqrt(0.3 * 0.7 / 20000);
  CHECK(se == doctest::Approx(analytic).epsilon(0.15));
}

TEST_CASE("swirl statistics") {
  const SwirlManifold m{SwirlSpec{}};
  Mat on(256, 2);
  for (int i = 0; i < 128; ++i) {
    on.row(i) = m.at_fraction(0, (i + 0.5) / 128).transpose();
    on.row(128 + i) = m.at_fraction(1, (i + 0.5) / 128).transpose();
  }
  const auto s = swirl_outlier_stats(on, m, 0.2);
  CHECK(s.outlier_fraction == 0.0);
  CHECK(s.mean_manifold_distance < 1e-3);
  CHECK(s.mode_recall == 1.0);

  const auto far = swirl_outlier_stats(Mat::Constant(10, 2, 0.0), m, 0.2);
  CHECK(far.outlier_fraction == 1.0);
  CHECK(far.mode_recall == 0.0);

  // Only arm 0's first half: recall 1/4 of the 2 x 64 bins... exactly 32 of 128.
  Mat half(64, 2);
  for (int i = 0; i < 64; ++i) half.row(i) = m.at_fraction(0, (i + 0.5) / 128).transpose();
  CHECK(swirl_outlier_stats(half, m, 0.2).mode_recall == doctest::Approx(0.25));

  // Nearest-point distance against a brute-force scan.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 50; ++k) {
    Vec x(2);
    x << u(rng), u(rng);
    double best = 1e9;
    for (int arm = 0; arm < 2; ++arm) {
      for (int i = 0; i <= 20000; ++i) best = std::min(best, (m.at_fraction(arm, i / 20000.0) - x).norm());
    }
    CHECK(m.nearest(x).distance == doctest::Approx(best).epsilon(1e-3));
  }
  CHECK_THROWS(swirl_outlier_stats(Mat(0, 2), m));
}

TEST_CASE("Fokker-Planck: trivial and heat-kernel cases") {
  const GridSpec box = GridSpec::line(-4.0, 4.0, 400);
  const auto p0 = gaussian_grid(box, 0.3, 0.5);
  FokkerPlanckProblem still;
  still.velocity = [](const Mat& x, double) { return Mat::Zero(x.rows(), x.cols()); };
  still.diffusion = [](double) { return 0.0; };
  still.times = {1.0, 0.5, 0.0};
  const auto same = fokker_planck_evolve(p0, still);
  for (std::size_t i = 0; i < p0.size(); ++i) CHECK(same[i] == p0[i]);

  FokkerPlanckProblem heat = still;
  heat.diffusion = [](double) { return 0.5; };
  const auto spread = fokker_planck_evolve(p0, heat);
  CHECK(std::abs(spread.mass() - 1.0) < 1e-6);
  CHECK(tv_distance(spread, gaussian_grid(box, 0.3, std::sqrt(0.25 + 2 * 0.5 * 1.0))) < 0.01);
  for (double v : spread.values()) CHECK(v >= 0.0);

  FokkerPlanckProblem rigid = heat;
  rigid.substeps = 1;
  CHECK_THROWS_WITH(fokker_planck_evolve(p0, rigid), doctest::Contains("CFL"));
}

TEST_CASE("Fokker-Planck: constant drift translates the density") {
  const GridSpec box = GridSpec::line(-4.0, 4.0, 800);
  const auto p0 = gaussian_grid(box, -1.0, 0.4);
  FokkerPlanckProblem move;
  move.velocity = [](const Mat& x, double) { return Mat::Constant(x.rows(), 1, 1.5); };
  move.diffusion = [](double) { return 0.0; };
  move.times = {1.0, 0.0};
  const auto moved = fokker_planck_evolve(p0, move);
  double mean = 0.0;
  for (std::size_t i = 0; i < moved.size(); ++i) mean += moved[i] * box.center(i)(0) * box.cell_volume();
  CHECK(mean == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("reverse-process oracle rejects unsupported samplers") {
  const AnalyticField f(MixtureDensity::line({-1.0, 1.0}, 0.05), NoiseSchedule::vp());
  GuidanceStack g;
  CHECK_THROWS_AS(reverse_process_problem(f, g, SamplerConfig{}), ConfigError);
  g.omega_sg = 1.0;
  g.shift = {ShiftKind::Prev, 0.0};
  CHECK_THROWS_AS(reverse_process_problem(f, g, SamplerConfig::defaults(SamplerKind::SDE)), ConfigError);
}

TEST_CASE("SG-prev reference is closer to the shifted-time density at high noise") {
  const auto vp = NoiseSchedule::vp();
  const auto data = MixtureDensity::line({-1.0, 1.0}, 0.05);
  const GridSpec box = GridSpec::line(-3.0, 3.0, 600);
  auto gap = [&](double t) {
    return tv_distance(diffused_density_grid(data, vp, t + 0.01, box), diffused_density_grid(data, vp, t + 1.0 / 50, box));
  };
  CHECK(gap(0.75) < gap(0.25));
}

TEST_CASE("metric report") {
  MetricReport r;
  CHECK(r.to_csv() == "metric,value\n");
  r.add("tv_distance", 0.125);
  CHECK(r.has("tv_distance"));
  CHECK(r.at("tv_distance") == 0.125);
  CHECK(r.to_csv() == "metric,value\ntv_distance,0.125\n");
  CHECK_THROWS(r.at("missing"));
}
