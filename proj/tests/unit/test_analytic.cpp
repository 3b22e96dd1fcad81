#include "sglab/analytic.hpp"
#include "sglab/eval.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace sglab;

namespace {

Vec v1(double x) { return Vec::Constant(1, x); }

const MixtureDensity& two_mode() {
  static const MixtureDensity m = MixtureDensity::line({-1.0, 1.0}, 0.05);
  return m;
}

double grid_value_at(const DensityGrid& g, double x) { return g[static_cast<std::size_t>(g.spec().locate(v1(x)))]; }

}  // namespace

TEST_CASE("mixture density values") {
  const auto n = MixtureDensity::standard_normal(1);
  CHECK(n.density(v1(0.0)) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)));
  const auto wide = MixtureDensity::line({-1.0, 1.0}, 1.0);
  CHECK(wide.density(v1(0.0)) == doctest::Approx(std::exp(-0.5) / std::sqrt(2.0 * std::numbers::pi)));
  for (double x : {0.1, 0.7, 1.3}) CHECK(two_mode().density(v1(x)) == doctest::Approx(two_mode().density(v1(-x))));
  CHECK(two_mode().density(v1(0.0)) > 0.0);
  CHECK_THROWS_AS(two_mode().density(Vec::Zero(2)), DimensionError);
}

TEST_CASE("mixture validation") {
  CHECK_THROWS(MixtureDensity({{0.5, v1(0.0), 1.0}}));
  CHECK_THROWS(MixtureDensity({{1.0, v1(0.0), -1.0}}));
  CHECK_THROWS(MixtureDensity({{0.5, v1(0.0), 1.0}, {0.5, Vec::Zero(2), 1.0}}));
}

TEST_CASE("mixture score") {
  const MixtureDensity g({{1.0, v1(0.4), 0.7}});
  for (double x : {-2.0, 0.0, 1.5}) CHECK(g.score(v1(x))(0) == doctest::Approx((0.4 - x) / 0.49));
  CHECK(std::abs(two_mode().score(v1(0.0))(0)) < 1e-12);

  // Central difference of the log density at random points (2D mixture).
  const MixtureDensity m({{0.3, Vec::Constant(2, 0.5), 0.8}, {0.7, Vec::Constant(2, -0.5), 0.6}});
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 50; ++i) {
    Vec x(2);
    x << n01(rng), n01(rng);
    const Vec s = m.score(x);
    for (int d = 0; d < 2; ++d) {
      const double h = 1e-5;
      Vec up = x, dn = x;
      up(d) += h;
      dn(d) -= h;
      const double fd = (m.log_density(up) - m.log_density(dn)) / (2 * h);
      CHECK(std::abs(fd - s(d)) <= 1e-6 * std::max(std::abs(s(d)), 1e-3));
    }
  }
}

TEST_CASE("batched evaluations agree with pointwise ones") {
  Mat x(3, 1);
  x << -0.9, 0.0, 1.2;
  const Vec ld = two_mode().log_density(x);
  const Mat sc = two_mode().score(x);
  for (int i = 0; i < 3; ++i) {
    CHECK(ld(i) == doctest::Approx(two_mode().log_density(v1(x(i, 0)))));
    CHECK(sc(i, 0) == doctest::Approx(two_mode().score(v1(x(i, 0)))(0)));
  }
}

TEST_CASE("diffused_mixture") {
  const auto s = NoiseSchedule::vp();
  const auto same = diffused_mixture(two_mode(), s, 0.0);
  CHECK(same.component(1).mean(0) == 1.0);
  CHECK(same.component(1).std == doctest::Approx(0.05));
  const auto n = diffused_mixture(MixtureDensity::standard_normal(2), s, 0.63);
  CHECK(n.component(0).std == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(n.component(0).mean.norm() == 0.0);
}

TEST_CASE("diffused density matches Monte-Carlo convolution") {
  const auto s = NoiseSchedule::vp();
  const double t = 0.38;
  const auto as = vp_alpha_sigma(s, t);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n01;
  const Mat x0 = two_mode().sample(1000000, rng);
  Mat xt(x0.rows(), 1);
  for (Eigen::Index i = 0; i < x0.rows(); ++i) xt(i, 0) = as.alpha * x0(i, 0) + as.sigma * n01(rng);
  const GridSpec box = GridSpec::line(-3.0, 3.0, 120);
  const auto truth = diffused_density_grid(two_mode(), s, t, box);
  CHECK(std::abs(truth.mass() - 1.0) < 1e-6);
  CHECK(tv_distance(histogram_density(xt, box).grid, truth) < 0.01);
}

TEST_CASE("sg_density_grid special cases") {
  const auto s = NoiseSchedule::vp();
  const GridSpec box = GridSpec::line(-3.0, 3.0, 600);
  const auto p = diffused_density_grid(two_mode(), s, 0.38, box);
  const auto w0 = sg_density_grid(two_mode(), s, 0.38, 0.2, 0.0, box);
  const auto d0 = sg_density_grid(two_mode(), s, 0.38, 0.0, 2.0, box);
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(w0[i] == doctest::Approx(p[i]).epsilon(1e-12));
    CHECK(d0[i] == doctest::Approx(p[i]).epsilon(1e-12));
  }
  const auto sg = sg_density_grid(two_mode(), s, 0.38, 0.2, 1.0, box);
  CHECK(std::abs(sg.mass() - 1.0) < 1e-6);
  CHECK(grid_value_at(sg, 0.0) < grid_value_at(p, 0.0));
  CHECK_THROWS_AS(sg_density_grid(two_mode(), s, 0.9, 0.2, 1.0, box), DomainError);
  CHECK_THROWS_AS(sg_density_grid(two_mode(), s, 0.3, 0.2, -1.0, box), DomainError);
}

TEST_CASE("SG score identity: gradient of log sg density") {
  const auto s = NoiseSchedule::vp();
  const double t = 0.38, delta = 0.2;
  const auto pt = diffused_mixture(two_mode(), s, t);
  const auto pd = diffused_mixture(two_mode(), s, t + delta);
  for (double omega : {1.0, 3.0}) {
    for (int i = 0; i < 40; ++i) {
      const double x = -2.0 + 4.0 * (i + 0.5) / 40;
      const double h = 1e-5;
      const double fd = (sg_log_density(two_mode(), s, t, delta, omega, v1(x + h)) -
                         sg_log_density(two_mode(), s, t, delta, omega, v1(x - h))) /
                        (2 * h);
      const double exact = (1 + omega) * pt.score(v1(x))(0) - omega * pd.score(v1(x))(0);
      CHECK(std::abs(fd - exact) <= 1e-4 * std::max(std::abs(exact), 1e-6));
    }
  }
}

TEST_CASE("suppression is monotone in omega") {
  const auto s = NoiseSchedule::vp();
  const GridSpec box = GridSpec::line(-3.0, 3.0, 600);
  double prev = 1.0;
  for (double omega : {0.0, 1.0, 2.0, 3.0}) {
    const double m = valley_mass(sg_density_grid(two_mode(), s, 0.38, 0.2, omega, box), -0.25, 0.25);
    CHECK(m < prev);
    prev = m;
  }
}

TEST_CASE("heat residual on the Brownian family converges") {
  const auto fam = SmoothingFamily::brownian(two_mode());
  for (double t : {0.05, 0.2, 0.5}) {
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i < 200; ++i) {
      const Vec x = v1(-2.5 + 5.0 * i / 199.0);
      worst = std::max(worst, std::abs(heat_residual(fam, t, x, 1e-5)));
      scale = std::max(scale, fam.at(t).density(x));
    }
    CHECK(worst < 1e-4 * scale);
  }
}

TEST_CASE("heat residual: both sides evaluated independently for a single Gaussian") {
  // p_t = N(0, s^2 + t): dp/dt = p (x^2 - v) / (2 v^2), Laplacian = p (x^2 - v) / v^2.
  const MixtureDensity g({{1.0, v1(0.0), 0.5}});
  const auto fam = SmoothingFamily::brownian(g);
  const double t = 0.3, v = 0.25 + t;
  for (double x : {0.0, 0.4, 1.1}) {
    const double p = std::exp(-x * x / (2 * v)) / std::sqrt(2 * std::numbers::pi * v);
    const double dpdt = p * (x * x - v) / (2 * v * v);
    CHECK(time_derivative(fam, t, v1(x)) == doctest::Approx(dpdt).epsilon(1e-7));
    CHECK(fam.at(t).laplacian(v1(x)) == doctest::Approx(2 * dpdt).epsilon(1e-10));
  }
}

TEST_CASE("variance-expansion family satisfies the heat identity and fills the valley") {
  const auto s = NoiseSchedule::vp();
  const auto fam = SmoothingFamily::variance_expansion(two_mode(), s);
  for (double t : {0.1, 0.38, 0.7}) {
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i < 600; ++i) {
      const Vec x = v1(-3.0 + 6.0 * (i + 0.5) / 600);
      worst = std::max(worst, std::abs(heat_residual(two_mode(), s, t, x)));
      scale = std::max(scale, fam.at(t).density(x));
    }
    CHECK(worst <= 1e-4 * scale);
    CHECK(fam.at(t + 0.01).density(v1(0.0)) > fam.at(t).density(v1(0.0)));
  }
}

TEST_CASE("density grid csv and normalization") {
  const GridSpec box = GridSpec::square(-1.0, 1.0, 2);
  DensityGrid g(box, {1.0, 1.0, 1.0, 1.0});
  g.normalize();
  CHECK(g.mass() == doctest::Approx(1.0));
  std::ostringstream out;
  g.write_csv(out);
  CHECK(out.str().rfind("x,y,density\n", 0) == 0);
  CHECK(box.locate(Vec::Constant(2, 5.0)) == -1);
  CHECK(box.locate(Vec::Constant(2, 0.5)) == 3);
  DensityGrid empty(box);
  CHECK_THROWS(empty.normalize());
}
