#include "sglab/guidance.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sglab;

namespace {

Mat scalar(double v) { return Mat::Constant(1, 1, v); }

// Output depends on (x, t, c) in a simple closed form so expected values are easy to write down.
class ScriptedField : public ScoreField {
 public:
  int dim() const override { return 1; }
  const NoiseSchedule& schedule() const override { return schedule_; }
  Mat evaluate(const Mat& x, double t, Condition c) const override {
    ++calls;
    return (x.array() * 0.0 + value(t, c)).matrix();
  }
  static double value(double t, Condition c) { return (c == kNullCondition ? 1.0 : 2.0) + 10.0 * t; }
  mutable int calls = 0;

 private:
  NoiseSchedule schedule_ = NoiseSchedule::vp();
};

}  // namespace

TEST_CASE("cfg_combine") {
  CHECK(cfg_combine(scalar(2.0), scalar(2.0), 5.0)(0, 0) == 2.0);
  CHECK(cfg_combine(scalar(2.0), scalar(1.0), 0.0)(0, 0) == 1.0);
  CHECK(cfg_combine(scalar(2.0), scalar(1.0), 1.0)(0, 0) == 2.0);
  CHECK(cfg_combine(scalar(2.0), scalar(1.0), 7.5)(0, 0) == 8.5);
  CHECK_THROWS_AS(cfg_combine(Mat(Mat::Zero(1, 2)), scalar(1.0), 1.0), DimensionError);
}

TEST_CASE("sg_combine") {
  CHECK(sg_combine(scalar(-0.3), scalar(-0.3), 4.0)(0, 0) == -0.3);
  CHECK(sg_combine(scalar(2.0), scalar(1.0), 3.0)(0, 0) == 5.0);
  CHECK_THROWS_AS(sg_combine(scalar(2.0), Mat(Mat::Zero(2, 1)), 3.0), DimensionError);
  CHECK_THROWS_AS(sg_combine(scalar(2.0), scalar(1.0), -1.0), DomainError);
}

TEST_CASE("sg_prev_combine gating") {
  StepCache cache;
  CHECK(sg_prev_combine(scalar(2.0), cache, 3.0, 0.1, 0.5)(0, 0) == 2.0);
  cache.output = scalar(1.0);
  cache.valid = true;
  CHECK(sg_prev_combine(scalar(2.0), cache, 3.0, 0.7, 0.5)(0, 0) == 2.0);
  CHECK(sg_prev_combine(scalar(2.0), cache, 3.0, 0.1, 0.5)(0, 0) == 5.0);
  cache.output = scalar(2.0);
  CHECK(sg_prev_combine(scalar(2.0), cache, 3.0, 0.1, 0.5)(0, 0) == 2.0);
}

TEST_CASE("shift_delta") {
  const auto s = NoiseSchedule::vp();
  GuidanceStack g;
  g.shift = {ShiftKind::Constant, 10.0};
  for (double t : {0.0, 0.3, 0.9}) CHECK(shift_delta(g, s, t) == doctest::Approx(0.01));
  CHECK(shift_delta(g, s, 0.999) == doctest::Approx(0.001));
  CHECK(shift_delta(g, s, 1.0) == 0.0);
  g.shift = {ShiftKind::Dynamic, 2.0};
  CHECK(shift_delta(g, s, 0.5) == 0.25);
  CHECK(shift_delta(g, s, 0.8) == doctest::Approx(0.2));
  double prev = 1.0;
  for (double t = 0.6; t > 0.0; t -= 0.1) {
    CHECK(shift_delta(g, s, t) < prev);
    prev = shift_delta(g, s, t);
  }
}

TEST_CASE("stack validation") {
  GuidanceStack g;
  CHECK_NOTHROW(g.validate());
  g.omega_pag = 1.0;
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("PAG requires attention perturbation"), ConfigError);
  g = {};
  g.omega_sg = -1.0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = {};
  g.omega_cfg = 2.0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g.condition = 0;
  CHECK_NOTHROW(g.validate());
  g.shift = {ShiftKind::Constant, 0.0};
  CHECK_THROWS_AS(g.validate(), ConfigError);

  ScriptedField f;
  StepCache cache;
  GuidanceStack pag;
  pag.omega_pag = 0.5;
  CHECK_THROWS_AS(stack_apply(f, pag, scalar(0.0), 0.5, cache), ConfigError);
}

TEST_CASE("stack_apply composition and call counts") {
  ScriptedField f;
  const double t = 0.4;
  const double sc = ScriptedField::value(t, 0), su = ScriptedField::value(t, kNullCondition);
  const double sd = ScriptedField::value(t + 0.01, 0);

  StepCache cache;
  GuidanceStack plain;
  plain.condition = 0;
  auto out = stack_apply(f, plain, scalar(0.2), t, cache);
  CHECK(out.model_calls == 1);
  CHECK(out.score(0, 0) == sc);
  CHECK(cache.valid);
  CHECK(cache.output(0, 0) == sc);

  GuidanceStack full;
  full.condition = 0;
  full.omega_cfg = 3.5;
  full.omega_sg = 3.0;
  full.shift = {ShiftKind::Constant, 10.0};
  out = stack_apply(f, full, scalar(0.2), t, cache);
  CHECK(out.model_calls == 3);
  CHECK(out.score(0, 0) == doctest::Approx(su + 3.5 * (sc - su) + 3.0 * (sc - sd)).epsilon(1e-14));

  // SG-prev below the threshold reuses the cache and costs one call.
  GuidanceStack prev;
  prev.condition = 0;
  prev.omega_sg = 2.0;
  prev.shift = {ShiftKind::Prev, 0.0};
  prev.sg_prev_threshold = 500.0;
  StepCache c2;
  c2.output = scalar(1.5);
  c2.valid = true;
  const StepCache before = c2;
  out = stack_apply(f, prev, scalar(0.2), t, c2);
  CHECK(out.model_calls == 1);
  CHECK(out.score(0, 0) == sg_prev_combine(scalar(sc), before, 2.0, t, 0.5)(0, 0));
  CHECK(c2.output(0, 0) == sc);

  // Above the threshold, prev mode with zero value is unguided.
  out = stack_apply(f, prev, scalar(0.2), 0.8, c2);
  CHECK(out.model_calls == 1);
  CHECK(out.score(0, 0) == ScriptedField::value(0.8, 0));
  // With a positive value it applies constant-shift SG above the threshold.
  prev.shift.value = 10.0;
  out = stack_apply(f, prev, scalar(0.2), 0.8, c2);
  CHECK(out.model_calls == 2);
}

TEST_CASE("call-count law over a grid of stacks") {
  ScriptedField f;
  for (double cfg : {0.0, 2.0}) {
    for (double sg : {0.0, 1.0}) {
      for (auto kind : {ShiftKind::Constant, ShiftKind::Dynamic, ShiftKind::Prev}) {
        GuidanceStack g;
        g.condition = 1;
        g.omega_cfg = cfg;
        g.omega_sg = sg;
        g.shift = {kind, kind == ShiftKind::Prev ? 0.0 : 10.0};
        for (double t : {0.9, 0.3, 0.999}) {
          StepCache cache;
          f.calls = 0;
          const auto out = stack_apply(f, g, Mat::Zero(4, 1), t, cache);
          const int expected = 1 + (cfg > 0) + sg_shift_active(g, f.schedule(), t);
          CHECK(out.model_calls == expected);
          CHECK(f.calls == expected);
          if (kind == ShiftKind::Prev) CHECK(out.model_calls == 1 + (cfg > 0));
        }
      }
    }
  }
}

TEST_CASE("equal-input identities hold exactly on random values") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 200; ++i) {
    const Mat s = Mat::Constant(3, 2, n01(rng) * 100.0);
    const double w = std::abs(n01(rng)) * 10.0;
    StepCache cache;
    cache.output = s;
    cache.valid = true;
    CHECK(cfg_combine(s, s, w) == s);
    CHECK(sg_combine(s, s, w) == s);
    CHECK(sg_prev_combine(s, cache, w, 0.1, 0.5) == s);
  }
}

TEST_CASE("shift kind strings") {
  for (auto k : {ShiftKind::Constant, ShiftKind::Dynamic, ShiftKind::Prev}) CHECK(shift_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(shift_kind_from_string("linear"), ConfigError);
}
