#include "sglab/analytic.hpp"
#include "sglab/nn/adam.hpp"
#include "sglab/nn/checkpoint.hpp"
#include "sglab/nn/graph.hpp"
#include "sglab/nn/losses.hpp"
#include "sglab/nn/net.hpp"
#include "sglab/nn/train.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

using namespace sglab;
using namespace sglab::nn;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); }

Mat random_mat(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Mat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n01(rng);
  return m;
}

// Checks every entry of each parameter of a graph-built scalar function.
void check_op_gradient(const std::vector<Mat>& params,
                       const std::function<ValueGraph::NodeId(ValueGraph&, const std::vector<ValueGraph::NodeId>&)>& build) {
  auto evaluate = [&](const std::vector<Mat>& p, std::vector<Mat>* grads) {
    ValueGraph g;
    std::vector<ValueGraph::NodeId> ids;
    for (std::size_t i = 0; i < p.size(); ++i) ids.push_back(g.parameter(i, p[i]));
    const auto loss = build(g, ids);
    if (grads) {
      g.backward(loss);
      *grads = g.parameter_gradients(p);
    }
    return g.value(loss)(0, 0);
  };
  std::vector<Mat> grads;
  evaluate(params, &grads);
  const double h = 1e-5;
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (Eigen::Index i = 0; i < params[k].size(); ++i) {
      auto up = params, dn = params;
      up[k].data()[i] += h;
      dn[k].data()[i] -= h;
      const double fd = (evaluate(up, nullptr) - evaluate(dn, nullptr)) / (2 * h);
      CHECK(rel_err(grads[k].data()[i], fd) < 1e-6);
    }
  }
}

struct LossCase {
  ScoreNet net;
  TrainingBatch batch;
  NoiseSchedule schedule;
  LossKind kind;
};

double loss_value(const LossCase& c, const ScoreNet& net) {
  return c.kind == LossKind::DSM ? dsm_loss(net, c.batch, c.schedule).value
                                 : flow_loss(net, c.batch, c.schedule, c.kind).value;
}

// Central differences over >= 200 random parameter entries of a full loss.
void check_loss_gradient(const LossCase& c) {
  LossResult r = c.kind == LossKind::DSM ? dsm_loss(c.net, c.batch, c.schedule)
                                         : flow_loss(c.net, c.batch, c.schedule, c.kind);
  const auto grads = r.gradients(c.net);
  std::mt19937_64 rng(99);
  const double h = 1e-4;
  int checked = 0, bad = 0;
  for (std::size_t k = 0; k < grads.size(); ++k) {
    std::uniform_int_distribution<Eigen::Index> pick(0, grads[k].size() - 1);
    const int draws = std::min<int>(60, static_cast<int>(grads[k].size()));
    for (int d = 0; d < draws; ++d) {
      const Eigen::Index i = pick(rng);
      ScoreNet up = c.net, dn = c.net;
      up.parameters()[k].data()[i] += h;
      dn.parameters()[k].data()[i] -= h;
      const double fd = (loss_value(c, up) - loss_value(c, dn)) / (2 * h);
      ++checked;
      if (rel_err(grads[k].data()[i], fd) > 1e-4) ++bad;
    }
  }
  CHECK(checked >= 200);
  CHECK(bad == 0);
}

}  // namespace

TEST_CASE("graph basics") {
  ValueGraph g;
  const auto w = g.parameter(0, Mat::Constant(1, 1, 3.0));
  const auto loss = g.sum(g.square(w));
  g.backward(loss);
  CHECK(g.parameter_gradients({Mat::Zero(1, 1)})[0](0, 0) == doctest::Approx(6.0));

  ValueGraph c;
  c.parameter(0, Mat::Constant(2, 2, 1.0));
  const auto k = c.sum(c.constant(Mat::Constant(2, 2, 5.0)));
  c.backward(k);
  CHECK(c.parameter_gradients({Mat::Zero(2, 2)})[0].norm() == 0.0);

  ValueGraph n;
  const auto m = n.parameter(0, Mat::Ones(2, 2));
  CHECK_THROWS(n.backward(m));
  CHECK_THROWS_AS(n.matmul(m, n.constant(Mat::Ones(3, 1))), DimensionError);
}

TEST_CASE("every op kind matches finite differences") {
  std::mt19937_64 rng(1);
  const Mat a = random_mat(3, 4, rng), b = random_mat(3, 4, rng), w = random_mat(4, 2, rng), bias = random_mat(1, 4, rng);
  const Vec rw = random_mat(3, 1, rng).col(0);
  using Ids = std::vector<ValueGraph::NodeId>;
  check_op_gradient({a, w}, [](ValueGraph& g, const Ids& p) { return g.sum(g.square(g.matmul(p[0], p[1]))); });
  check_op_gradient({a, bias}, [](ValueGraph& g, const Ids& p) { return g.sum(g.square(g.add_bias(p[0], p[1]))); });
  check_op_gradient({a, b}, [](ValueGraph& g, const Ids& p) { return g.sum(g.mul(g.add(p[0], p[1]), g.sub(p[0], p[1]))); });
  check_op_gradient({a}, [](ValueGraph& g, const Ids& p) { return g.sum(g.silu(p[0])); });
  check_op_gradient({a}, [](ValueGraph& g, const Ids& p) { return g.sum(g.square(g.scale(p[0], -1.7))); });
  check_op_gradient({a}, [&rw](ValueGraph& g, const Ids& p) { return g.sum(g.square(g.scale_rows(p[0], rw))); });
  check_op_gradient({a, b}, [](ValueGraph& g, const Ids& p) { return g.sum(g.silu(g.concat_cols(p[0], p[1]))); });
}

TEST_CASE("zero network outputs zero and forward is deterministic") {
  const Vec x0 = Vec::Constant(1, 0.7);
  NetShape shape;
  shape.vocab = 2;
  const ScoreNet zero(shape);
  CHECK(zero.forward(x0, 0.3, 1).norm() == 0.0);
  std::mt19937_64 rng(4);
  const ScoreNet net = ScoreNet::initialized(shape, rng);
  const Vec first = net.forward(x0, 0.3, 0);
  const Vec again = net.forward(x0, 0.3, 0);
  CHECK(first(0) == again(0));
  CHECK(first.size() == 1);
  CHECK(net.forward(x0, 0.3, kNullCondition).size() == 1);
  CHECK_THROWS_AS(net.forward(x0, 0.3, 2), DomainError);
  CHECK_THROWS_AS(net.forward(x0, 0.3, -5), DomainError);
  // Batched forward agrees with single-point forward.
  Mat xs(2, 1);
  xs << 0.7, -0.2;
  const Mat batched = net.forward(xs, Vec::Constant(2, 0.3), std::vector<Condition>{0, 0});
  CHECK(batched(0, 0) == first(0));
}

TEST_CASE("time embedding layout") {
  const Mat e = time_embedding(Vec::Constant(1, 0.0), 16);
  CHECK(e.cols() == 16);
  for (int i = 0; i < 8; ++i) {
    CHECK(e(0, i) == 0.0);
    CHECK(e(0, 8 + i) == 1.0);
  }
  const Mat f = time_embedding(Vec::Constant(1, 0.5), 16);
  CHECK(f(0, 0) == doctest::Approx(std::sin(0.5)));
  CHECK(f(0, 7) == doctest::Approx(std::sin(500.0)));
}

TEST_CASE("adam update") {
  std::vector<Mat> p{Mat::Constant(2, 2, 1.5)};
  AdamState state;
  AdamConfig cfg;
  adam_update(p, {Mat::Zero(2, 2)}, state, cfg);
  CHECK(p[0](0, 0) == 1.5);

  std::vector<Mat> q{Mat::Zero(1, 2)};
  AdamState s2;
  Mat g(1, 2);
  g << 3.0, -0.02;
  adam_update(q, {g}, s2, cfg);
  CHECK(q[0](0, 0) == doctest::Approx(-cfg.lr).epsilon(1e-5));
  CHECK(q[0](0, 1) == doctest::Approx(cfg.lr).epsilon(1e-5));
  CHECK_THROWS_AS(adam_update(q, {Mat::Zero(2, 2)}, s2, cfg), DimensionError);

  std::vector<Mat> w{Mat::Constant(1, 4, 2.0)};
  AdamState s3;
  AdamConfig fast;
  fast.lr = 0.05;
  const double start = w[0].squaredNorm();
  for (int i = 0; i < 500; ++i) adam_update(w, {2.0 * w[0]}, s3, fast);
  CHECK(w[0].squaredNorm() < 1e-6 * start);
}

TEST_CASE("DSM targets and losses") {
  const auto vp = NoiseSchedule::vp();
  std::mt19937_64 rng(8);
  const MixtureSource point(MixtureDensity({{1.0, Vec::Zero(1), 1e-9}}));
  TrainingBatch batch = draw_batch(point, 64, vp, LossKind::DSM, false, 0.0, rng);
  batch.x0.setZero();
  const Mat xt = noised_inputs(batch, vp);
  const Mat target = dsm_target(batch, vp);
  for (Eigen::Index i = 0; i < xt.rows(); ++i) {
    const double sigma = vp_alpha_sigma(vp, batch.t(i)).sigma;
    CHECK(target(i, 0) == doctest::Approx(-xt(i, 0) / (sigma * sigma)));
  }
  // An oracle network reproducing the target exactly has zero loss.
  const ScoreNet zero(NetShape{});
  const Mat feats = zero.features(xt, batch.t, batch.conditions);
  CHECK(weighted_mse(zero, feats, Mat::Zero(64, 1), Vec::Ones(64)).value == 0.0);
  CHECK(dsm_loss(zero, batch, vp).value > 0.0);
  TrainingBatch empty = batch;
  empty.x0.resize(0, 1);
  empty.eps.resize(0, 1);
  empty.t.resize(0);
  empty.conditions.clear();
  CHECK_THROWS(dsm_loss(zero, empty, vp));
  CHECK_THROWS(dsm_loss(zero, batch, NoiseSchedule::rf()));
}

TEST_CASE("flow targets") {
  const auto rf = NoiseSchedule::rf();
  std::mt19937_64 rng(9);
  const MixtureSource data(MixtureDensity::line({-1.0, 1.0}, 0.3));
  TrainingBatch batch = draw_batch(data, 500, rf, LossKind::RF, false, 0.0, rng);
  const Mat rft = rf_target(batch), cfm = cfm_target(batch, rf);
  for (Eigen::Index i = 0; i < rft.rows(); ++i) {
    CHECK(batch.t(i) >= rf.t_eps);
    CHECK(batch.t(i) <= 1.0 - rf.t_eps);
    CHECK(std::abs(cfm(i, 0) - rft(i, 0)) <= 1e-10 * std::max(1.0, std::abs(rft(i, 0))));
  }
  batch.t.setConstant(0.5);
  const Mat z = noised_inputs(batch, rf);
  CHECK(z(0, 0) == doctest::Approx(0.5 * (batch.x0(0, 0) + batch.eps(0, 0))));
  batch.eps = batch.x0;
  const ScoreNet zero(NetShape{});
  CHECK(flow_loss(zero, batch, rf, LossKind::RF).value == 0.0);
  CHECK_THROWS(flow_loss(zero, batch, NoiseSchedule::vp(), LossKind::RF));
}

TEST_CASE("condition drop rate") {
  const auto vp = NoiseSchedule::vp();
  std::mt19937_64 rng(10);
  const MixtureSource data(MixtureDensity::line({-1.0, 1.0}, 0.05));
  const auto batch = draw_batch(data, 100000, vp, LossKind::DSM, true, 0.1, rng);
  long dropped = 0;
  for (auto c : batch.conditions) dropped += c == kNullCondition;
  const double se = std::sqrt(0.1 * 0.9 / 1e5);
  CHECK(std::abs(dropped / 1e5 - 0.1) < 3 * se);
}

TEST_CASE("full loss gradients match finite differences") {
  std::mt19937_64 rng(12);
  NetShape shape;
  shape.hidden = {32, 32};
  shape.vocab = 2;
  const MixtureSource data(MixtureDensity::line({-1.0, 1.0}, 0.05));
  const auto vp = NoiseSchedule::vp();
  check_loss_gradient({ScoreNet::initialized(shape, rng), draw_batch(data, 32, vp, LossKind::DSM, true, 0.1, rng), vp,
                       LossKind::DSM});
  NetShape flat = shape;
  flat.data_dim = 2;
  flat.vocab = 0;
  const SwirlSource swirl{SwirlSpec{}};
  const auto rf = NoiseSchedule::rf();
  check_loss_gradient({ScoreNet::initialized(flat, rng), draw_batch(swirl, 32, rf, LossKind::RF, false, 0.0, rng), rf,
                       LossKind::RF});
}

TEST_CASE("training: zero steps, determinism, loss decrease") {
  const MixtureSource data(MixtureDensity::line({-1.0, 1.0}, 0.05));
  const auto vp = NoiseSchedule::vp();
  NetShape shape;
  shape.hidden = {32, 32};
  std::mt19937_64 rng(2);
  const ScoreNet init = ScoreNet::initialized(shape, rng);
  TrainConfig cfg;
  cfg.steps = 0;
  const auto none = train(init, cfg, data, vp);
  CHECK(none.net.parameters()[0] == init.parameters()[0]);

  cfg.steps = 300;
  cfg.batch_size = 64;
  cfg.seed = 5;
  const auto a = train(init, cfg, data, vp);
  const auto b = train(init, cfg, data, vp);
  REQUIRE(a.trace.size() == 3);
  for (std::size_t i = 0; i < a.trace.size(); ++i) CHECK(a.trace[i].loss == b.trace[i].loss);
  CHECK(a.trace.back().loss < a.trace.front().loss);

  TrainConfig bad = cfg;
  bad.drop_prob = 1.5;
  CHECK_THROWS(train(init, bad, data, vp));
  bad = cfg;
  bad.adam.lr = 1e30;
  CHECK_THROWS_WITH_AS(train(init, bad, data, vp), doctest::Contains("step"), NumericalError);
}

TEST_CASE("checkpoint round trip") {
  NetShape shape;
  shape.data_dim = 2;
  shape.vocab = 3;
  shape.hidden = {8, 5};
  std::mt19937_64 rng(13);
  const ScoreNet net = ScoreNet::initialized(shape, rng);
  std::stringstream buf;
  save_checkpoint(net, buf);
  CHECK(buf.str().rfind("SGLAB1", 0) == 0);
  const ScoreNet back = load_checkpoint(buf);
  CHECK(back.shape() == shape);
  for (std::size_t i = 0; i < net.parameters().size(); ++i) CHECK(back.parameters()[i] == net.parameters()[i]);
  std::stringstream junk("NOTSGL");
  CHECK_THROWS(load_checkpoint(junk));
  CHECK_THROWS_WITH(load_checkpoint(std::string("/nonexistent/model.sglab")), doctest::Contains("missing checkpoint"));
}
