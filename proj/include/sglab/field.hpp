#pragma once

#include "sglab/mixture.hpp"
#include "sglab/nn/net.hpp"
#include "sglab/schedule.hpp"

#include <memory>

namespace sglab {

/// Model evaluated by the samplers: s(x, t | c). For VP processes the output
/// is a score, for RF processes a velocity dz/dt.
class ScoreField {
 public:
  virtual ~ScoreField() = default;
  virtual int dim() const = 0;
  virtual const NoiseSchedule& schedule() const = 0;
  /// One point per row of x, all at time t and condition c.
  virtual Mat evaluate(const Mat& x, double t, Condition c) const = 0;
};

/// Exact outputs for Gaussian-mixture data. Condition i selects mixture
/// component i; the empty label gives the full mixture.
class AnalyticField : public ScoreField {
 public:
  AnalyticField(MixtureDensity data, NoiseSchedule schedule);
  int dim() const override { return data_.dim(); }
  const NoiseSchedule& schedule() const override { return schedule_; }
  Mat evaluate(const Mat& x, double t, Condition c) const override;

  const MixtureDensity& data() const { return data_; }
  /// Data density selected by a condition.
  MixtureDensity conditioned(Condition c) const;

 private:
  MixtureDensity data_;
  NoiseSchedule schedule_;
};

/// Exact velocity E[a' x0 + b' eps | x_t = z] for mixture data.
Mat mixture_velocity(const MixtureDensity& data, const NoiseSchedule& schedule, const Mat& z, double t);

class NetField : public ScoreField {
 public:
  NetField(std::shared_ptr<const nn::ScoreNet> net, NoiseSchedule schedule);
  int dim() const override { return net_->shape().data_dim; }
  const NoiseSchedule& schedule() const override { return schedule_; }
  Mat evaluate(const Mat& x, double t, Condition c) const override { return net_->forward(x, t, c); }

 private:
  std::shared_ptr<const nn::ScoreNet> net_;
  NoiseSchedule schedule_;
};

}  // namespace sglab
