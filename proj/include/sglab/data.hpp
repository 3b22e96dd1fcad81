#pragma once

#include "sglab/mixture.hpp"
#include "sglab/swirl.hpp"

#include <memory>
#include <random>
#include <string>
#include <vector>

namespace sglab {

/// Source of clean training samples x_0, optionally with class labels.
class DataSource {
 public:
  virtual ~DataSource() = default;
  virtual int dim() const = 0;
  /// Number of distinct labels; 0 for unlabelled data.
  virtual int label_count() const = 0;
  virtual Mat sample(std::size_t n, std::mt19937_64& rng, std::vector<int>* labels) const = 0;
};

class MixtureSource : public DataSource {
 public:
  explicit MixtureSource(MixtureDensity mixture) : mixture_(std::move(mixture)) {}
  int dim() const override { return mixture_.dim(); }
  int label_count() const override { return static_cast<int>(mixture_.size()); }
  Mat sample(std::size_t n, std::mt19937_64& rng, std::vector<int>* labels) const override {
    return mixture_.sample(n, rng, labels);
  }
  const MixtureDensity& mixture() const { return mixture_; }

 private:
  MixtureDensity mixture_;
};

/// Raw double-swirl samples; the label is the arm index.
class SwirlSource : public DataSource {
 public:
  explicit SwirlSource(SwirlSpec spec) : manifold_(spec) {}
  int dim() const override { return 2; }
  int label_count() const override { return 2; }
  Mat sample(std::size_t n, std::mt19937_64& rng, std::vector<int>* labels) const override {
    return manifold_.sample(n, rng, labels);
  }
  const SwirlManifold& manifold() const { return manifold_; }

 private:
  SwirlManifold manifold_;
};

/// Resamples rows of a fixed sample matrix with replacement.
class SampleFileSource : public DataSource {
 public:
  explicit SampleFileSource(Mat rows);
  static SampleFileSource load_csv(const std::string& path);
  int dim() const override { return static_cast<int>(rows_.cols()); }
  int label_count() const override { return 0; }
  Mat sample(std::size_t n, std::mt19937_64& rng, std::vector<int>* labels) const override;

 private:
  Mat rows_;
};

/// Reads a numeric CSV with a header line; returns one row per record.
Mat read_samples_csv(const std::string& path);
void write_samples_csv(const Mat& samples, std::ostream& out);

}  // namespace sglab
