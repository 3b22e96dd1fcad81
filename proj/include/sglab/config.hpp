#pragma once

#include "sglab/guidance.hpp"
#include "sglab/nn/train.hpp"
#include "sglab/sampler.hpp"
#include "sglab/schedule.hpp"
#include "sglab/swirl.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sglab {

enum class DataKind { Mixture, Swirl, File };
enum class FieldKind { Analytic, Learned };

struct DataSection {
  DataKind kind = DataKind::Mixture;
  std::vector<double> modes{-1.0, 1.0};
  // Empty means equal weights.
  std::vector<double> weights;
  double std = 0.05;
  SwirlSpec swirl;
  std::string file;
};

struct FieldSection {
  FieldKind kind = FieldKind::Analytic;
  // Empty resolves to <output.dir>/model.sglab.
  std::string checkpoint;
};

struct TrainSection {
  nn::TrainConfig config;
  std::vector<int> hidden{128, 128};
  int time_embed = 16;
};

struct SamplerSection {
  SamplerConfig config;
  std::size_t n = 10000;
};

struct EvalSection {
  double box_lower = -3.0;
  double box_upper = 3.0;
  int resolution = 600;  // per axis; 2-d data defaults to 300
  double valley_lo = -0.25;
  double valley_hi = 0.25;
  double epsilon = 0.2;
  int bootstrap = 200;
};

struct SweepSection {
  std::vector<double> omegas{0, 1, 2, 3, 4, 5};
  std::vector<double> shifts{0, 10, 20, 30, 40, 50};
  int workers = 2;
};

struct OracleSection {
  int resolution = 600;  // per axis; 2-d data defaults to 150
  double cfl = 0.4;
};

/// Flat dotted-key experiment description (e.g. guidance.omega_sg = 3).
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  DataSection data;
  NoiseSchedule schedule;
  TrainSection train;
  FieldSection field;
  GuidanceStack guidance;
  SamplerSection sampler;
  EvalSection eval;
  SweepSection sweep;
  OracleSection oracle;

  /// Data dimension implied by the data section (file data reads the header).
  int data_dim() const;
  void validate() const;
};

/// Parses key = value text. Lines starting with '#' are comments. Unknown
/// keys, duplicate keys and malformed values raise ConfigError citing the line.
ExperimentConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides = {});
ExperimentConfig parse_config_file(const std::string& path, const std::vector<std::string>& overrides = {});

/// Every key with its effective value, one per line, in a fixed order.
std::string echo_config(const ExperimentConfig& config);
/// Same content as ordered (key, value) pairs.
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& config);
std::vector<std::string> config_keys();

}  // namespace sglab
