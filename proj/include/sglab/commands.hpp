#pragma once

#include "sglab/config.hpp"
#include "sglab/data.hpp"
#include "sglab/eval.hpp"
#include "sglab/field.hpp"
#include "sglab/sampler.hpp"

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace sglab {

enum class Verb { Train, Sample, Eval, Sweep, Oracle, Figures };

Verb verb_from_string(const std::string& text);
std::string to_string(Verb verb);

/// output.dir, placed under $SGLAB_OUTPUT_ROOT when that variable is set and
/// the directory is relative.
std::string resolve_output_dir(const ExperimentConfig& config);
std::string resolve_checkpoint(const ExperimentConfig& config);

std::unique_ptr<DataSource> make_data_source(const ExperimentConfig& config);
MixtureDensity make_mixture(const ExperimentConfig& config);
std::unique_ptr<ScoreField> make_field(const ExperimentConfig& config);

/// Metrics of final samples against the configured data.
MetricReport evaluate_samples(const ExperimentConfig& config, const Mat& samples);

/// Flat JSON sidecar: "verb", "config.<key>" strings, "metric.<name>",
/// "run.total_calls", "run.calls_per_step", "run.total_seconds", "run.n", "run.dim".
std::string sidecar_json(const ExperimentConfig& config, Verb verb, const MetricReport* report, const SampleRun* run);
/// Rebuilds the configuration echoed into a sidecar.
ExperimentConfig config_from_sidecar(const std::string& json_text);

/// Writes metrics.csv, run.json and, when `run` is given, samples.csv.
std::vector<std::string> emit_report(const ExperimentConfig& config, Verb verb, const MetricReport& report,
                                     const SampleRun* run, const std::string& dir);

/// Exact file names written by the figures verb.
const std::vector<std::string>& figure_files();

/// Executes a verb; returns 0 on success. Errors propagate as exceptions.
int run_command(Verb verb, const ExperimentConfig& config, std::ostream& log);

}  // namespace sglab
