#include "sglab/commands.hpp"

#include "sglab/analytic.hpp"
#include "sglab/io.hpp"
#include "sglab/nn/checkpoint.hpp"
#include "sglab/nn/train.hpp"
#include "sglab/oracle.hpp"
#include "sglab/svg.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace sglab {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

Verb verb_from_string(const std::string& text) {
  if (text == "train") return Verb::Train;
  if (text == "sample") return Verb::Sample;
  if (text == "eval") return Verb::Eval;
  if (text == "sweep") return Verb::Sweep;
  if (text == "oracle") return Verb::Oracle;
  if (text == "figures") return Verb::Figures;
  throw ConfigError("unknown verb '" + text + "'");
}

std::string to_string(Verb verb) {
  switch (verb) {
    case Verb::Train: return "train";
    case Verb::Sample: return "sample";
    case Verb::Eval: return "eval";
    case Verb::Sweep: return "sweep";
    case Verb::Oracle: return "oracle";
    case Verb::Figures: return "figures";
  }
  return "train";
}

std::string resolve_output_dir(const ExperimentConfig& config) {
  const fs::path dir(config.output_dir);
  if (const char* root = std::getenv("SGLAB_OUTPUT_ROOT"); root && *root && dir.is_relative()) {
    return (fs::path(root) / dir).string();
  }
  return dir.string();
}

std::string resolve_checkpoint(const ExperimentConfig& config) {
  if (!config.field.checkpoint.empty()) return config.field.checkpoint;
  return (fs::path(resolve_output_dir(config)) / "model.sglab").string();
}

MixtureDensity make_mixture(const ExperimentConfig& config) {
  if (config.data.kind == DataKind::Swirl) return SwirlManifold(config.data.swirl).mixture_approximation();
  if (config.data.kind != DataKind::Mixture) throw ConfigError("data.kind: an analytic mixture is required");
  const auto& d = config.data;
  if (d.weights.empty()) return MixtureDensity::line(d.modes, d.std);
  double total = 0.0;
  for (double w : d.weights) total += w;
  std::vector<MixtureComponent> comps;
  for (std::size_t i = 0; i < d.modes.size(); ++i) comps.push_back({d.weights[i] / total, Vec::Constant(1, d.modes[i]), d.std});
  double rest = 0.0;
  for (std::size_t i = 1; i < comps.size(); ++i) rest += comps[i].weight;
  comps.front().weight = 1.0 - rest;
  return MixtureDensity(std::move(comps));
}

std::unique_ptr<DataSource> make_data_source(const ExperimentConfig& config) {
  switch (config.data.kind) {
    case DataKind::Mixture:
      return std::make_unique<MixtureSource>(make_mixture(config));
    case DataKind::Swirl:
      return std::make_unique<SwirlSource>(config.data.swirl);
    case DataKind::File:
      return std::make_unique<SampleFileSource>(SampleFileSource::load_csv(config.data.file));
  }
  throw ConfigError("data.kind: unsupported");
}

std::unique_ptr<ScoreField> make_field(const ExperimentConfig& config) {
  if (config.field.kind == FieldKind::Analytic) {
    return std::make_unique<AnalyticField>(make_mixture(config), config.schedule);
  }
  const std::string path = resolve_checkpoint(config);
  if (!fs::exists(path)) throw std::runtime_error("missing checkpoint " + path + " (run train first)");
  auto net = std::make_shared<nn::ScoreNet>(nn::load_checkpoint(path));
  return std::make_unique<NetField>(std::move(net), config.schedule);
}

namespace {

GridSpec eval_box(const ExperimentConfig& config, int dim, int resolution) {
  if (dim == 1) return GridSpec::line(config.eval.box_lower, config.eval.box_upper, resolution);
  return GridSpec::square(config.eval.box_lower, config.eval.box_upper, resolution);
}

}  // namespace

MetricReport evaluate_samples(const ExperimentConfig& config, const Mat& samples) {
  MetricReport report;
  report.add_provenance("seed", std::to_string(config.seed));
  if (samples.rows() == 0) return report;
  const int dim = static_cast<int>(samples.cols());
  const GridSpec box = eval_box(config, dim, config.eval.resolution);
  const Histogram hist = histogram_density(samples, box);
  if (config.data.kind != DataKind::File) {
    // Ground truth is the data diffused to the chain's final time.
    const DensityGrid truth = diffused_density_grid(make_mixture(config), config.schedule, config.sampler.config.t_end, box);
    report.add("tv_distance", tv_distance(hist.grid, truth));
  }
  report.add("escaped_mass", hist.escaped_fraction);
  if (dim == 1) {
    const double lo = config.eval.valley_lo, hi = config.eval.valley_hi;
    report.add("valley_mass", valley_mass(samples, lo, hi));
    report.add("valley_mass_se",
               bootstrap_se(samples, [&](const Mat& m) { return valley_mass(m, lo, hi); }, config.eval.bootstrap,
                            config.seed + 7));
  }
  if (config.data.kind == DataKind::Swirl) {
    const SwirlManifold manifold(config.data.swirl);
    const SwirlStats s = swirl_outlier_stats(samples, manifold, config.eval.epsilon);
    report.add("outlier_fraction", s.outlier_fraction);
    report.add("mean_manifold_distance", s.mean_manifold_distance);
    report.add("mode_recall", s.mode_recall);
  }
  return report;
}

std::string sidecar_json(const ExperimentConfig& config, Verb verb, const MetricReport* report, const SampleRun* run) {
  json j;
  j["format"] = "sglab-run-1";
  j["verb"] = to_string(verb);
  for (const auto& [k, v] : config_entries(config)) j["config." + k] = v;
  if (report) {
    for (const auto& [k, v] : report->metrics()) j["metric." + k] = std::isfinite(v) ? json(v) : json(nullptr);
  }
  if (run) {
    j["run.n"] = run->samples.rows();
    j["run.dim"] = run->samples.cols();
    j["run.steps"] = run->calls_per_step.size();
    j["run.total_calls"] = run->total_calls();
    j["run.calls_per_step"] = run->calls_per_step;
    j["run.total_seconds"] = run->total_seconds();
  }
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_sidecar(const std::string& json_text) {
  const json j = json::parse(json_text);
  std::string text;
  for (const auto& key : config_keys()) {
    const auto it = j.find("config." + key);
    if (it == j.end()) throw ConfigError("sidecar lacks config." + key);
    text += key + " = " + it->get<std::string>() + "\n";
  }
  return parse_config_text(text);
}

std::vector<std::string> emit_report(const ExperimentConfig& config, Verb verb, const MetricReport& report,
                                     const SampleRun* run, const std::string& dir) {
  std::vector<std::string> files;
  const fs::path root(dir);
  write_file((root / "metrics.csv").string(), report.to_csv());
  files.push_back((root / "metrics.csv").string());
  if (run) {
    std::ostringstream ss;
    write_samples_csv(run->samples, ss);
    write_file((root / "samples.csv").string(), ss.str());
    files.push_back((root / "samples.csv").string());
    if (!run->trajectory.empty()) {
      std::ostringstream tr;
      tr << "step,time,chain" << (run->samples.cols() == 2 ? ",x,y\n" : ",x\n");
      for (std::size_t k = 0; k < run->trajectory.size(); ++k) {
        const Mat& m = run->trajectory[k];
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
          tr << k << ',' << format_double(run->times[k]) << ',' << r;
          for (Eigen::Index c = 0; c < m.cols(); ++c) tr << ',' << format_double(m(r, c));
          tr << '\n';
        }
      }
      write_file((root / "trajectory.csv").string(), tr.str());
      files.push_back((root / "trajectory.csv").string());
    }
  }
  write_file((root / "run.json").string(), sidecar_json(config, verb, &report, run));
  files.push_back((root / "run.json").string());
  return files;
}

const std::vector<std::string>& figure_files() {
  static const std::vector<std::string> files{"fig_two_mode.svg", "fig_sg_prev.svg", "fig_swirl.svg", "run.json"};
  return files;
}

namespace {

int do_train(const ExperimentConfig& config, std::ostream& log) {
  const auto data = make_data_source(config);
  nn::NetShape shape;
  shape.data_dim = data->dim();
  shape.time_embed = config.train.time_embed;
  shape.hidden = config.train.hidden;
  shape.vocab = config.train.config.conditional ? data->label_count() : 0;
  nn::TrainConfig tc = config.train.config;
  tc.seed = config.seed;
  std::mt19937_64 init_rng(config.seed ^ 0x5eedULL);
  auto result = nn::train(nn::ScoreNet::initialized(shape, init_rng), tc, *data, config.schedule,
                          [&log](const nn::LossPoint& p) {
                            if (p.step % 1000 == 0) log << "step " << p.step << " loss " << p.loss << '\n';
                          });
  const std::string dir = resolve_output_dir(config);
  const std::string ckpt = resolve_checkpoint(config);
  nn::save_checkpoint(result.net, ckpt);
  nn::write_loss_trace(result.trace, (fs::path(dir) / "loss.csv").string());
  MetricReport report;
  if (!result.trace.empty()) report.add("final_loss", result.trace.back().loss);
  write_file((fs::path(dir) / "run.json").string(), sidecar_json(config, Verb::Train, &report, nullptr));
  log << "checkpoint written to " << ckpt << '\n';
  return 0;
}

SampleRun sample_with(const ExperimentConfig& config, const ScoreField& field) {
  SamplerConfig sc = config.sampler.config;
  sc.seed = config.seed;
  return run_chain(field, config.guidance, sc, config.sampler.n);
}

int do_sample(const ExperimentConfig& config, bool with_metrics, std::ostream& log) {
  const auto field = make_field(config);
  const SampleRun run = sample_with(config, *field);
  const MetricReport report = with_metrics ? evaluate_samples(config, run.samples) : MetricReport{};
  const auto files = emit_report(config, with_metrics ? Verb::Eval : Verb::Sample, report, &run, resolve_output_dir(config));
  for (const auto& f : files) log << "wrote " << f << '\n';
  return 0;
}

std::string point_name(double omega, double shift) {
  return "omega_" + format_double(omega) + "_shift_" + format_double(shift);
}

int do_sweep(const ExperimentConfig& config, std::ostream& log) {
  const auto field = make_field(config);
  std::vector<std::pair<double, double>> grid;
  for (double w : config.sweep.omegas) {
    for (double s : config.sweep.shifts) grid.emplace_back(w, s);
  }
  std::vector<MetricReport> reports(grid.size());
  std::vector<std::string> errors(grid.size());
  std::atomic<std::size_t> next{0};
  const fs::path root = fs::path(resolve_output_dir(config)) / "sweep";
  auto worker = [&]() {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        ExperimentConfig cfg = config;
        cfg.guidance.omega_sg = grid[i].first;
        if (cfg.guidance.shift.kind == ShiftKind::Prev) {
          cfg.guidance.shift.value = grid[i].second;
        } else if (grid[i].second > 0.0) {
          cfg.guidance.shift.value = grid[i].second;
        } else {
          cfg.guidance.omega_sg = 0.0;  // a zero shift makes the SG term vanish
        }
        const SampleRun run = sample_with(cfg, *field);
        reports[i] = evaluate_samples(cfg, run.samples);
        emit_report(cfg, Verb::Sweep, reports[i], &run, (root / point_name(grid[i].first, grid[i].second)).string());
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int workers = std::min<int>(config.sweep.workers, static_cast<int>(grid.size()));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!errors[i].empty()) throw std::runtime_error("sweep point " + point_name(grid[i].first, grid[i].second) + ": " + errors[i]);
  }
  std::ostringstream csv;
  csv << "omega,shift";
  for (const auto& [k, v] : reports.front().metrics()) csv << ',' << k;
  csv << '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv << format_double(grid[i].first) << ',' << format_double(grid[i].second);
    for (const auto& [k, v] : reports[i].metrics()) csv << ',' << format_double(v);
    csv << '\n';
  }
  const std::string path = (fs::path(resolve_output_dir(config)) / "sweep.csv").string();
  write_file(path, csv.str());
  log << "wrote " << path << " (" << grid.size() << " points)\n";
  return 0;
}

DensityGrid prior_grid(const GridSpec& box) {
  return grid_from_log_values(box, MixtureDensity::standard_normal(box.dim()).log_density(box.centers()));
}

int do_oracle(const ExperimentConfig& config, std::ostream& log) {
  const auto field = make_field(config);
  SamplerConfig sc = config.sampler.config;
  sc.seed = config.seed;
  const int dim = field->dim();
  const GridSpec box = eval_box(config, dim, config.oracle.resolution);
  FokkerPlanckProblem problem = reverse_process_problem(*field, config.guidance, sc);
  problem.cfl = config.oracle.cfl;
  const DensityGrid evolved = fokker_planck_evolve(prior_grid(box), problem);
  const SampleRun run = run_chain(*field, config.guidance, sc, config.sampler.n);
  const Histogram hist = histogram_density(run.samples, box);
  MetricReport report;
  report.add("tv_oracle_vs_particles", tv_distance(evolved, hist.grid));
  report.add("oracle_mass", evolved.mass());
  report.add("escaped_mass", hist.escaped_fraction);
  const std::string dir = resolve_output_dir(config);
  evolved.write_csv((fs::path(dir) / "oracle_grid.csv").string());
  emit_report(config, Verb::Oracle, report, &run, dir);
  log << "oracle TV vs particles: " << report.at("tv_oracle_vs_particles") << '\n';
  return 0;
}

std::vector<double> grid_x(const DensityGrid& g) {
  std::vector<double> x;
  for (std::size_t i = 0; i < g.size(); ++i) x.push_back(g.spec().center(i)(0));
  return x;
}

int do_figures(const ExperimentConfig& config, std::ostream& log) {
  const std::string dir = resolve_output_dir(config);
  const MixtureDensity two_mode =
      config.data.kind == DataKind::Mixture ? make_mixture(config) : MixtureDensity::line({-1.0, 1.0}, 0.05);
  const NoiseSchedule vp = config.schedule.kind == ProcessKind::VP ? config.schedule : NoiseSchedule::vp();
  const GridSpec line = GridSpec::line(-2.0, 2.0, 400);
  {
    const double t = 0.38, delta = 0.2;
    svg::Canvas c(1200, 340);
    const auto p_t = diffused_density_grid(two_mode, vp, t, line);
    const auto p_shift = diffused_density_grid(two_mode, vp, t + delta, line);
    const auto p_sg = sg_density_grid(two_mode, vp, t, delta, 1.0, line);
    const auto xs = grid_x(p_t);
    c.line_panel({30, 30, 360, 270}, "(a) t = 0.38",
                 {{xs, p_t.values(), "#1f77b4", "p_t"},
                  {xs, p_shift.values(), "#2ca02c", "p_t+delta"},
                  {xs, p_sg.values(), "#d62728", "SG, omega = 1"}});
    std::vector<svg::Series> by_omega;
    const char* colors[] = {"#1f77b4", "#ff7f0e", "#9467bd", "#d62728"};
    for (int w = 0; w <= 3; ++w) {
      by_omega.push_back({xs, sg_density_grid(two_mode, vp, t, delta, w, line).values(), colors[w],
                          "omega = " + std::to_string(w)});
    }
    c.line_panel({420, 30, 360, 270}, "(b) SG density by omega", by_omega);
    c.line_panel({810, 30, 360, 270}, "(c) ground truth",
                 {{xs, diffused_density_grid(two_mode, vp, 0.0, line).values(), "#000000", "q_d"}});
    c.save((fs::path(dir) / "fig_two_mode.svg").string());
  }
  {
    svg::Canvas c(800, 340);
    const double delta = vp.to_continuous(10.0);
    const double prev_gap = 1.0 / SamplerConfig::defaults(SamplerKind::DDIM).steps;
    double x = 30;
    for (double t : {0.75, 0.25}) {
      const auto p_t = diffused_density_grid(two_mode, vp, t, line);
      const auto xs = grid_x(p_t);
      c.line_panel({x, 30, 360, 270}, "t = " + format_double(t),
                   {{xs, p_t.values(), "#1f77b4", "p_t"},
                    {xs, diffused_density_grid(two_mode, vp, t + delta, line).values(), "#2ca02c", "p_t+delta"},
                    {xs, diffused_density_grid(two_mode, vp, t + prev_gap, line).values(), "#7f7f7f", "previous step"}});
      x += 390;
    }
    c.save((fs::path(dir) / "fig_sg_prev.svg").string());
  }
  {
    ExperimentConfig swirl_cfg = config;
    std::unique_ptr<ScoreField> field;
    if (config.data.kind == DataKind::Swirl && config.field.kind == FieldKind::Learned) {
      field = make_field(config);
    } else {
      swirl_cfg.data.kind = DataKind::Swirl;
      swirl_cfg.schedule = NoiseSchedule::rf();
      field = std::make_unique<AnalyticField>(SwirlManifold(swirl_cfg.data.swirl).mixture_approximation(),
                                              swirl_cfg.schedule);
    }
    SamplerConfig sc = SamplerConfig::defaults(SamplerKind::ODE);
    sc.seed = config.seed;
    const std::size_t n = std::min<std::size_t>(config.sampler.n, 4000);
    svg::Canvas c(1500, 330);
    const int hn = 60;
    const GridSpec hb = GridSpec::square(-3.0, 3.0, hn);
    const Mat pts = hb.centers();
    const double t_last = time_grid(sc)[static_cast<std::size_t>(sc.steps - 1)];
    const Mat v = field->evaluate(pts, t_last, kNullCondition);
    std::vector<double> mag(static_cast<std::size_t>(hn * hn));
    for (Eigen::Index r = 0; r < v.rows(); ++r) mag[static_cast<std::size_t>(r)] = v.row(r).norm();
    c.heatmap_panel({20, 30, 270, 270}, "(a) |v| at the last step", mag, hn, -3.0, 3.0);
    double x = 310;
    for (double w : {0.0, 1.0, 3.0, 7.0}) {
      GuidanceStack g = config.guidance;
      g.omega_cfg = 0.0;
      g.condition = kNullCondition;
      g.omega_sg = w;
      if (g.shift.kind == ShiftKind::Prev) g.shift = ShiftSchedule{};
      const SampleRun run = run_chain(*field, g, sc, n);
      c.scatter_panel({x, 30, 270, 270}, "omega = " + format_double(w), run.samples, -3.0, 3.0, "#1f77b4");
      x += 295;
    }
    c.save((fs::path(dir) / "fig_swirl.svg").string());
  }
  write_file((fs::path(dir) / "run.json").string(), sidecar_json(config, Verb::Figures, nullptr, nullptr));
  for (const auto& f : figure_files()) log << "wrote " << (fs::path(dir) / f).string() << '\n';
  return 0;
}

}  // namespace

int run_command(Verb verb, const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  switch (verb) {
    case Verb::Train:
      return do_train(config, log);
    case Verb::Sample:
      return do_sample(config, false, log);
    case Verb::Eval:
      return do_sample(config, true, log);
    case Verb::Sweep:
      return do_sweep(config, log);
    case Verb::Oracle:
      return do_oracle(config, log);
    case Verb::Figures:
      return do_figures(config, log);
  }
  return 1;
}

}  // namespace sglab
