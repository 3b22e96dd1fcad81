#include "sglab/config.hpp"

#include "sglab/data.hpp"
#include "sglab/io.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace sglab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) { return parse_double(v); }

long to_long(const std::string& v) {
  std::size_t pos = 0;
  const long out = std::stol(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("not an integer: '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& v) {
  if (!v.empty() && v.front() == '-') throw std::invalid_argument("expected a non-negative integer");
  std::size_t pos = 0;
  const auto out = std::stoull(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("not an integer: '" + v + "'");
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<double> to_doubles(const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(to_double(s));
  return out;
}

std::vector<int> to_ints(const std::string& v) {
  std::vector<int> out;
  for (const auto& s : split_list(v)) out.push_back(static_cast<int>(to_long(s)));
  return out;
}

std::string from_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

std::string from_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

struct KeySpec {
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define SGLAB_DOUBLE(KEY, FIELD)                                                  \
  KeySpec {                                                                       \
    KEY, [](ExperimentConfig& c, const std::string& v) { c.FIELD = to_double(v); }, \
        [](const ExperimentConfig& c) { return format_double(c.FIELD); }          \
  }

#define SGLAB_INT(KEY, FIELD, TYPE)                                                            \
  KeySpec {                                                                                    \
    KEY, [](ExperimentConfig& c, const std::string& v) { c.FIELD = static_cast<TYPE>(to_long(v)); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.FIELD); }                      \
  }

const std::vector<KeySpec>& registry() {
  static const std::vector<KeySpec> keys = {
      {"seed", [](ExperimentConfig& c, const std::string& v) { c.seed = to_u64(v); },
       [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
      {"output.dir", [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; },
       [](const ExperimentConfig& c) { return c.output_dir; }},

      {"data.kind",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "mixture") c.data.kind = DataKind::Mixture;
         else if (v == "swirl") c.data.kind = DataKind::Swirl;
         else if (v == "file") c.data.kind = DataKind::File;
         else throw std::invalid_argument("expected mixture, swirl or file");
       },
       [](const ExperimentConfig& c) {
         return std::string(c.data.kind == DataKind::Mixture ? "mixture" : c.data.kind == DataKind::Swirl ? "swirl" : "file");
       }},
      {"data.modes", [](ExperimentConfig& c, const std::string& v) { c.data.modes = to_doubles(v); },
       [](const ExperimentConfig& c) { return from_doubles(c.data.modes); }},
      {"data.weights", [](ExperimentConfig& c, const std::string& v) { c.data.weights = to_doubles(v); },
       [](const ExperimentConfig& c) { return from_doubles(c.data.weights); }},
      SGLAB_DOUBLE("data.std", data.std),
      SGLAB_DOUBLE("data.swirl.theta_start", data.swirl.theta_start),
      SGLAB_DOUBLE("data.swirl.theta_end", data.swirl.theta_end),
      SGLAB_DOUBLE("data.swirl.radius", data.swirl.radius),
      SGLAB_DOUBLE("data.swirl.jitter", data.swirl.jitter),
      {"data.file", [](ExperimentConfig& c, const std::string& v) { c.data.file = v; },
       [](const ExperimentConfig& c) { return c.data.file; }},

      {"schedule.kind",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "vp") c.schedule.kind = ProcessKind::VP;
         else if (v == "rf") c.schedule.kind = ProcessKind::RF;
         else throw std::invalid_argument("expected vp or rf");
       },
       [](const ExperimentConfig& c) { return std::string(c.schedule.kind == ProcessKind::VP ? "vp" : "rf"); }},
      SGLAB_DOUBLE("schedule.beta_min", schedule.beta_min),
      SGLAB_DOUBLE("schedule.beta_max", schedule.beta_max),
      SGLAB_INT("schedule.discretization_steps", schedule.discretization_steps, int),
      SGLAB_DOUBLE("schedule.t_eps", schedule.t_eps),

      {"train.loss",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "dsm") c.train.config.loss = nn::LossKind::DSM;
         else if (v == "cfm") c.train.config.loss = nn::LossKind::CFM;
         else if (v == "rf") c.train.config.loss = nn::LossKind::RF;
         else throw std::invalid_argument("expected dsm, cfm or rf");
       },
       [](const ExperimentConfig& c) {
         const auto k = c.train.config.loss;
         return std::string(k == nn::LossKind::DSM ? "dsm" : k == nn::LossKind::CFM ? "cfm" : "rf");
       }},
      {"train.weighting",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "sigma2") c.train.config.weighting = nn::Weighting::Sigma2;
         else if (v == "unit") c.train.config.weighting = nn::Weighting::Unit;
         else throw std::invalid_argument("expected sigma2 or unit");
       },
       [](const ExperimentConfig& c) {
         return std::string(c.train.config.weighting == nn::Weighting::Sigma2 ? "sigma2" : "unit");
       }},
      SGLAB_INT("train.batch_size", train.config.batch_size, std::size_t),
      SGLAB_INT("train.steps", train.config.steps, long),
      SGLAB_DOUBLE("train.lr", train.config.adam.lr),
      SGLAB_DOUBLE("train.lr_final", train.config.lr_final),
      SGLAB_DOUBLE("train.beta1", train.config.adam.beta1),
      SGLAB_DOUBLE("train.beta2", train.config.adam.beta2),
      SGLAB_DOUBLE("train.adam_eps", train.config.adam.eps),
      SGLAB_DOUBLE("train.drop_prob", train.config.drop_prob),
      {"train.conditional", [](ExperimentConfig& c, const std::string& v) { c.train.config.conditional = to_bool(v); },
       [](const ExperimentConfig& c) { return from_bool(c.train.config.conditional); }},
      {"train.hidden", [](ExperimentConfig& c, const std::string& v) { c.train.hidden = to_ints(v); },
       [](const ExperimentConfig& c) { return from_ints(c.train.hidden); }},
      SGLAB_INT("train.time_embed", train.time_embed, int),
      SGLAB_INT("train.log_every", train.config.log_every, long),

      {"field.kind",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "analytic") c.field.kind = FieldKind::Analytic;
         else if (v == "learned") c.field.kind = FieldKind::Learned;
         else throw std::invalid_argument("expected analytic or learned");
       },
       [](const ExperimentConfig& c) { return std::string(c.field.kind == FieldKind::Analytic ? "analytic" : "learned"); }},
      {"field.checkpoint", [](ExperimentConfig& c, const std::string& v) { c.field.checkpoint = v; },
       [](const ExperimentConfig& c) { return c.field.checkpoint; }},

      SGLAB_DOUBLE("guidance.omega_cfg", guidance.omega_cfg),
      SGLAB_DOUBLE("guidance.omega_sg", guidance.omega_sg),
      SGLAB_DOUBLE("guidance.omega_pag", guidance.omega_pag),
      {"guidance.shift.kind", [](ExperimentConfig& c, const std::string& v) { c.guidance.shift.kind = shift_kind_from_string(v); },
       [](const ExperimentConfig& c) { return to_string(c.guidance.shift.kind); }},
      SGLAB_DOUBLE("guidance.shift.value", guidance.shift.value),
      SGLAB_DOUBLE("guidance.sg_prev_threshold", guidance.sg_prev_threshold),
      {"guidance.condition",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "null") {
           c.guidance.condition = kNullCondition;
           return;
         }
         const long id = to_long(v);
         if (id < 0) throw std::invalid_argument("condition must be a label id >= 0 or null");
         c.guidance.condition = static_cast<Condition>(id);
       },
       [](const ExperimentConfig& c) {
         return c.guidance.condition == kNullCondition ? std::string("null") : std::to_string(c.guidance.condition);
       }},

      {"sampler.kind", [](ExperimentConfig& c, const std::string& v) { c.sampler.config.kind = sampler_kind_from_string(v); },
       [](const ExperimentConfig& c) { return to_string(c.sampler.config.kind); }},
      SGLAB_INT("sampler.steps", sampler.config.steps, int),
      SGLAB_DOUBLE("sampler.tau", sampler.config.tau),
      SGLAB_DOUBLE("sampler.t_end", sampler.config.t_end),
      SGLAB_INT("sampler.n", sampler.n, std::size_t),
      {"sampler.store_trajectory",
       [](ExperimentConfig& c, const std::string& v) { c.sampler.config.store_trajectory = to_bool(v); },
       [](const ExperimentConfig& c) { return from_bool(c.sampler.config.store_trajectory); }},

      SGLAB_DOUBLE("eval.box_lower", eval.box_lower),
      SGLAB_DOUBLE("eval.box_upper", eval.box_upper),
      SGLAB_INT("eval.resolution", eval.resolution, int),
      SGLAB_DOUBLE("eval.valley_lo", eval.valley_lo),
      SGLAB_DOUBLE("eval.valley_hi", eval.valley_hi),
      SGLAB_DOUBLE("eval.epsilon", eval.epsilon),
      SGLAB_INT("eval.bootstrap", eval.bootstrap, int),

      {"sweep.omegas", [](ExperimentConfig& c, const std::string& v) { c.sweep.omegas = to_doubles(v); },
       [](const ExperimentConfig& c) { return from_doubles(c.sweep.omegas); }},
      {"sweep.shifts", [](ExperimentConfig& c, const std::string& v) { c.sweep.shifts = to_doubles(v); },
       [](const ExperimentConfig& c) { return from_doubles(c.sweep.shifts); }},
      SGLAB_INT("sweep.workers", sweep.workers, int),

      SGLAB_INT("oracle.resolution", oracle.resolution, int),
      SGLAB_DOUBLE("oracle.cfl", oracle.cfl),
  };
  return keys;
}

#undef SGLAB_DOUBLE
#undef SGLAB_INT

const KeySpec* find_key(const std::string& key) {
  for (const auto& k : registry()) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

struct Assignment {
  std::string value;
  std::string where;
};

void collect(const std::string& line, const std::string& where, std::map<std::string, Assignment>& out,
             bool allow_override) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
  const std::string key = trim(line.substr(0, eq));
  const std::string value = trim(line.substr(eq + 1));
  if (key.empty()) throw ConfigError(where + ": missing key");
  if (!find_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  if (!allow_override && out.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
  out[key] = {value, where};
}

}  // namespace

int ExperimentConfig::data_dim() const {
  switch (data.kind) {
    case DataKind::Mixture:
      return 1;
    case DataKind::Swirl:
      return 2;
    case DataKind::File:
      return SampleFileSource::load_csv(data.file).dim();
  }
  return 1;
}

void ExperimentConfig::validate() const {
  if (output_dir.empty()) throw ConfigError("output.dir must not be empty");
  if (data.kind == DataKind::Mixture) {
    if (data.modes.empty()) throw ConfigError("data.modes must list at least one mode");
    if (!data.weights.empty() && data.weights.size() != data.modes.size()) {
      throw ConfigError("data.weights must have one entry per mode");
    }
    if (!(data.std > 0.0)) throw ConfigError("data.std must be positive");
  }
  if (data.kind == DataKind::Swirl) data.swirl.validate();
  if (data.kind == DataKind::File && data.file.empty()) throw ConfigError("data.file is required for data.kind=file");
  schedule.validate();
  train.config.validate();
  nn::NetShape shape;
  shape.hidden = train.hidden;
  shape.time_embed = train.time_embed;
  shape.validate();
  if (train.config.loss == nn::LossKind::DSM && schedule.kind != ProcessKind::VP) {
    throw ConfigError("train.loss: dsm needs schedule.kind=vp");
  }
  if (train.config.loss == nn::LossKind::RF && schedule.kind != ProcessKind::RF) {
    throw ConfigError("train.loss: rf needs schedule.kind=rf");
  }
  if (field.kind == FieldKind::Analytic && data.kind == DataKind::File) {
    throw ConfigError("field.kind: analytic fields need mixture or swirl data");
  }
  guidance.validate();
  sampler.config.validate();
  if (schedule.kind == ProcessKind::RF && sampler.config.kind != SamplerKind::ODE) {
    throw ConfigError("sampler.kind: rf schedules are sampled with ode");
  }
  if (!(eval.box_upper > eval.box_lower)) throw ConfigError("eval.box_upper must exceed eval.box_lower");
  if (eval.resolution < 1) throw ConfigError("eval.resolution must be positive");
  if (!(eval.valley_hi > eval.valley_lo)) throw ConfigError("eval.valley_hi must exceed eval.valley_lo");
  if (!(eval.epsilon > 0.0)) throw ConfigError("eval.epsilon must be positive");
  if (eval.bootstrap < 2) throw ConfigError("eval.bootstrap must be >= 2");
  if (sweep.omegas.empty()) throw ConfigError("sweep.omegas must not be empty");
  if (sweep.shifts.empty()) throw ConfigError("sweep.shifts must not be empty");
  for (double w : sweep.omegas) {
    if (!(w >= 0.0)) throw ConfigError("sweep.omegas entries must be >= 0");
  }
  for (double s : sweep.shifts) {
    if (!(s >= 0.0)) throw ConfigError("sweep.shifts entries must be >= 0");
  }
  if (sweep.workers < 1) throw ConfigError("sweep.workers must be >= 1");
  if (oracle.resolution < 2) throw ConfigError("oracle.resolution must be >= 2");
  if (!(oracle.cfl > 0.0 && oracle.cfl <= 0.5)) throw ConfigError("oracle.cfl must lie in (0, 0.5]");
}

ExperimentConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides) {
  std::map<std::string, Assignment> assigned;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    collect(t, "line " + std::to_string(line_no), assigned, false);
  }
  for (const auto& o : overrides) collect(trim(o), "override '" + o + "'", assigned, true);

  ExperimentConfig cfg;
  // Kind-dependent defaults are resolved before explicit values are applied.
  for (const char* k : {"data.kind", "sampler.kind"}) {
    if (auto it = assigned.find(k); it != assigned.end()) {
      try {
        find_key(k)->set(cfg, it->second.value);
      } catch (const std::exception& e) {
        throw ConfigError(it->second.where + ": " + k + ": " + e.what());
      }
    }
  }
  cfg.sampler.config.steps = SamplerConfig::defaults(cfg.sampler.config.kind).steps;
  if (cfg.data.kind == DataKind::Swirl) {
    cfg.eval.resolution = 300;
    cfg.oracle.resolution = 150;
    cfg.schedule.kind = ProcessKind::RF;
    cfg.train.config.loss = nn::LossKind::RF;
    cfg.sampler.config.kind = SamplerKind::ODE;
    cfg.sampler.config.steps = 28;
    cfg.train.hidden = {128, 128, 128, 128};
    cfg.train.config.adam.lr = 5e-3;
    cfg.train.config.steps = 50000;
  }
  for (const auto& spec : registry()) {
    const auto it = assigned.find(spec.key);
    if (it == assigned.end()) continue;
    try {
      spec.set(cfg, it->second.value);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(it->second.where + ": " + spec.key + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path, const std::vector<std::string>& overrides) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception&) {
    throw ConfigError("missing config file " + path);
  }
  return parse_config_text(text, overrides);
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& spec : registry()) out.emplace_back(spec.key, spec.get(config));
  return out;
}

std::string echo_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [k, v] : config_entries(config)) out += k + " = " + v + "\n";
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& spec : registry()) out.push_back(spec.key);
  return out;
}

}  // namespace sglab
