#include "sglab/commands.hpp"
#include "sglab/config.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"sglab: self-guidance toy laboratory"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  bool echo = false;
  const char* verbs[][2] = {
      {"train", "train a score or velocity network and write a checkpoint"},
      {"sample", "draw guided samples"},
      {"eval", "draw guided samples and score them against the data"},
      {"sweep", "evaluate a grid of guidance and shift scales"},
      {"oracle", "evolve the guided density with the Fokker-Planck solver"},
      {"figures", "regenerate the SVG figure set"},
  };
  for (const auto& v : verbs) {
    auto* sub = app.add_subcommand(v[0], v[1]);
    sub->add_option("-c,--config", config_path, "key = value configuration file");
    sub->add_option("-s,--set", overrides, "override, e.g. guidance.omega_sg=3")->take_all();
    sub->add_flag("--echo", echo, "print the effective configuration and exit");
  }
  CLI11_PARSE(app, argc, argv);
  try {
    const auto* sub = app.get_subcommands().front();
    const sglab::Verb verb = sglab::verb_from_string(sub->get_name());
    const sglab::ExperimentConfig config = config_path.empty() ? sglab::parse_config_text("", overrides)
                                                               : sglab::parse_config_file(config_path, overrides);
    if (echo) {
      std::cout << sglab::echo_config(config);
      return 0;
    }
    return sglab::run_command(verb, config, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "sglab: " << e.what() << '\n';
    return 2;
  }
}
