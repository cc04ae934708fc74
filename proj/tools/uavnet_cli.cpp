#include <CLI11.hpp>

#include <iostream>

#include "uavnet/config.hpp"
#include "uavnet/errors.hpp"
#include "uavnet/experiment.hpp"
#include "uavnet/figures.hpp"

int main(int argc, char** argv) {
  CLI::App app{"UAV-assisted vehicular network experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::size_t jobs = 1;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "train and evaluate every run of a config");
  run->add_option("config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("-j,--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
  run->add_option("-o,--out", out_dir, "override output_dir");

  std::string kind;
  std::string metrics_dir;
  auto* figure = app.add_subcommand("figure", "write plot-ready tables from a finished experiment");
  figure->add_option("kind", kind, "reward_curve | rate_vs_K | rate_vs_delay | energy_vs_slot | tradeoff_vs_V | runtime_table")
      ->required();
  figure->add_option("dir", metrics_dir, "experiment output directory")->required()->check(CLI::ExistingDirectory);

  auto* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto config = uavnet::load_config(config_path);
      if (!out_dir.empty()) config.output_dir = out_dir;
      const auto runs = uavnet::run_experiment(config, jobs);
      std::cout << "wrote " << runs.size() << " runs to " << config.output_dir.string() << '\n';
    } else if (*figure) {
      const auto path = uavnet::emit_figure_data(metrics_dir, uavnet::figure_kind_from_string(kind));
      std::cout << path.string() << '\n';
    } else if (*validate) {
      const auto config = uavnet::load_config(config_path);
      std::cout << "ok: " << uavnet::plan_runs(config).size() << " runs\n";
    }
  } catch (const uavnet::ConfigError& e) {
    std::cerr << "config error in " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
