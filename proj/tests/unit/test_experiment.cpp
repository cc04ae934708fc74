#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "uavnet/errors.hpp"
#include "uavnet/experiment.hpp"
#include "uavnet/figures.hpp"

using namespace uavnet;
namespace fs = std::filesystem;

namespace {

const char* kToy = R"({
  "name": "unit",
  "scenario": {"m_links": 2, "k_links": 1, "num_slots": 4, "outage_samples": 20},
  "agent": {"kinds": ["ddpg", "random"], "hidden_width": 8, "hidden_layers": 2, "batch_size": 4, "warmup": 4},
  "episodes": 3,
  "eval_episodes": 1,
  "seeds": [1, 2]
})";

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("uavnet_unit_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

ExperimentConfig toy_config(const fs::path& out) {
  auto c = parse_config(kToy);
  c.output_dir = out;
  return c;
}

std::string config_error_field(const std::string& text) {
  try {
    validate_config(parse_config(text));
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST(Config, DefaultsMatchScenarioTable) {
  const auto c = parse_config("{}");
  EXPECT_EQ(c.scenario.m_links, 10);
  EXPECT_EQ(c.scenario.k_links, 10);
  EXPECT_EQ(c.scenario.num_slots, 100u);
  EXPECT_EQ(c.scenario.e_th, 120.0);
  EXPECT_EQ(c.scenario.outage_penalty, 10.0);
  EXPECT_EQ(c.channel.carrier_frequency, 5.9e9);
  EXPECT_EQ(c.channel.t_delay, 0.01);
  EXPECT_EQ(c.hyperparams.lr_actor, 3e-6);
  EXPECT_EQ(c.hyperparams.lr_critic, 1e-5);
  EXPECT_EQ(c.hyperparams.tau, 0.005);
  EXPECT_EQ(c.episodes, 500u);
  EXPECT_EQ(c.sweep.k_links, (std::vector<int>{10}));
  EXPECT_NO_THROW(validate_config(c));
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_EQ(config_error_field(R"({"scenario": {"m_links": "ten"}})"), "scenario.m_links");
  EXPECT_EQ(config_error_field(R"({"scenario": {"bogus": 1}})"), "scenario.bogus");
  EXPECT_EQ(config_error_field(R"({"agent": {"kinds": ["sac"]}})"), "agent.kinds");
  EXPECT_EQ(config_error_field(R"({"seeds": []})"), "seeds");
  EXPECT_EQ(config_error_field(R"({"sweep": {"k_links": [11]}})"), "sweep.k_links");
  EXPECT_EQ(config_error_field(R"({"mobility": {"trace": "/no/such/file.csv"}})"), "mobility.trace");
}

TEST(Config, ResolvedJsonRoundTrips) {
  const auto c = toy_config("x");
  const auto again = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));
}

TEST(Plan, NestingAndNonDiffusionCollapse) {
  auto c = parse_config(R"({"agent": {"kinds": ["d3pg", "ddpg"]}, "sweep": {"k_links": [2, 4], "diffusion_steps": [2, 4]},
                             "seeds": [1, 2], "scenario": {"m_links": 4, "k_links": 2}})");
  const auto runs = plan_runs(c);
  ASSERT_EQ(runs.size(), 2u * 2u * 2u + 2u * 2u);
  EXPECT_EQ(runs[0].agent, AgentKind::d3pg);
  EXPECT_EQ(runs[0].point.k_links, 2);
  EXPECT_EQ(runs[0].point.diffusion_steps, 2);
  EXPECT_EQ(runs[0].seed, 1u);
  EXPECT_EQ(runs[1].seed, 2u);
  EXPECT_EQ(runs[2].point.diffusion_steps, 4);
  EXPECT_EQ(runs.back().agent, AgentKind::ddpg);
  EXPECT_EQ(runs.back().point.diffusion_steps, 0);
  for (std::size_t i = 0; i < runs.size(); ++i) EXPECT_EQ(runs[i].run_id, i);
}

TEST(Seeds, StreamsAreDistinctAndStable) {
  EXPECT_EQ(derive_seed(1, 1), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 1), derive_seed(1, 2));
  EXPECT_NE(derive_seed(1, 1), derive_seed(2, 1));
}

TEST(Experiment, MinimalRunWritesSchema) {
  const auto dir = fresh_dir("schema");
  const auto c = toy_config(dir);
  run_experiment(c, 1);
  for (const char* f : {"metrics.csv", "eval_metrics.csv", "runs.csv", "timing.csv", "summary.json", "config.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const auto rows = csv(dir / "metrics.csv");
  EXPECT_EQ(rows[0], (std::vector<std::string>{"run_id", "seed", "episode", "slot", "reward", "mean_v2u_rate", "energy",
                                                "moving_average_energy", "queue", "outage_violations", "altitude"}));
  // 2 agents x 2 seeds x S=3 x T=4.
  EXPECT_EQ(rows.size(), 1u + 2u * 2u * 3u * 4u);
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(summary.at("runs").size(), 4u);
  EXPECT_EQ(summary.at("groups").size(), 2u);
  fs::remove_all(dir);
}

TEST(Experiment, SummaryIsSeedMean) {
  const auto dir = fresh_dir("mean");
  const auto c = toy_config(dir);
  const auto outs = run_experiment(c, 1);
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  for (const auto& g : summary.at("groups")) {
    std::vector<double> per_seed;
    for (const auto& r : summary.at("runs")) {
      if (r.at("agent") == g.at("agent")) per_seed.push_back(r.at("final_reward").get<double>());
    }
    ASSERT_EQ(per_seed.size(), 2u);
    EXPECT_EQ(g.at("final_reward").get<double>(), (per_seed[0] + per_seed[1]) / 2.0);
  }
  // final_reward recomputed from raw slot rows.
  const auto rows = csv(dir / "metrics.csv");
  std::map<std::pair<std::string, std::string>, double> episode_totals;
  for (std::size_t i = 1; i < rows.size(); ++i) episode_totals[{rows[i][0], rows[i][2]}] += std::stod(rows[i][4]);
  for (const auto& r : summary.at("runs")) {
    const std::string id = std::to_string(r.at("run_id").get<int>());
    double mean = 0.0;
    for (int e = 0; e < 3; ++e) mean += episode_totals[{id, std::to_string(e)}];
    EXPECT_NEAR(r.at("final_reward").get<double>(), mean / 3.0, 1e-9 * std::max(1.0, std::abs(mean)));
  }
  fs::remove_all(dir);
}

TEST(Experiment, RerunIsByteIdentical) {
  const auto a = fresh_dir("det_a");
  const auto b = fresh_dir("det_b");
  run_experiment(toy_config(a), 1);
  run_experiment(toy_config(b), 2);
  for (const char* f : {"metrics.csv", "eval_metrics.csv", "runs.csv", "summary.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Figures, EnergyVsSlotIsCumulativeMean) {
  const auto dir = fresh_dir("fig_energy");
  auto c = toy_config(dir);
  c.seeds = {1};
  c.agents = {AgentKind::random};
  run_experiment(c, 1);
  const auto path = emit_figure_data(dir, FigureKind::energy_vs_slot);
  const auto fig = csv(path);
  const auto eval = csv(dir / "eval_metrics.csv");
  double sum = 0.0;
  ASSERT_EQ(fig.size(), eval.size());
  for (std::size_t t = 1; t < eval.size(); ++t) {
    sum += std::stod(eval[t][6]);
    EXPECT_NEAR(std::stod(fig[t][2]), sum / static_cast<double>(t), 1e-9);
    EXPECT_EQ(std::stod(fig[t][1]), static_cast<double>(t));
  }
  fs::remove_all(dir);
}

TEST(Figures, RateVsDelayCarriesJ0) {
  const auto dir = fresh_dir("fig_delay");
  auto c = toy_config(dir);
  c.seeds = {1};
  c.agents = {AgentKind::random};
  c.sweep.t_delay_ms = {2.0, 6.0, 10.0};
  run_experiment(c, 1);
  const auto fig = csv(emit_figure_data(dir, FigureKind::rate_vs_delay));
  ASSERT_EQ(fig[0].back(), "j0");
  ASSERT_EQ(fig.size(), 4u);
  for (std::size_t i = 1; i < fig.size(); ++i) {
    const double delay = std::stod(fig[i][1]) * 1e-3;
    const double expected = oracle::j0_series(2.0 * oracle::kPi * 5.9e9 * 1.5 * delay / oracle::kLightSpeed);
    EXPECT_NEAR(std::stod(fig[i][4]), expected, 1e-10);
  }
  fs::remove_all(dir);
}

TEST(Figures, RuntimeTableShape) {
  const auto dir = fresh_dir("fig_runtime");
  auto c = toy_config(dir);
  c.seeds = {1};
  run_experiment(c, 1);
  const auto fig = csv(emit_figure_data(dir, FigureKind::runtime_table));
  EXPECT_EQ(fig[0], (std::vector<std::string>{"curve", "x", "y", "stderr"}));
  EXPECT_EQ(fig.size(), 3u);
  for (std::size_t i = 1; i < fig.size(); ++i) EXPECT_GE(std::stod(fig[i][2]), 0.0);
  fs::remove_all(dir);
}

TEST(Figures, MissingDimensionListsAvailable) {
  const auto dir = fresh_dir("fig_missing");
  auto c = toy_config(dir);
  c.seeds = {1};
  c.agents = {AgentKind::random};
  run_experiment(c, 1);
  try {
    emit_figure_data(dir, FigureKind::rate_vs_k);
    FAIL() << "expected a missing-dimension error";
  } catch (const MissingDimensionError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("k_links"), std::string::npos);
    EXPECT_NE(what.find("t_delay_ms"), std::string::npos);
  }
  EXPECT_THROW(figure_kind_from_string("pie_chart"), std::invalid_argument);
  fs::remove_all(dir);
}
