// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "uavnet/channel.hpp"
#include "uavnet/config.hpp"
#include "uavnet/diffusion.hpp"
#include "uavnet/energy.hpp"
#include "uavnet/env.hpp"
#include "uavnet/experiment.hpp"
#include "uavnet/figures.hpp"
#include "uavnet/hungarian.hpp"
#include "uavnet/lyapunov.hpp"
#include "uavnet/neural.hpp"

using namespace uavnet;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool report(int id, const std::string& name, double limit_s, double extra_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double elapsed = seconds_since(start) + extra_s;
  if (limit_s > 0.0) o.require(elapsed < limit_s, "runtime over limit");
  std::cout << "criterion " << id << ' ' << (o.pass ? "PASS" : "FAIL") << "  " << name << "  (" << std::fixed
            << std::setprecision(1) << elapsed << " s";
  if (limit_s > 0.0) std::cout << " / limit " << limit_s << " s";
  std::cout << ")  " << o.detail.str() << '\n'
            << std::defaultfloat << std::flush;
  return o.pass;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
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

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("uavnet_acceptance_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig toy_config() { return load_config(fs::path(UAVNET_CONFIG_DIR) / "toy.json"); }

bool is_trained(AgentKind k) { return k != AgentKind::random; }

void physics(Outcome& o) {
  double worst_j0 = 0.0;
  for (int i = -1200; i <= 1200; ++i) {
    const double x = i * 0.01;
    worst_j0 = std::max(worst_j0, std::abs(bessel_j0(x) - oracle::j0_series(x)));
  }
  o.require(worst_j0 <= 1e-10, "bessel_j0 vs series");

  const ChannelParams ch;
  double worst_rel = 0.0;
  for (double d : {1.0, 10.0, 100.0, 731.5, 5000.0}) {
    worst_rel = std::max(worst_rel, oracle::relative_error(free_space_loss_db(d, ch), oracle::free_space_db(d)));
    worst_rel = std::max(worst_rel, oracle::relative_error(v2v_path_loss_db(d), oracle::v2v_loss_db(d)));
    for (double pr : {0.0, 0.3, 1.0}) {
      const double expected = oracle::free_space_db(d) + pr * ch.alpha_los + (1.0 - pr) * ch.alpha_nlos;
      worst_rel = std::max(worst_rel, oracle::relative_error(v2u_path_loss_db(d, pr, ch), expected));
    }
  }
  for (double deg : {0.0, 12.08, 45.0, 90.0}) {
    worst_rel = std::max(worst_rel, oracle::relative_error(los_probability_from_angle(deg * oracle::kPi / 180.0, ch),
                                                           oracle::los_probability(deg)));
  }
  worst_rel = std::max(worst_rel, oracle::relative_error(ch.noise_power(), oracle::noise_power()));

  const PowerModelParams pm;
  const double v = 50.0 / 3.6;
  for (double vz : {0.0, 2.0, -3.0}) {
    worst_rel = std::max(worst_rel, oracle::relative_error(propulsion_power({v, 0.0, vz}, pm),
                                                           oracle::propulsion(v, 0.0, vz).total()));
  }
  o.require(worst_rel <= 1e-6, "term-by-term oracles");
  // The quoted values carry three significant digits.
  o.require(std::abs(ch.noise_power() - 7.96e-15) <= 0.005e-15, "noise power 7.96e-15 W");
  o.require(std::abs(propulsion_power({v, 0.0, 0.0}, pm) - 97.3) <= 0.05, "cruise power 97.3 W");
  o.detail << "max |J0 err| " << worst_j0 << ", max rel err " << worst_rel << ", noise " << ch.noise_power()
           << " W, cruise " << propulsion_power({v, 0.0, 0.0}, pm) << " W";
}

void lyapunov(Outcome& o, const std::vector<RunOutput>& toy_runs) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> q0(0.0, 5000.0);
  std::uniform_real_distribution<double> power(-200.0, 400.0);
  std::bernoulli_distribution empty(0.1);
  long bad = 0;
  const long n = 100000;
  for (long i = 0; i < n; ++i) {
    VirtualQueue q;
    q.q = empty(rng) ? 0.0 : q0(rng);
    const double p = power(rng);
    const VirtualQueue next = queue_update(q, p);
    if (!check_queue_lower_bound(q.q, next.q, p, q.e_threshold) || !check_drift_bound(q.q, next.q, p, q.e_threshold)) {
      ++bad;
    }
  }
  o.require(bad == 0, "per-transition bounds");

  // Pathwise (1/T) sum P dt <= E_th + Q(T)/T on every episode of every toy run,
  // plus random-action runs of a standalone environment.
  long paths = 0, path_bad = 0;
  auto check_path = [&](double energy, double q_final, double slots) {
    ++paths;
    if (!(energy / slots <= 120.0 + q_final / slots + 1e-9 * (1.0 + std::abs(energy / slots)))) ++path_bad;
  };
  for (const auto& run : toy_runs) {
    std::map<std::size_t, std::pair<double, double>> per_episode;  // energy, last queue
    std::map<std::size_t, std::size_t> counts;
    for (const auto* rows : {&run.train_rows, &run.eval_rows}) {
      per_episode.clear();
      counts.clear();
      for (const auto& r : *rows) {
        per_episode[r.episode].first += r.energy;
        per_episode[r.episode].second = r.queue;
        ++counts[r.episode];
      }
      for (const auto& [ep, eq] : per_episode) check_path(eq.first, eq.second, static_cast<double>(counts[ep]));
    }
  }
  auto c = toy_config();
  c.agents = {AgentKind::random};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    RunSpec spec{0, AgentKind::random, SweepPoint{c.scenario.k_links, c.lyapunov.v_weight, 10.0, 0}, seed};
    auto env = build_env(c, spec, build_trace(c, seed));
    env.reset();
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double energy = 0.0, q = 0.0;
    for (std::size_t t = 0; t < c.scenario.num_slots; ++t) {
      MdpAction a{std::vector<double>(c.scenario.action_dim())};
      for (double& x : a.raw) x = u(rng);
      const auto r = env.step(a);
      energy += r.info.energy;
      q = r.info.queue_after;
    }
    check_path(energy, q, static_cast<double>(c.scenario.num_slots));
  }
  o.require(path_bad == 0, "telescoped bound");
  o.detail << n << " transitions, " << bad << " violations; " << paths << " paths, " << path_bad << " violations";
}

void energy_constraint(Outcome& o, const std::vector<RunOutput>& toy_runs) {
  int checked = 0;
  double worst = 0.0;
  std::set<AgentKind> seen;
  for (const auto& run : toy_runs) {
    if (!is_trained(run.spec.agent)) continue;
    seen.insert(run.spec.agent);
    const double e = run.train.episodes.back().final_moving_average_energy;
    ++checked;
    worst = std::max(worst, e);
    o.require(e <= 120.0, to_string(run.spec.agent) + " seed " + std::to_string(run.spec.seed) + " energy " +
                              std::to_string(e));
  }
  o.require(seen.size() == 4, "all four trained agents present");
  o.detail << checked << " trained runs, worst final moving-average energy " << worst << " J";
}

void csi_aging(Outcome& o) {
  const auto dir = scratch("delay");
  auto c = toy_config();
  c.agents = {AgentKind::random};
  c.seeds = {1};
  c.episodes = 1;
  c.scenario.num_slots = 5;
  c.sweep.t_delay_ms = {2.0, 4.0, 6.0, 8.0, 10.0};
  c.output_dir = dir;
  run_experiment(c, 1);
  const auto fig = read_csv(emit_figure_data(dir, FigureKind::rate_vs_delay));
  std::vector<double> j0;
  for (std::size_t i = 1; i < fig.size(); ++i) j0.push_back(std::stod(fig[i].back()));
  o.require(fig[0].back() == "j0" && j0.size() == 5, "j0 column present");
  for (std::size_t i = 1; i < j0.size(); ++i) o.require(j0[i] < j0[i - 1], "strictly decreasing");
  const double max_arg = 2.0 * oracle::kPi * c.channel.carrier_frequency * c.channel.min_relative_speed * 0.010 /
                         c.channel.light_speed;
  o.require(max_arg < 2.405, "argument below the first zero");
  fs::remove_all(dir);

  ChannelParams p;
  p.t_delay = 0.010;
  const double rho = oracle::j0_series(2.0 * oracle::kPi * p.carrier_frequency * 1.5 * p.t_delay / oracle::kLightSpeed);
  Rng rng(77);
  const int n = 100000;
  double cross = 0.0, cross_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const Complex g_hat = draw_complex_gaussian(rng);
    const double c2 = (age_fading(g_hat, 1.5, p, rng) * std::conj(g_hat)).real();
    cross += c2;
    cross_sq += c2 * c2;
  }
  const double corr = cross / n;
  const double se = std::sqrt((cross_sq / n - corr * corr) / n);
  o.require(std::abs(corr - rho) <= 3.0 * se, "empirical correlation within 3 SE");
  o.detail << "j0 " << j0.front() << " -> " << j0.back() << "; corr " << corr << " vs " << rho << " (3 SE = " << 3.0 * se
           << ")";
}

void feasibility(Outcome& o) {
  auto c = toy_config();
  std::mt19937_64 rng(5);
  long violations = 0;
  const long n = 100000;
  for (const auto [m, k] : {std::pair{4, 4}, std::pair{10, 10}, std::pair{10, 3}}) {
    NetworkScenario s = c.scenario;
    s.m_links = m;
    s.k_links = k;
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (long t = 0; t < n / 3 + 1; ++t) {
      MdpAction raw{std::vector<double>(s.action_dim())};
      for (double& x : raw.raw) x = u(rng);
      const auto a = amend_action(raw, s);
      bool ok = static_cast<int>(a.channel_of.size()) == k;
      std::set<int> used;
      for (int ch : a.channel_of) ok = ok && ch >= 0 && ch < m && used.insert(ch).second;
      for (double p : a.p_m) ok = ok && p >= 0.0 && p <= s.p_max;
      for (double p : a.p_k) ok = ok && p >= 0.0 && p <= s.p_max;
      ok = ok && std::abs(a.delta_h) <= s.max_delta_h;
      if (!ok) ++violations;
    }
  }
  o.require(violations == 0, "amended actions feasible");

  // Closed loop with actions that push against each bound.
  double lo = 1e9, hi = -1e9;
  for (double bias : {-1.0, 1.0, 0.0}) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    RunSpec spec{0, AgentKind::random, SweepPoint{c.scenario.k_links, c.lyapunov.v_weight, 0.0, 0}, 3};
    auto cc = c;
    cc.scenario.num_slots = 200;
    auto env = build_env(cc, spec, build_trace(cc, 3));
    env.reset();
    for (std::size_t t = 0; t < cc.scenario.num_slots; ++t) {
      MdpAction a{std::vector<double>(cc.scenario.action_dim())};
      for (double& x : a.raw) x = u(rng);
      a.raw.back() = bias == 0.0 ? u(rng) : bias;
      const double alt = env.step(a).info.altitude;
      lo = std::min(lo, alt);
      hi = std::max(hi, alt);
    }
  }
  o.require(lo >= c.scenario.altitude_bounds.min && hi <= c.scenario.altitude_bounds.max, "altitude inside bounds");
  o.detail << n << " amended actions, " << violations << " violations; altitude range [" << lo << ", " << hi << "] m";
}

double objective(const DenseNet& net, const Matrix& x, const Matrix& w) { return (net.predict(x).array() * w.array()).sum(); }

void learning_machinery(Outcome& o) {
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int draw = 0; draw < 20; ++draw) {
    const std::vector<int> sizes{9 + draw % 5, 16, 16, 7 - draw % 3};
    DenseNet net(sizes, Activation::relu, draw % 2 ? Activation::tanh : Activation::identity, rng);
    const Matrix x = Matrix::Random(sizes.front(), 3);
    const Matrix w = Matrix::Random(sizes.back(), 3);
    const auto g = net.backward(net.forward(x), w);
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
      for (int t = 0; t < 6; ++t) {
        const int r = static_cast<int>(rng() % static_cast<std::uint64_t>(net.layer(l).weight.rows()));
        const int cidx = static_cast<int>(rng() % static_cast<std::uint64_t>(net.layer(l).weight.cols()));
        const double fd = oracle::central_difference([&] { return objective(net, x, w); },
                                                     [&](double h) { net.mutable_layer(l).weight(r, cidx) += h; });
        if (std::abs(fd) + std::abs(g.weight[l](r, cidx)) > 1e-7) {
          worst = std::max(worst, oracle::relative_error(g.weight[l](r, cidx), fd));
        }
        const double fdb = oracle::central_difference([&] { return objective(net, x, w); },
                                                      [&](double h) { net.mutable_layer(l).bias(r) += h; });
        if (std::abs(fdb) + std::abs(g.bias[l](r)) > 1e-7) worst = std::max(worst, oracle::relative_error(g.bias[l](r), fdb));
      }
    }
  }
  o.require(worst < 1e-5, "finite differences");

  bool identities = true;
  for (int steps : {1, 2, 4, 8, 20}) {
    const auto s = build_schedule(steps, 0.1, 10.0);
    identities = identities && s.beta_bar_at(1) == 0.0;
    for (int i = 1; i <= steps; ++i) {
      const double b = 1.0 - std::exp(-0.1 / steps - (2.0 * i - 1.0) / (2.0 * steps * steps) * 9.9);
      identities = identities && std::abs(s.beta_at(i) - b) <= 1e-15;
      identities = identities && s.phi_at(i) == 1.0 - s.beta_at(i);
      identities = identities && s.phi_bar_at(i) == s.phi_bar_at(i - 1) * s.phi_at(i);
      if (i > 1) {
        const double bb = (1.0 - s.phi_bar_at(i - 1)) / (1.0 - s.phi_bar_at(i)) * s.beta_at(i);
        identities = identities && std::abs(s.beta_bar_at(i) - bb) <= 1e-15;
      }
    }
  }
  o.require(identities, "schedule identities");

  const auto s = build_schedule(4);
  std::normal_distribution<double> normal;
  auto gaussian = [&](int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = normal(rng);
    return v;
  };
  const int trials = 100000;
  const Vector x0 = (Vector(2) << 0.7, -0.4).finished();
  double worst_sigma = 0.0;
  for (int i = 1; i <= 4; ++i) {
    Vector sa = Vector::Zero(2), qa = Vector::Zero(2), sb = Vector::Zero(2), qb = Vector::Zero(2);
    for (int t = 0; t < trials; ++t) {
      Vector x = x0;
      for (int j = 1; j <= i; ++j) x = forward_step(x, j, s, gaussian(2));
      const Vector y = forward_marginal(x0, i, s, gaussian(2));
      sa += x;
      qa += x.cwiseProduct(x);
      sb += y;
      qb += y.cwiseProduct(y);
    }
    for (int cidx = 0; cidx < 2; ++cidx) {
      const double ma = sa(cidx) / trials, mb = sb(cidx) / trials;
      const double va = qa(cidx) / trials - ma * ma, vb = qb(cidx) / trials - mb * mb;
      worst_sigma = std::max(worst_sigma, std::abs(ma - mb) / std::sqrt((va + vb) / trials));
      worst_sigma = std::max(worst_sigma, std::abs(va - vb) / std::sqrt(2.0 * (va * va + vb * vb) / trials));
    }
  }
  o.require(worst_sigma <= 3.0, "forward marginal within 3 sigma");

  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = dim(rng);
    const int m = std::uniform_int_distribution<int>(k, 6)(rng);
    Matrix cost(k, m);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < m; ++j) cost(i, j) = u(rng);
    const auto r = hungarian_assign(cost);
    double sum = 0.0;
    std::set<int> used;
    for (int i = 0; i < k; ++i) {
      sum += cost(i, r.column_of[static_cast<std::size_t>(i)]);
      used.insert(r.column_of[static_cast<std::size_t>(i)]);
    }
    if (static_cast<int>(used.size()) != k || std::abs(sum - oracle::brute_force_assignment(cost)) > 1e-9) ++mismatches;
  }
  o.require(mismatches == 0, "hungarian equals brute force");
  o.detail << "worst FD rel err " << worst << ", marginal worst " << worst_sigma << " sigma, " << mismatches
           << "/1000 assignment mismatches";
}

void directional(Outcome& o, const std::vector<RunOutput>& toy_runs) {
  std::map<AgentKind, std::vector<double>> finals;
  for (const auto& run : toy_runs) finals[run.spec.agent].push_back(final_reward(run.train));
  auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); };
  const auto& d3pg = finals[AgentKind::d3pg];
  const auto& ddpg = finals[AgentKind::ddpg];
  const auto& rnd = finals[AgentKind::random];
  o.require(d3pg.size() == 3 && ddpg.size() == 3 && rnd.size() == 3, "three seeds per agent");
  if (!o.pass) return;
  const double d_lo = *std::min_element(d3pg.begin(), d3pg.end());
  const double r_hi = *std::max_element(rnd.begin(), rnd.end());
  o.require(mean(d3pg) > mean(rnd), "D3PG mean above random");
  o.require(d_lo > r_hi, "seed ranges do not overlap");
  o.require(mean(d3pg) >= mean(ddpg), "D3PG mean at least DDPG");
  auto range = [&](const std::vector<double>& v) {
    std::ostringstream s;
    s << std::setprecision(6) << mean(v) << " [" << *std::min_element(v.begin(), v.end()) << ", "
      << *std::max_element(v.begin(), v.end()) << "]";
    return s.str();
  };
  o.detail << "final-10 reward d3pg " << range(d3pg) << ", ddpg " << range(ddpg) << ", random " << range(rnd);
}

bool same_rows(const std::vector<SlotRecord>& a, const std::vector<SlotRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.episode != y.episode || x.slot != y.slot || x.reward != y.reward || x.mean_v2u_rate != y.mean_v2u_rate ||
        x.energy != y.energy || x.moving_average_energy != y.moving_average_energy || x.queue != y.queue ||
        x.outage_violations != y.outage_violations || x.altitude != y.altitude) {
      return false;
    }
  }
  return true;
}

void wcsi(Outcome& o) {
  auto c = toy_config();
  c.episodes = 4;
  const SweepPoint zero{c.scenario.k_links, c.lyapunov.v_weight, 0.0, c.hyperparams.diffusion_steps};
  const auto a = execute_run(c, RunSpec{0, AgentKind::d3pg, zero, 1});
  const auto b = execute_run(c, RunSpec{1, AgentKind::d3pg_wcsi, zero, 1});
  o.require(a.train.updates > 0, "learning happened");
  o.require(same_rows(a.train_rows, b.train_rows) && same_rows(a.eval_rows, b.eval_rows), "bit-identical at 0 ms");

  const SweepPoint delayed{c.scenario.k_links, c.lyapunov.v_weight, 10.0, c.hyperparams.diffusion_steps};
  auto aged = build_env(c, RunSpec{0, AgentKind::d3pg, delayed, 1}, build_trace(c, 1));
  auto blind = build_env(c, RunSpec{1, AgentKind::d3pg_wcsi, delayed, 1}, build_trace(c, 1));
  aged.reset();
  blind.reset();
  const MdpAction zeros{std::vector<double>(c.scenario.action_dim(), 0.0)};
  const int m = c.scenario.m_links, k = c.scenario.k_links;
  const std::size_t v2v_begin = static_cast<std::size_t>(m + k);
  const std::size_t v2v_end = v2v_begin + static_cast<std::size_t>(m * k + k);
  int v2v_diff = 0, other_diff = 0;
  for (int t = 0; t < 5; ++t) {
    const auto sa = aged.step(zeros).next.state.values;
    const auto sb = blind.step(zeros).next.state.values;
    for (std::size_t i = 0; i < sa.size(); ++i) {
      if (sa[i] == sb[i]) continue;
      (i >= v2v_begin && i < v2v_end ? v2v_diff : other_diff) += 1;
    }
  }
  o.require(v2v_diff > 0, "V2V entries differ at 10 ms");
  o.require(other_diff == 0, "non-V2V entries agree at 10 ms");
  o.detail << a.train_rows.size() << " identical slots at 0 ms; at 10 ms " << v2v_diff << " V2V entries differ, "
           << other_diff << " others";
}

void determinism(Outcome& o) {
  auto c = toy_config();
  c.episodes = 3;
  c.seeds = {1, 2};
  c.agents = {AgentKind::d3pg, AgentKind::d3pg_wcsi, AgentKind::ddpg, AgentKind::hddqn, AgentKind::random};
  const auto dir = scratch("rerun");
  const std::vector<std::string> files{"metrics.csv", "eval_metrics.csv", "runs.csv", "summary.json", "config.json"};
  c.output_dir = dir;
  run_experiment(c, 1);
  std::vector<std::string> first;
  for (const auto& f : files) first.push_back(slurp(dir / f));
  run_experiment(c, 2);
  for (std::size_t i = 0; i < files.size(); ++i) o.require(!first[i].empty() && first[i] == slurp(dir / files[i]), files[i]);
  fs::remove_all(dir);
  o.detail << "5 files compared across 1 and 2 worker threads";
}

}  // namespace

int main() {
  std::cout << "running toy experiment (shared by criteria 2, 3 and 7)..." << std::endl;
  auto toy = toy_config();
  toy.output_dir = scratch("toy");
  std::vector<RunOutput> toy_runs;
  std::string toy_error;
  double trained_s = 0.0, random_s = 0.0;
  try {
    auto start = Clock::now();
    toy.agents = {AgentKind::d3pg, AgentKind::d3pg_wcsi, AgentKind::ddpg, AgentKind::hddqn};
    toy_runs = run_experiment(toy, 1);
    trained_s = seconds_since(start);
    start = Clock::now();
    toy.agents = {AgentKind::random};
    for (auto& r : run_experiment(toy, 1)) toy_runs.push_back(std::move(r));
    random_s = seconds_since(start);
  } catch (const std::exception& e) {
    toy_error = e.what();
  }
  std::cout << "toy experiment: " << toy_runs.size() << " runs, trained agents " << trained_s << " s, random "
            << random_s << " s" << std::endl;
  auto need_toy = [&](Outcome& o) { o.require(toy_error.empty() && !toy_runs.empty(), "toy experiment: " + toy_error); };

  bool all = true;
  all &= report(1, "physics oracles", 1.0, 0.0, physics);
  all &= report(2, "Lyapunov inequalities", 5.0, 0.0, [&](Outcome& o) {
    need_toy(o);
    lyapunov(o, toy_runs);
  });
  all &= report(3, "energy constraint on toy scenario", 600.0, trained_s, [&](Outcome& o) {
    need_toy(o);
    energy_constraint(o, toy_runs);
  });
  all &= report(4, "CSI aging", 30.0, 0.0, csi_aging);
  all &= report(5, "feasibility", 10.0, 0.0, feasibility);
  all &= report(6, "learning machinery", 60.0, 0.0, learning_machinery);
  all &= report(7, "D3PG vs random and DDPG", 1800.0, trained_s + random_s, [&](Outcome& o) {
    need_toy(o);
    directional(o, toy_runs);
  });
  all &= report(8, "WCSI equivalence", 60.0, 0.0, wcsi);
  all &= report(9, "byte-identical rerun", 0.0, 0.0, determinism);
  fs::remove_all(toy.output_dir);
  std::cout << (all ? "ALL PASS" : "SOME CRITERIA FAILED") << '\n';
  return all ? 0 : 1;
}
