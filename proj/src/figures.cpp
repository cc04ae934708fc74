#include "uavnet/figures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "uavnet/channel.hpp"

namespace uavnet {

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error("column '" + name + "' missing");
    return static_cast<std::size_t>(it - header.begin());
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Table read_table(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read " + p.string() + " (run the experiment first)");
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(p.string() + " is empty");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    t.rows.push_back(split(line));
    if (t.rows.back().size() != t.header.size()) throw std::runtime_error("ragged row in " + p.string());
  }
  return t;
}

struct RunInfo {
  std::string agent;
  int k = 0;
  double v = 0.0;
  double delay = 0.0;
  int steps = 0;
};

// Per-run slot rows, in file order.
struct Rows {
  std::vector<std::size_t> episode;
  std::vector<double> reward, rate, energy, queue;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string dim_value(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

class Figure {
 public:
  void add(const std::string& curve, double x, double y) {
    if (std::find(order_.begin(), order_.end(), curve) == order_.end()) order_.push_back(curve);
    points_[curve][x].push_back(y);
  }

  void write(std::ostream& out, const std::function<std::string(double)>& extra = {}) const {
    out << "curve,x,y,stderr" << (extra ? ",j0" : "") << '\n';
    for (const auto& curve : order_) {
      for (const auto& [x, ys] : points_.at(curve)) {
        const double n = static_cast<double>(ys.size());
        double mean = 0.0;
        for (double y : ys) mean += y;
        mean /= n;
        double se = 0.0;
        if (ys.size() > 1) {
          double ss = 0.0;
          for (double y : ys) ss += (y - mean) * (y - mean);
          se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
        }
        out << curve << ',' << num(x) << ',' << num(mean) << ',' << num(se);
        if (extra) out << ',' << extra(x);
        out << '\n';
      }
    }
  }

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::map<double, std::vector<double>>> points_;
};

}  // namespace

std::string to_string(FigureKind kind) {
  switch (kind) {
    case FigureKind::reward_curve: return "reward_curve";
    case FigureKind::rate_vs_k: return "rate_vs_K";
    case FigureKind::rate_vs_delay: return "rate_vs_delay";
    case FigureKind::energy_vs_slot: return "energy_vs_slot";
    case FigureKind::tradeoff_vs_v: return "tradeoff_vs_V";
    case FigureKind::runtime_table: return "runtime_table";
  }
  return "unknown";
}

std::vector<std::string> figure_kind_names() {
  return {"reward_curve", "rate_vs_K", "rate_vs_delay", "energy_vs_slot", "tradeoff_vs_V", "runtime_table"};
}

FigureKind figure_kind_from_string(const std::string& name) {
  for (auto k : {FigureKind::reward_curve, FigureKind::rate_vs_k, FigureKind::rate_vs_delay, FigureKind::energy_vs_slot,
                 FigureKind::tradeoff_vs_v, FigureKind::runtime_table}) {
    if (to_string(k) == name) return k;
  }
  std::string all;
  for (const auto& n : figure_kind_names()) all += (all.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown figure kind '" + name + "' (expected one of: " + all + ")");
}

std::filesystem::path emit_figure_data(const std::filesystem::path& dir, FigureKind kind) {
  const Table runs_t = read_table(dir / "runs.csv");
  std::map<std::string, RunInfo> runs;
  std::vector<std::string> run_order;
  std::set<int> ks, steps;
  std::set<double> vs, delays;
  for (const auto& r : runs_t.rows) {
    RunInfo info{r[runs_t.col("agent")], std::stoi(r[runs_t.col("k_links")]), std::stod(r[runs_t.col("v")]),
                 std::stod(r[runs_t.col("t_delay_ms")]), std::stoi(r[runs_t.col("diffusion_steps")])};
    ks.insert(info.k);
    vs.insert(info.v);
    delays.insert(info.delay);
    if (info.steps > 0) steps.insert(info.steps);
    const std::string id = r[runs_t.col("run_id")];
    runs[id] = info;
    run_order.push_back(id);
  }
  if (runs.empty()) throw std::runtime_error("runs.csv lists no runs");

  auto available = [&] {
    return "available dimensions: k_links (" + std::to_string(ks.size()) + " values), v (" +
           std::to_string(vs.size()) + " values), t_delay_ms (" + std::to_string(delays.size()) +
           " values), diffusion_steps (" + std::to_string(steps.size()) + " values)";
  };
  auto require = [&](const char* dim, std::size_t count) {
    if (count < 2) {
      throw MissingDimensionError("figure " + to_string(kind) + " needs at least two values of " + dim + "; " +
                                  available());
    }
  };

  // Dimensions that vary become part of the curve label unless they are the x axis.
  auto label = [&](const RunInfo& r, const std::string& x_dim) {
    std::string s = r.agent;
    if (x_dim != "k_links" && ks.size() > 1) s += " K=" + std::to_string(r.k);
    if (x_dim != "v" && vs.size() > 1) s += " V=" + dim_value(r.v);
    if (x_dim != "t_delay_ms" && delays.size() > 1) s += " Tdelay=" + dim_value(r.delay) + "ms";
    if (x_dim != "diffusion_steps" && steps.size() > 1 && r.steps > 0) s += " I=" + std::to_string(r.steps);
    return s;
  };

  auto load_rows = [&](const std::string& file) {
    std::map<std::string, Rows> out;
    const Table t = read_table(dir / file);
    const auto c_run = t.col("run_id"), c_ep = t.col("episode"), c_rw = t.col("reward"),
               c_rate = t.col("mean_v2u_rate"), c_en = t.col("energy"), c_q = t.col("queue");
    for (const auto& r : t.rows) {
      Rows& rows = out[r[c_run]];
      rows.episode.push_back(std::stoul(r[c_ep]));
      rows.reward.push_back(std::stod(r[c_rw]));
      rows.rate.push_back(std::stod(r[c_rate]));
      rows.energy.push_back(std::stod(r[c_en]));
      rows.queue.push_back(std::stod(r[c_q]));
    }
    return out;
  };

  // Slots of the run's evaluation episodes, or of its last ten training
  // episodes when it was not evaluated.
  std::map<std::string, Rows> train_rows, eval_rows;
  auto final_rows = [&](const std::string& id, std::size_t max_episodes) {
    const Rows& src = eval_rows.count(id) ? eval_rows.at(id) : train_rows.at(id);
    const std::size_t last = src.episode.back();
    const std::size_t first = last + 1 >= max_episodes ? last + 1 - max_episodes : 0;
    Rows out;
    for (std::size_t i = 0; i < src.episode.size(); ++i) {
      if (src.episode[i] < first) continue;
      out.episode.push_back(src.episode[i]);
      out.reward.push_back(src.reward[i]);
      out.rate.push_back(src.rate[i]);
      out.energy.push_back(src.energy[i]);
      out.queue.push_back(src.queue[i]);
    }
    return out;
  };
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };

  Figure fig;
  std::function<std::string(double)> extra;
  switch (kind) {
    case FigureKind::reward_curve: {
      train_rows = load_rows("metrics.csv");
      for (const auto& id : run_order) {
        const Rows& r = train_rows.at(id);
        std::map<std::size_t, double> per_episode;
        for (std::size_t i = 0; i < r.episode.size(); ++i) per_episode[r.episode[i]] += r.reward[i];
        for (const auto& [e, total] : per_episode) fig.add(label(runs.at(id), ""), static_cast<double>(e), total);
      }
      break;
    }
    case FigureKind::rate_vs_k:
    case FigureKind::rate_vs_delay:
    case FigureKind::tradeoff_vs_v: {
      const char* dim = kind == FigureKind::rate_vs_k       ? "k_links"
                        : kind == FigureKind::rate_vs_delay ? "t_delay_ms"
                                                            : "v";
      require(dim, kind == FigureKind::rate_vs_k ? ks.size() : kind == FigureKind::rate_vs_delay ? delays.size() : vs.size());
      train_rows = load_rows("metrics.csv");
      eval_rows = load_rows("eval_metrics.csv");
      for (const auto& id : run_order) {
        const RunInfo& info = runs.at(id);
        const Rows r = final_rows(id, eval_rows.count(id) ? SIZE_MAX : 10);
        const double x = kind == FigureKind::rate_vs_k ? info.k : kind == FigureKind::rate_vs_delay ? info.delay : info.v;
        if (kind == FigureKind::tradeoff_vs_v) {
          fig.add(label(info, dim) + ":rate", x, mean(r.rate));
          fig.add(label(info, dim) + ":queue", x, mean(r.queue));
        } else {
          fig.add(label(info, dim), x, mean(r.rate));
        }
      }
      if (kind == FigureKind::rate_vs_delay) {
        std::ifstream in(dir / "config.json");
        if (!in) throw std::runtime_error("cannot read " + (dir / "config.json").string());
        const auto cfg = nlohmann::json::parse(in);
        ChannelParams ch;
        ch.carrier_frequency = cfg.at("channel").at("carrier_frequency").get<double>();
        ch.min_relative_speed = cfg.at("channel").at("min_relative_speed").get<double>();
        extra = [ch](double delay_ms) {
          ChannelParams p = ch;
          p.t_delay = delay_ms * 1e-3;
          return num(aging_correlation(p.min_relative_speed, p));
        };
      }
      break;
    }
    case FigureKind::energy_vs_slot: {
      train_rows = load_rows("metrics.csv");
      eval_rows = load_rows("eval_metrics.csv");
      for (const auto& id : run_order) {
        const Rows r = final_rows(id, 1);
        double cumulative = 0.0;
        for (std::size_t t = 0; t < r.energy.size(); ++t) {
          cumulative += r.energy[t];
          fig.add(label(runs.at(id), ""), static_cast<double>(t + 1), cumulative / static_cast<double>(t + 1));
        }
      }
      break;
    }
    case FigureKind::runtime_table: {
      const Table t = read_table(dir / "timing.csv");
      for (const auto& r : t.rows) {
        const RunInfo& info = runs.at(r[t.col("run_id")]);
        fig.add(label(info, "k_links"), info.k, std::stod(r[t.col("mean_inference_ms")]));
      }
      break;
    }
  }

  const auto out_dir = dir / "figures";
  std::filesystem::create_directories(out_dir);
  const auto path = out_dir / (to_string(kind) + ".csv");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fig.write(out, extra);
  return path;
}

}  // namespace uavnet
