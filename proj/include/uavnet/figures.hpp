#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavnet {

enum class FigureKind { reward_curve, rate_vs_k, rate_vs_delay, energy_vs_slot, tradeoff_vs_v, runtime_table };

std::string to_string(FigureKind kind);
FigureKind figure_kind_from_string(const std::string& name);
std::vector<std::string> figure_kind_names();

/// Sweep dimension the figure needs with at least two values was not run.
class MissingDimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Reads the files written by run_experiment from `dir` and writes
/// `dir/figures/<kind>.csv` with columns curve,x,y,stderr (rate_vs_delay adds
/// j0). Returns the written path.
std::filesystem::path emit_figure_data(const std::filesystem::path& dir, FigureKind kind);

}  // namespace uavnet
