#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's numerics.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLightSpeed = 299792458.0;

// 30-term power series sum_k (-1)^k (x/2)^{2k} / (k!)^2, in long double.
inline double j0_series(double x) {
  long double term = 1.0L;
  long double sum = 1.0L;
  const long double q = static_cast<long double>(x) * x / 4.0L;
  for (int k = 1; k < 30; ++k) {
    term *= -q / (static_cast<long double>(k) * k);
    sum += term;
  }
  return static_cast<double>(sum);
}

// 20 log10(4 pi f d / c) expanded term by term.
inline double free_space_db(double d, double f = 5.9e9, double c = kLightSpeed) {
  return 20.0 * std::log10(4.0 * kPi) + 20.0 * std::log10(f) + 20.0 * std::log10(d) - 20.0 * std::log10(c);
}

inline double v2v_loss_db(double d) { return 44.23 + 16.7 * std::log10(d); }

inline double los_probability(double theta_deg, double a = 12.08, double b = 0.11) {
  return 1.0 / (1.0 + a * std::exp(-b * (theta_deg - a)));
}

// N0 B with N0 = -174 dBm/Hz and B = 2 MHz.
inline double noise_power() { return std::pow(10.0, -17.4) * 1e-3 * 2e6; }

struct PowerTerms {
  double blade, induced, parasite, vertical;
  double total() const { return blade + induced + parasite + vertical; }
};

// Rotary-wing propulsion with the default constants, written out longhand.
inline PowerTerms propulsion(double vx, double vy, double vz) {
  const double P0 = 79.86, P1 = 88.63, Omega = 300.0, r = 0.4, v0 = 4.03, d0 = 0.3, rho = 1.225, s = 0.05,
               A = 0.503, G = 20.0, eps = 0.1;
  const double vh2 = vx * vx + vy * vy;
  const double vh = std::sqrt(vh2);
  PowerTerms t;
  t.blade = P0 + P0 * 3.0 * vh2 / (Omega * Omega * r * r);
  t.induced = P1 * v0 / std::max(vh2, eps * eps);
  t.parasite = 0.5 * d0 * rho * s * A * vh * vh * vh;
  t.vertical = G * vz;
  return t;
}

inline double relative_error(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

// Minimum assignment cost by enumerating ordered column choices.
inline double brute_force_assignment(const Eigen::MatrixXd& cost) {
  const int k = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  std::vector<int> cols(static_cast<std::size_t>(m));
  std::iota(cols.begin(), cols.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  std::function<void(int, double, std::vector<bool>&)> rec = [&](int row, double acc, std::vector<bool>& used) {
    if (row == k) {
      best = std::min(best, acc);
      return;
    }
    for (int c = 0; c < m; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      used[static_cast<std::size_t>(c)] = true;
      rec(row + 1, acc + cost(row, c), used);
      used[static_cast<std::size_t>(c)] = false;
    }
  };
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  rec(0, 0.0, used);
  return best;
}

// Central difference of f at x along coordinate direction `i` of a parameter
// that `poke` perturbs in place.
inline double central_difference(const std::function<double()>& f, const std::function<void(double)>& poke,
                                 double h = 1e-5) {
  poke(h);
  const double up = f();
  poke(-2.0 * h);
  const double down = f();
  poke(h);
  return (up - down) / (2.0 * h);
}

}  // namespace oracle
