#include "uavnet/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "uavnet/errors.hpp"

namespace uavnet {

void ChannelParams::validate() const {
  auto fail = [](const char* msg) { throw std::invalid_argument(msg); };
  if (!(carrier_frequency > 0.0)) fail("carrier_frequency must be positive");
  if (!(bandwidth > 0.0)) fail("bandwidth must be positive");
  if (!(noise_psd > 0.0)) fail("noise_psd must be positive");
  if (alpha_los < 0.0 || alpha_nlos < 0.0) fail("additional losses must be non-negative");
  if (!(env_a > 0.0) || !(env_b > 0.0)) fail("environment constants a, b must be positive");
  if (!(light_speed > 0.0)) fail("light_speed must be positive");
  if (t_delay < 0.0) fail("t_delay must be non-negative");
  if (min_relative_speed < 0.0) fail("min_relative_speed must be non-negative");
}

double bessel_j0(double x) {
  x = std::abs(x);
  if (!std::isfinite(x)) return x == x ? 0.0 : x;
  if (x > 1e6) {
    // Leading Hankel term; the quadrature would need ~x nodes.
    const double phase = x - std::numbers::pi / 4.0;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (std::cos(phase) + std::sin(phase) / (8.0 * x));
  }
  // Nodes beyond |x| + O(|x|^{1/3}) push the aliasing error (2 J_N(x)) below 1e-16.
  auto n = static_cast<long>(x + 10.0 * std::cbrt(x) + 48.0);
  n += n % 2;
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  double sum = 0.0;
  for (long j = 0; j < n; ++j) sum += std::cos(x * std::sin(step * static_cast<double>(j)));
  return sum / static_cast<double>(n);
}

double los_probability_from_angle(double theta, const ChannelParams& p) {
  const double degrees = theta * 180.0 / std::numbers::pi;
  return 1.0 / (1.0 + p.env_a * std::exp(-p.env_b * (degrees - p.env_a)));
}

double los_probability(const UavState& uav, const VehicleState& vehicle, const ChannelParams& p) {
  const double horizontal = distance(uav.horizontal_position, vehicle.position);
  // atan2 gives 90 degrees at zero horizontal distance.
  return los_probability_from_angle(std::atan2(uav.altitude, horizontal), p);
}

double free_space_loss_db(double d, const ChannelParams& p) {
  if (!(d > 0.0)) throw InvalidGeometryError("V2U link has zero length");
  return 20.0 * std::log10(4.0 * std::numbers::pi * p.carrier_frequency * d / p.light_speed);
}

double v2u_path_loss_db(double d, double pr_los, const ChannelParams& p) {
  const double fs = free_space_loss_db(d, p);
  return pr_los * (fs + p.alpha_los) + (1.0 - pr_los) * (fs + p.alpha_nlos);
}

double v2u_path_loss_db(const UavState& uav, const VehicleState& vehicle, const ChannelParams& p) {
  const double horizontal = distance(uav.horizontal_position, vehicle.position);
  const double d = std::hypot(uav.altitude, horizontal);
  return v2u_path_loss_db(d, los_probability(uav, vehicle, p), p);
}

double v2v_path_loss_db(double d) {
  if (!(d > 0.0)) throw InvalidGeometryError("V2V link has zero length");
  return 44.23 + 16.7 * std::log10(d);
}

double v2v_path_loss_db(const VehicleState& tx, const VehicleState& rx) {
  return v2v_path_loss_db(distance(tx.position, rx.position));
}

Complex draw_complex_gaussian(Rng& rng, double variance) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = std::sqrt(variance / 2.0);
  const double re = normal(rng);
  const double im = normal(rng);
  return {scale * re, scale * im};
}

double aging_correlation(double relative_speed, const ChannelParams& p) {
  return bessel_j0(2.0 * std::numbers::pi * p.carrier_frequency * relative_speed / p.light_speed * p.t_delay);
}

Complex age_fading(Complex g_hat, double rho, Rng& rng) {
  const Complex delta = draw_complex_gaussian(rng, std::max(0.0, 1.0 - rho * rho));
  return rho * g_hat + delta;
}

Complex age_fading(Complex g_hat, double relative_speed, const ChannelParams& params, Rng& rng) {
  return age_fading(g_hat, aging_correlation(relative_speed, params), rng);
}

AgingCorrelation aging_correlations(const LinkVehicles& v, const ChannelParams& p) {
  AgingCorrelation c;
  c.m = static_cast<int>(v.v2u_tx.size());
  c.k = static_cast<int>(v.v2v_tx.size());
  for (int k = 0; k < c.k; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    c.rho_k.push_back(aging_correlation(relative_speed(v.v2v_tx[ks], v.v2v_rx[ks], p.min_relative_speed), p));
  }
  for (int m = 0; m < c.m; ++m) {
    for (int k = 0; k < c.k; ++k) {
      const double s = relative_speed(v.v2u_tx[static_cast<std::size_t>(m)], v.v2v_rx[static_cast<std::size_t>(k)],
                                      p.min_relative_speed);
      c.rho_mk.push_back(aging_correlation(s, p));
    }
  }
  return c;
}

FadingState draw_fading(const AgingCorrelation& corr, Rng& rng) {
  FadingState f;
  f.m = corr.m;
  f.k = corr.k;
  const auto m = static_cast<std::size_t>(corr.m);
  const auto k = static_cast<std::size_t>(corr.k);
  auto draw = [&rng](std::size_t n) {
    std::vector<Complex> out(n);
    for (auto& g : out) g = draw_complex_gaussian(rng);
    return out;
  };
  f.g_u_m = draw(m);
  f.g_u_k = draw(k);
  f.g_v_k_hat = draw(k);
  f.g_v_mk_hat = draw(m * k);
  f.g_v_k.resize(k);
  for (std::size_t i = 0; i < k; ++i) f.g_v_k[i] = age_fading(f.g_v_k_hat[i], corr.rho_k[i], rng);
  f.g_v_mk.resize(m * k);
  for (std::size_t i = 0; i < m * k; ++i) f.g_v_mk[i] = age_fading(f.g_v_mk_hat[i], corr.rho_mk[i], rng);
  return f;
}

LinkGains assemble_gains(const UavState& uav, const LinkVehicles& v, const FadingState& f, const ChannelParams& p) {
  const int m_links = static_cast<int>(v.v2u_tx.size());
  const int k_links = static_cast<int>(v.v2v_tx.size());
  if (f.m != m_links || f.k != k_links || v.v2v_rx.size() != v.v2v_tx.size()) {
    throw std::invalid_argument("fading dimensions do not match the link roster");
  }
  LinkGains g;
  g.m = m_links;
  g.k = k_links;
  auto large = [](double pl_db) { return 1.0 / db_to_linear(pl_db); };
  for (int m = 0; m < m_links; ++m) {
    const auto ms = static_cast<std::size_t>(m);
    g.h_u_m.push_back(std::norm(f.g_u_m[ms]) * large(v2u_path_loss_db(uav, v.v2u_tx[ms], p)));
  }
  for (int k = 0; k < k_links; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    g.h_u_k.push_back(std::norm(f.g_u_k[ks]) * large(v2u_path_loss_db(uav, v.v2v_tx[ks], p)));
    const double l = large(v2v_path_loss_db(v.v2v_tx[ks], v.v2v_rx[ks]));
    g.large_v_k.push_back(l);
    g.h_v_k.push_back(std::norm(f.g_v_k[ks]) * l);
    g.h_v_k_hat.push_back(std::norm(f.g_v_k_hat[ks]) * l);
  }
  for (int m = 0; m < m_links; ++m) {
    for (int k = 0; k < k_links; ++k) {
      const std::size_t i = g.mk(m, k);
      const double l = large(v2v_path_loss_db(v.v2u_tx[static_cast<std::size_t>(m)], v.v2v_rx[static_cast<std::size_t>(k)]));
      g.large_v_mk.push_back(l);
      g.h_v_mk.push_back(std::norm(f.g_v_mk[i]) * l);
      g.h_v_mk_hat.push_back(std::norm(f.g_v_mk_hat[i]) * l);
    }
  }
  return g;
}

double v2u_sinr(int m, const LinkGains& g, const FeasibleAction& a, const ChannelParams& p) {
  const auto ms = static_cast<std::size_t>(m);
  double interference = 0.0;
  for (int k = 0; k < g.k; ++k) {
    if (a.x(k, m)) interference += a.p_k[static_cast<std::size_t>(k)] * g.h_u_k[static_cast<std::size_t>(k)];
  }
  return a.p_m[ms] * g.h_u_m[ms] / (interference + p.noise_power());
}

double v2v_sinr(int k, const LinkGains& g, const FeasibleAction& a, const ChannelParams& p) {
  const auto ks = static_cast<std::size_t>(k);
  double interference = 0.0;
  for (int m = 0; m < g.m; ++m) {
    if (a.x(k, m)) interference += a.p_m[static_cast<std::size_t>(m)] * g.h_v_mk[g.mk(m, k)];
  }
  return a.p_k[ks] * g.h_v_k[ks] / (interference + p.noise_power());
}

double shannon_rate(double sinr, const ChannelParams& p) { return p.bandwidth * std::log2(1.0 + sinr); }

}  // namespace uavnet
