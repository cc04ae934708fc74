#pragma once

#include <complex>
#include <random>
#include <vector>

#include "uavnet/mobility.hpp"
#include "uavnet/scenario.hpp"

namespace uavnet {

using Complex = std::complex<double>;
using Rng = std::mt19937_64;

struct ChannelParams {
  double carrier_frequency = 5.9e9;                        // Hz
  double bandwidth = 2e6;                                  // Hz per channel
  double noise_psd = dbm_to_watts(-174.0);                 // W/Hz
  double alpha_los = 1.0;                                  // dB
  double alpha_nlos = 20.0;                                // dB
  double env_a = 12.08;
  double env_b = 0.11;
  double light_speed = 299792458.0;                        // m/s
  double t_delay = 0.01;                                   // s
  /// Floor on per-link relative speed used for CSI aging.
  double min_relative_speed = 1.5;                         // m/s

  double noise_power() const { return noise_psd * bandwidth; }
  void validate() const;
};

/// Zero-order Bessel function of the first kind.
///
/// Evaluated as the periodic trapezoid rule on J0(x) = (1/2pi) * integral of
/// cos(x sin t) over a full period, which converges geometrically once the
/// node count exceeds |x|. Absolute error stays near machine precision.
double bessel_j0(double x);

/// Elevation-angle LoS probability, theta in radians.
double los_probability_from_angle(double theta, const ChannelParams& params);
double los_probability(const UavState& uav, const VehicleState& vehicle, const ChannelParams& params);

/// Free-space term 20 log10(4 pi f_c d / c) in dB. Throws InvalidGeometryError for d <= 0.
double free_space_loss_db(double distance_3d, const ChannelParams& params);
/// LoS/NLoS mixture, averaged in dB.
double v2u_path_loss_db(double distance_3d, double pr_los, const ChannelParams& params);
double v2u_path_loss_db(const UavState& uav, const VehicleState& vehicle, const ChannelParams& params);

double v2v_path_loss_db(double distance);
double v2v_path_loss_db(const VehicleState& tx, const VehicleState& rx);

Complex draw_complex_gaussian(Rng& rng, double variance = 1.0);

/// J0(2 pi f_c s_rel T_delay / c).
double aging_correlation(double relative_speed, const ChannelParams& params);
/// First-order Gauss-Markov step: rho * g_hat + delta, delta ~ CN(0, 1 - rho^2).
/// Always consumes two normal draws so the stream does not depend on the delay.
Complex age_fading(Complex g_hat, double correlation, Rng& rng);
Complex age_fading(Complex g_hat, double relative_speed, const ChannelParams& params, Rng& rng);

/// Vehicles in their link roles for one slot.
struct LinkVehicles {
  std::vector<VehicleState> v2u_tx;  // M
  std::vector<VehicleState> v2v_tx;  // K
  std::vector<VehicleState> v2v_rx;  // K
};

/// Gauss-Markov correlation per V2V-family link.
struct AgingCorrelation {
  int m = 0;
  int k = 0;
  std::vector<double> rho_k;   // K, desired V2V links
  std::vector<double> rho_mk;  // M*K, V2U Tx m -> V2V Rx k, index m*K + k
};

AgingCorrelation aging_correlations(const LinkVehicles& vehicles, const ChannelParams& params);

/// Small-scale fading for one slot. V2V families carry both the reported
/// (pre-delay) coefficient and the aged one actually seen by the receiver.
struct FadingState {
  int m = 0;
  int k = 0;
  std::vector<Complex> g_u_m;       // M
  std::vector<Complex> g_u_k;       // K
  std::vector<Complex> g_v_k_hat;   // K
  std::vector<Complex> g_v_mk_hat;  // M*K
  std::vector<Complex> g_v_k;       // K, aged
  std::vector<Complex> g_v_mk;      // M*K, aged
};

FadingState draw_fading(const AgingCorrelation& correlation, Rng& rng);

/// Linear power gains. V2V families exist in aged and pre-delay forms; the
/// large-scale factors 1/PL are kept for outage sampling.
struct LinkGains {
  int m = 0;
  int k = 0;
  std::vector<double> h_u_m;       // M
  std::vector<double> h_u_k;       // K
  std::vector<double> h_v_k;       // K, aged
  std::vector<double> h_v_mk;      // M*K, aged
  std::vector<double> h_v_k_hat;   // K
  std::vector<double> h_v_mk_hat;  // M*K
  std::vector<double> large_v_k;   // K, 1/PL
  std::vector<double> large_v_mk;  // M*K, 1/PL

  std::size_t mk(int m_index, int k_index) const { return static_cast<std::size_t>(m_index * k + k_index); }
};

LinkGains assemble_gains(const UavState& uav, const LinkVehicles& vehicles, const FadingState& fading,
                         const ChannelParams& params);

/// SINR of V2U link m on the true channel.
double v2u_sinr(int m, const LinkGains& gains, const FeasibleAction& action, const ChannelParams& params);
/// SINR of V2V link k on the aged channel.
double v2v_sinr(int k, const LinkGains& gains, const FeasibleAction& action, const ChannelParams& params);
/// Shannon rate B log2(1 + sinr) in bit/s.
double shannon_rate(double sinr, const ChannelParams& params);

}  // namespace uavnet
