#pragma once

#include <cstddef>
#include <vector>

#include "uavnet/mobility.hpp"

namespace uavnet {

double dbm_to_watts(double dbm);
double db_to_linear(double db);

/// Which trace vehicles play which role. Sizes are M, K and K.
struct LinkPairing {
  std::vector<int> v2u_tx;
  std::vector<int> v2v_tx;
  std::vector<int> v2v_rx;
};

/// Counts, limits and thresholds of one network instance.
struct NetworkScenario {
  int m_links = 10;
  int k_links = 10;
  std::size_t num_slots = 100;
  double slot_duration = 1.0;           // s
  double p_max = dbm_to_watts(23.0);    // W
  AltitudeBounds altitude_bounds{50.0, 200.0};
  double max_delta_h = 5.0;             // m per slot
  double gamma_v_th = db_to_linear(10.0);
  double pr_v_th = 0.01;
  double e_th = 120.0;                  // J per slot
  double outage_penalty = 10.0;         // per violating V2V link
  /// Rates enter the reward in units of this many bit/s (1e6: Mbit/s).
  double reward_rate_unit = 1e6;
  int outage_samples = 500;
  double initial_altitude = 100.0;      // m
  double uav_speed = 50.0 / 3.6;        // m/s
  LinkPairing pairing;

  std::size_t state_dim() const;
  std::size_t action_dim() const;
  /// Throws std::invalid_argument naming the violated invariant.
  void validate() const;
};

/// V2V links take the first 2K trace ids as (Tx, Rx) pairs; the next M ids
/// transmit to the UAV.
LinkPairing default_pairing(const std::vector<int>& vehicle_ids, int m_links, int k_links);

/// Raw policy output, every entry in [-1, 1]. Layout: K*M channel scores
/// (row-major by V2V link), K V2V powers, M V2U powers, one altitude entry.
struct MdpAction {
  std::vector<double> raw;
};

struct ActionLayout {
  int m = 0;
  int k = 0;
  std::size_t score(int link, int channel) const { return static_cast<std::size_t>(link * m + channel); }
  std::size_t v2v_power(int link) const { return static_cast<std::size_t>(k * m + link); }
  std::size_t v2u_power(int link) const { return static_cast<std::size_t>(k * m + k + link); }
  std::size_t altitude() const { return static_cast<std::size_t>(k * m + k + m); }
  std::size_t size() const { return altitude() + 1; }
};

/// Action after projection onto the feasible set.
struct FeasibleAction {
  int m = 0;
  int k = 0;
  std::vector<int> channel_of;    // K entries: channel index of each V2V link
  std::vector<double> p_m;        // W
  std::vector<double> p_k;        // W
  double delta_h = 0.0;           // m

  /// x_{k,m} in {0,1}.
  int x(int link, int channel) const { return channel_of[static_cast<std::size_t>(link)] == channel ? 1 : 0; }
  /// V2V link sharing `channel`, or -1.
  int sharer_of(int channel) const;
};

}  // namespace uavnet
