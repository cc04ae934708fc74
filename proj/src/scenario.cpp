#include "uavnet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace uavnet {

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::size_t NetworkScenario::state_dim() const {
  const auto m = static_cast<std::size_t>(m_links);
  const auto k = static_cast<std::size_t>(k_links);
  return m * k + 2 * k + m + 1;
}

std::size_t NetworkScenario::action_dim() const { return ActionLayout{m_links, k_links}.size(); }

void NetworkScenario::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (m_links < 1) fail("m_links must be >= 1");
  if (k_links < 1) fail("k_links must be >= 1");
  if (k_links > m_links) fail("k_links must not exceed m_links");
  if (num_slots < 1) fail("num_slots must be >= 1");
  if (!(slot_duration > 0.0)) fail("slot_duration must be positive");
  if (!(p_max > 0.0)) fail("p_max must be positive");
  if (!(altitude_bounds.min > 0.0) || !(altitude_bounds.min < altitude_bounds.max)) {
    fail("altitude bounds must satisfy 0 < H_min < H_max");
  }
  if (!(max_delta_h > 0.0)) fail("max_delta_h must be positive");
  if (!(gamma_v_th > 0.0)) fail("gamma_v_th must be positive");
  if (!(pr_v_th > 0.0 && pr_v_th < 1.0)) fail("pr_v_th must lie in (0, 1)");
  if (!(e_th > 0.0)) fail("e_th must be positive");
  if (outage_penalty < 0.0) fail("outage_penalty must be non-negative");
  if (!(reward_rate_unit > 0.0)) fail("reward_rate_unit must be positive");
  if (outage_samples < 1) fail("outage_samples must be >= 1");
  if (initial_altitude < altitude_bounds.min || initial_altitude > altitude_bounds.max) {
    fail("initial_altitude outside altitude bounds");
  }
  if (uav_speed < 0.0) fail("uav_speed must be non-negative");
  if (pairing.v2u_tx.size() != static_cast<std::size_t>(m_links)) fail("pairing.v2u_tx must have M entries");
  if (pairing.v2v_tx.size() != static_cast<std::size_t>(k_links)) fail("pairing.v2v_tx must have K entries");
  if (pairing.v2v_rx.size() != static_cast<std::size_t>(k_links)) fail("pairing.v2v_rx must have K entries");
  for (int k = 0; k < k_links; ++k) {
    if (pairing.v2v_tx[static_cast<std::size_t>(k)] == pairing.v2v_rx[static_cast<std::size_t>(k)]) {
      fail("V2V link " + std::to_string(k) + " has identical Tx and Rx");
    }
  }
}

LinkPairing default_pairing(const std::vector<int>& ids, int m_links, int k_links) {
  const auto needed = static_cast<std::size_t>(m_links + 2 * k_links);
  if (m_links < 1 || k_links < 1) throw std::invalid_argument("link counts must be positive");
  if (ids.size() < needed) {
    throw std::invalid_argument("default pairing needs M + 2K = " + std::to_string(needed) + " vehicles, trace has " +
                                std::to_string(ids.size()));
  }
  LinkPairing p;
  std::size_t i = 0;
  for (int k = 0; k < k_links; ++k) {
    p.v2v_tx.push_back(ids[i++]);
    p.v2v_rx.push_back(ids[i++]);
  }
  for (int m = 0; m < m_links; ++m) p.v2u_tx.push_back(ids[i++]);
  return p;
}

int FeasibleAction::sharer_of(int channel) const {
  for (int link = 0; link < k; ++link) {
    if (channel_of[static_cast<std::size_t>(link)] == channel) return link;
  }
  return -1;
}

}  // namespace uavnet
