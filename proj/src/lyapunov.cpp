#include "uavnet/lyapunov.hpp"

#include <algorithm>
#include <cmath>

namespace uavnet {

namespace {
double excess(double power, double e_threshold, double dt) { return power * dt - e_threshold; }
}  // namespace

VirtualQueue queue_update(const VirtualQueue& queue, double power) {
  VirtualQueue next = queue;
  next.q = std::max(queue.q + excess(power, queue.e_threshold, queue.slot_duration), 0.0);
  return next;
}

double lyapunov_value(const VirtualQueue& queue) { return 0.5 * queue.q * queue.q; }

double drift_plus_penalty_objective(const VirtualQueue& queue, double power, double mean_rate,
                                    const LyapunovConfig& config) {
  return queue.q * excess(power, queue.e_threshold, queue.slot_duration) - config.v_weight * mean_rate;
}

bool check_queue_lower_bound(double q_before, double q_after, double power, double e_threshold,
                             double slot_duration) {
  return q_after >= q_before + excess(power, e_threshold, slot_duration);
}

bool check_drift_bound(double q_before, double q_after, double power, double e_threshold, double slot_duration) {
  const double y = excess(power, e_threshold, slot_duration);
  const double lhs = 0.5 * (q_after * q_after - q_before * q_before);
  const double rhs = q_before * y + 0.5 * y * y;
  const double scale = std::max({1.0, q_after * q_after, q_before * q_before, y * y});
  return lhs <= rhs + 1e-12 * scale;
}

}  // namespace uavnet
