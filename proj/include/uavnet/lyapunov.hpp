#pragma once

namespace uavnet {

/// Virtual energy queue Q(t): backlog of flight energy spent above the
/// per-slot budget.
struct VirtualQueue {
  double q = 0.0;             // J
  double e_threshold = 120.0; // J per slot
  double slot_duration = 1.0; // s
};

struct LyapunovConfig {
  double v_weight = 100.0;
};

/// Q' = max(Q + P*dt - E_th, 0). Power may be negative when descent credits
/// energy; the update is well defined either way.
VirtualQueue queue_update(const VirtualQueue& queue, double power);

/// L(Q) = Q^2 / 2.
double lyapunov_value(const VirtualQueue& queue);

/// Per-slot drift-plus-penalty minimand Q (P dt - E_th) - V * mean_rate.
/// The (P dt - E_th)^2 / 2 constant of the bound is omitted.
double drift_plus_penalty_objective(const VirtualQueue& queue, double power, double mean_rate,
                                    const LyapunovConfig& config);

/// Q(t+1) >= Q(t) + P dt - E_th.
bool check_queue_lower_bound(double q_before, double q_after, double power, double e_threshold,
                             double slot_duration = 1.0);

/// (Q(t+1)^2 - Q(t)^2)/2 <= Q(t) (P dt - E_th) + (P dt - E_th)^2 / 2, up to a
/// relative rounding allowance of 1e-12.
bool check_drift_bound(double q_before, double q_after, double power, double e_threshold,
                       double slot_duration = 1.0);

}  // namespace uavnet
