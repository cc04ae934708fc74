#pragma once

#include "uavnet/mobility.hpp"

namespace uavnet {

/// Rotary-wing propulsion constants.
struct PowerModelParams {
  double p0_hover_blade = 79.86;     // W
  double p1_hover_induced = 88.63;   // W
  double omega = 300.0;              // rad/s
  double rotor_radius = 0.4;         // m
  double v0_induced = 4.03;          // m/s
  double d0_drag_ratio = 0.3;
  double air_density = 1.225;        // kg/m^3
  double rotor_solidity = 0.05;
  double rotor_disc_area = 0.503;    // m^2
  double weight = 20.0;              // N
  /// Floor on horizontal speed in the induced-power denominator.
  double v_h_epsilon = 0.1;          // m/s
  /// Off: descent credits energy through the signed G*v_z term.
  bool clamp_vertical_at_zero = false;

  void validate() const;
};

struct PowerBreakdown {
  double blade = 0.0;
  double induced = 0.0;
  double parasite = 0.0;
  double vertical = 0.0;
  double total() const { return blade + induced + parasite + vertical; }
};

PowerBreakdown propulsion_power_terms(const Vec3& velocity, const PowerModelParams& params);

/// Flight power in W for the given 3-D velocity.
double propulsion_power(const Vec3& velocity, const PowerModelParams& params);

}  // namespace uavnet
