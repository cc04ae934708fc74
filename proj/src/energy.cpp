#include "uavnet/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavnet {

void PowerModelParams::validate() const {
  for (double v : {p0_hover_blade, p1_hover_induced, omega, rotor_radius, v0_induced, d0_drag_ratio, air_density,
                   rotor_solidity, rotor_disc_area, weight, v_h_epsilon}) {
    if (!(v > 0.0)) throw std::invalid_argument("power model constants must be positive");
  }
}

PowerBreakdown propulsion_power_terms(const Vec3& v, const PowerModelParams& p) {
  const double vh2 = v.x * v.x + v.y * v.y;
  PowerBreakdown b;
  b.blade = p.p0_hover_blade * (1.0 + 3.0 * vh2 / (p.omega * p.omega * p.rotor_radius * p.rotor_radius));
  // The induced term divides by V_h^2 (not the usual root form); the guard keeps hover finite.
  b.induced = p.p1_hover_induced * p.v0_induced / std::max(vh2, p.v_h_epsilon * p.v_h_epsilon);
  b.parasite = 0.5 * p.d0_drag_ratio * p.air_density * p.rotor_solidity * p.rotor_disc_area * vh2 * std::sqrt(vh2);
  b.vertical = p.weight * (p.clamp_vertical_at_zero ? std::max(v.z, 0.0) : v.z);
  return b;
}

double propulsion_power(const Vec3& velocity, const PowerModelParams& params) {
  return propulsion_power_terms(velocity, params).total();
}

}  // namespace uavnet
