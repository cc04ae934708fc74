#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace uavnet {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance(const Vec2& a, const Vec2& b);

struct VehicleState {
  int id = 0;
  Vec2 position;       // m
  double speed = 0.0;  // m/s, >= 0
};

struct UavState {
  Vec2 horizontal_position;  // m
  double altitude = 100.0;   // m
  Vec3 velocity;             // m/s
};

struct AltitudeBounds {
  double min = 50.0;
  double max = 200.0;
};

/// Per-slot vehicle snapshots. Every slot holds the same ids, sorted ascending.
class MobilityTrace {
 public:
  MobilityTrace(std::vector<std::vector<VehicleState>> slots, double slot_duration);

  std::size_t num_slots() const { return slots_.size(); }
  double slot_duration() const { return slot_duration_; }
  const std::vector<VehicleState>& slot(std::size_t t) const { return slots_.at(t); }
  const std::vector<int>& vehicle_ids() const { return ids_; }
  bool has_vehicle(int id) const;
  /// Throws std::out_of_range for unknown ids.
  const VehicleState& vehicle(std::size_t t, int id) const;

  void write_csv(std::ostream& out) const;

 private:
  std::vector<std::vector<VehicleState>> slots_;
  std::vector<int> ids_;
  double slot_duration_;
};

/// Parses the `slot,vehicle_id,x_m,y_m,speed_mps` CSV format.
MobilityTrace load_trace(const std::filesystem::path& path, double slot_duration = 1.0);
MobilityTrace parse_trace(std::istream& in, double slot_duration = 1.0);

struct PlatoonOptions {
  int n_vehicles = 12;
  double mean_speed = 50.0 / 3.6;  // m/s
  double spacing = 25.0;           // m, nominal bumper-to-bumper gap
  std::size_t num_slots = 100;
  double slot_duration = 1.0;
  /// Positions deviate from the rigid platoon by at most this much (uniform).
  double position_jitter = 0.5;
  double lane_offset = 0.0;  // y coordinate of the lane
};

/// Single-lane platoon on a 1-D highway. Reported speeds are the forward
/// differences of the emitted positions, so kinematics stay self-consistent.
MobilityTrace generate_platoon(const PlatoonOptions& options, std::uint64_t seed);

/// Moves the UAV along +x by `horizontal_speed * dt` and applies the altitude
/// change, clamped to `bounds`. `v_z` is the realized vertical rate.
UavState advance_uav(const UavState& state, double horizontal_speed, double delta_h, double dt,
                     double max_delta_h, const AltitudeBounds& bounds);

/// |speed difference| floored at `floor`.
double relative_speed(const VehicleState& a, const VehicleState& b, double floor);

}  // namespace uavnet
