#include "uavnet/mobility.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "uavnet/errors.hpp"

namespace uavnet {

double distance(const Vec2& a, const Vec2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

MobilityTrace::MobilityTrace(std::vector<std::vector<VehicleState>> slots, double slot_duration)
    : slots_(std::move(slots)), slot_duration_(slot_duration) {
  if (slots_.empty()) throw InconsistentTraceError("trace has no slots");
  if (!(slot_duration_ > 0.0)) throw std::invalid_argument("slot duration must be positive");
  for (auto& s : slots_) {
    std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  }
  for (const auto& v : slots_.front()) ids_.push_back(v.id);
  if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end()) {
    throw InconsistentTraceError("duplicate vehicle id in slot 0");
  }
  for (std::size_t t = 0; t < slots_.size(); ++t) {
    const auto& s = slots_[t];
    if (s.size() != ids_.size() ||
        !std::equal(s.begin(), s.end(), ids_.begin(), [](const auto& v, int id) { return v.id == id; })) {
      throw InconsistentTraceError("slot " + std::to_string(t) + " does not carry the vehicle ids of slot 0");
    }
    for (const auto& v : s) {
      if (!std::isfinite(v.position.x) || !std::isfinite(v.position.y) || !std::isfinite(v.speed) ||
          v.speed < 0.0) {
        throw InconsistentTraceError("vehicle " + std::to_string(v.id) + " in slot " + std::to_string(t) +
                                     " has a non-finite position or negative speed");
      }
    }
  }
}

bool MobilityTrace::has_vehicle(int id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }

const VehicleState& MobilityTrace::vehicle(std::size_t t, int id) const {
  const auto& s = slots_.at(t);
  auto it = std::lower_bound(s.begin(), s.end(), id, [](const VehicleState& v, int key) { return v.id < key; });
  if (it == s.end() || it->id != id) throw std::out_of_range("unknown vehicle id " + std::to_string(id));
  return *it;
}

void MobilityTrace::write_csv(std::ostream& out) const {
  out << "slot,vehicle_id,x_m,y_m,speed_mps\n";
  out << std::setprecision(17);
  for (std::size_t t = 0; t < slots_.size(); ++t) {
    for (const auto& v : slots_[t]) {
      out << t << ',' << v.id << ',' << v.position.x << ',' << v.position.y << ',' << v.speed << '\n';
    }
  }
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

MobilityTrace parse_trace(std::istream& in, double slot_duration) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw MalformedTraceError("line 1: empty trace file (missing header)");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
  if (line != "slot,vehicle_id,x_m,y_m,speed_mps") {
    throw MalformedTraceError("line 1: expected header 'slot,vehicle_id,x_m,y_m,speed_mps'");
  }

  std::map<long, std::vector<VehicleState>> by_slot;
  long last_slot = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (f.size() != 5) throw MalformedTraceError(where + "expected 5 fields, got " + std::to_string(f.size()));
    long slot = 0;
    int id = 0;
    VehicleState v;
    if (!parse_number(f[0], slot) || slot < 0) throw MalformedTraceError(where + "bad slot '" + f[0] + "'");
    if (!parse_number(f[1], id)) throw MalformedTraceError(where + "bad vehicle_id '" + f[1] + "'");
    if (!parse_number(f[2], v.position.x) || !parse_number(f[3], v.position.y) || !parse_number(f[4], v.speed)) {
      throw MalformedTraceError(where + "bad numeric field");
    }
    if (slot < last_slot) throw MalformedTraceError(where + "slots must be ascending");
    last_slot = slot;
    v.id = id;
    auto& bucket = by_slot[slot];
    for (const auto& other : bucket) {
      if (other.id == id) {
        throw InconsistentTraceError(where + "vehicle " + std::to_string(id) + " repeated in slot " +
                                     std::to_string(slot));
      }
    }
    bucket.push_back(v);
  }
  if (by_slot.empty()) throw MalformedTraceError("line " + std::to_string(line_no) + ": trace has no data rows");

  std::vector<std::vector<VehicleState>> slots;
  long expected = 0;
  for (auto& [slot, vehicles] : by_slot) {
    if (slot != expected) throw InconsistentTraceError("missing slot " + std::to_string(expected));
    slots.push_back(std::move(vehicles));
    ++expected;
  }
  return MobilityTrace(std::move(slots), slot_duration);
}

MobilityTrace load_trace(const std::filesystem::path& path, double slot_duration) {
  std::ifstream in(path);
  if (!in) throw MalformedTraceError("cannot open trace file " + path.string());
  return parse_trace(in, slot_duration);
}

MobilityTrace generate_platoon(const PlatoonOptions& o, std::uint64_t seed) {
  if (o.n_vehicles < 2) throw std::invalid_argument("platoon needs at least 2 vehicles");
  if (!(o.spacing > 0.0)) throw std::invalid_argument("platoon spacing must be positive");
  if (o.num_slots < 1) throw std::invalid_argument("platoon needs at least one slot");
  if (!(o.slot_duration > 0.0)) throw std::invalid_argument("slot duration must be positive");
  if (o.mean_speed < 0.0) throw std::invalid_argument("mean speed must be non-negative");
  if (o.position_jitter < 0.0 || 2.0 * o.position_jitter >= o.spacing) {
    throw std::invalid_argument("position jitter must lie in [0, spacing/2)");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter_dist(-o.position_jitter, o.position_jitter);
  const auto n = static_cast<std::size_t>(o.n_vehicles);
  // One extra jitter sample per vehicle so the last slot has a forward difference too.
  std::vector<std::vector<double>> jitter(o.num_slots + 1, std::vector<double>(n, 0.0));
  if (o.position_jitter > 0.0) {
    for (auto& row : jitter)
      for (auto& e : row) e = jitter_dist(rng);
  }

  const double dt = o.slot_duration;
  std::vector<std::vector<VehicleState>> slots(o.num_slots);
  for (std::size_t t = 0; t < o.num_slots; ++t) {
    auto& s = slots[t];
    s.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x0 = static_cast<double>(n - 1 - i) * o.spacing;
      VehicleState v;
      v.id = static_cast<int>(i);
      v.position.x = x0 + o.mean_speed * static_cast<double>(t) * dt + jitter[t][i];
      v.position.y = o.lane_offset;
      v.speed = std::max(0.0, o.mean_speed + (jitter[t + 1][i] - jitter[t][i]) / dt);
      s.push_back(v);
    }
  }
  return MobilityTrace(std::move(slots), dt);
}

UavState advance_uav(const UavState& state, double horizontal_speed, double delta_h, double dt,
                     double max_delta_h, const AltitudeBounds& bounds) {
  if (!(dt > 0.0)) throw std::invalid_argument("slot duration must be positive");
  if (!(std::abs(delta_h) <= max_delta_h)) {
    throw std::invalid_argument("altitude change exceeds the per-slot limit");
  }
  UavState next = state;
  next.horizontal_position.x += horizontal_speed * dt;
  next.altitude = std::clamp(state.altitude + delta_h, bounds.min, bounds.max);
  next.velocity = {horizontal_speed, 0.0, (next.altitude - state.altitude) / dt};
  return next;
}

double relative_speed(const VehicleState& a, const VehicleState& b, double floor) {
  return std::max(std::abs(a.speed - b.speed), floor);
}

}  // namespace uavnet
