#include "pcrm/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace pcrm {

double manhattan_dist(Point a, Point b) noexcept {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

double euclidean_dist(Point a, Point b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::string_view to_string(RequestState s) noexcept {
  switch (s) {
    case RequestState::pending: return "pending";
    case RequestState::assigned: return "assigned";
    case RequestState::on_board: return "on_board";
    case RequestState::completed: return "completed";
    case RequestState::rejected: return "rejected";
  }
  return "unknown";
}

TripRequest::TripRequest(RequestId id_, Point origin_, Point destination_,
                         double release_time_, double patience_)
    : id(id_),
      origin(origin_),
      destination(destination_),
      release_time(release_time_),
      patience(patience_) {
  if (!std::isfinite(origin.x) || !std::isfinite(origin.y) ||
      !std::isfinite(destination.x) || !std::isfinite(destination.y)) {
    throw std::invalid_argument("trip request coordinates must be finite");
  }
  if (!(patience > 0.0)) {
    throw std::invalid_argument("trip request patience must be positive");
  }
  if (origin == destination) {
    throw std::invalid_argument("trip request origin equals destination");
  }
  if (!std::isfinite(release_time)) {
    throw std::invalid_argument("trip request release time must be finite");
  }
}

namespace {

[[noreturn]] void bad_transition(const TripRequest& r, std::string_view to) {
  throw std::logic_error("request " + std::to_string(r.id) + ": illegal transition " +
                         std::string(to_string(r.state())) + " -> " + std::string(to));
}

}  // namespace

void TripRequest::assign(double t) {
  if (state_ != RequestState::pending) bad_transition(*this, "assigned");
  if (t < release_time) throw std::logic_error("assignment before release");
  state_ = RequestState::assigned;
  assigned_time_ = t;
}

void TripRequest::pick_up(double t) {
  if (state_ != RequestState::assigned) bad_transition(*this, "on_board");
  if (t < *assigned_time_) throw std::logic_error("pickup before assignment");
  state_ = RequestState::on_board;
  pickup_time_ = t;
}

void TripRequest::drop_off(double t) {
  if (state_ != RequestState::on_board) bad_transition(*this, "completed");
  if (t < *pickup_time_) throw std::logic_error("dropoff before pickup");
  state_ = RequestState::completed;
  dropoff_time_ = t;
}

void TripRequest::reject(double t) {
  if (state_ != RequestState::pending) bad_transition(*this, "rejected");
  state_ = RequestState::rejected;
  rejected_time_ = t;
}

double single_drive_time(const TripRequest& r, double speed) {
  if (!(speed > 0.0)) throw std::invalid_argument("speed must be positive");
  return manhattan_dist(r.origin, r.destination) / speed;
}

int Vehicle::onboard_count() const noexcept {
  return static_cast<int>(std::count_if(riders.begin(), riders.end(),
                                        [](const RiderRecord& r) { return r.on_board(); }));
}

const RiderRecord* Vehicle::find_rider(RequestId rid) const noexcept {
  auto it = std::find_if(riders.begin(), riders.end(),
                         [rid](const RiderRecord& r) { return r.request_id == rid; });
  return it == riders.end() ? nullptr : &*it;
}

double route_length(Point start, const std::vector<RouteStop>& route) noexcept {
  double total = 0.0;
  Point at = start;
  for (const auto& s : route) {
    total += manhattan_dist(at, s.location);
    at = s.location;
  }
  return total;
}

bool route_feasible(const std::vector<RouteStop>& route, int initial_load, int capacity) {
  if (initial_load < 0 || initial_load > capacity) return false;
  std::unordered_set<RequestId> picked;
  std::unordered_set<RequestId> dropped;
  int load = initial_load;
  int orphan_dropoffs = 0;
  for (const auto& s : route) {
    if (s.kind == StopKind::pickup) {
      if (picked.contains(s.request_id) || dropped.contains(s.request_id)) return false;
      picked.insert(s.request_id);
      ++load;
    } else {
      if (dropped.contains(s.request_id)) return false;
      dropped.insert(s.request_id);
      if (!picked.contains(s.request_id)) ++orphan_dropoffs;
      --load;
    }
    if (load > capacity || load < 0) return false;
  }
  for (RequestId id : picked) {
    if (!dropped.contains(id)) return false;
  }
  return orphan_dropoffs == initial_load;
}

bool vehicle_consistent(const Vehicle& v) {
  const int onboard = v.onboard_count();
  if (onboard > v.capacity) return false;
  std::unordered_map<RequestId, std::pair<int, int>> counts;  // pickups, dropoffs
  for (const auto& s : v.route) {
    auto& c = counts[s.request_id];
    (s.kind == StopKind::pickup ? c.first : c.second)++;
  }
  if (counts.size() != v.riders.size()) return false;
  for (const auto& r : v.riders) {
    auto it = counts.find(r.request_id);
    if (it == counts.end()) return false;
    const auto [p, d] = it->second;
    if (d != 1) return false;
    if (r.on_board() ? p != 0 : p != 1) return false;
  }
  return route_feasible(v.route, onboard, v.capacity);
}

void ZoneParams::validate() const {
  if (!(r_s > 0.0)) throw std::invalid_argument("R_s must be positive");
  if (!(phi > 0.0 && phi <= 90.0)) throw std::invalid_argument("phi must lie in (0, 90]");
  if (!(n_s_init > 0.0 && n_s_init <= 2.0)) throw std::invalid_argument("N_s must lie in (0, 2]");
  if (!(n_d_init > 0.0 && n_d_init <= 1.0)) throw std::invalid_argument("N_d must lie in (0, 1]");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (c_w < 0.0 || c_t < 0.0) throw std::invalid_argument("C_w and C_t must be non-negative");
}

void Weights::validate() const {
  if (alpha < 0.0 || beta < 0.0 || gamma < 0.0) {
    throw std::invalid_argument("UI weights must be non-negative");
  }
}

}  // namespace pcrm
