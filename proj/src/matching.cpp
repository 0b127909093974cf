#include "pcrm/matching.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pcrm {

std::string_view to_string(StrategyKind k) noexcept {
  switch (k) {
    case StrategyKind::pcrm: return "pcrm";
    case StrategyKind::ddm: return "ddm";
    case StrategyKind::og: return "og";
  }
  return "unknown";
}

StrategyKind parse_strategy(std::string_view name) {
  if (name == "pcrm") return StrategyKind::pcrm;
  if (name == "ddm") return StrategyKind::ddm;
  if (name == "og") return StrategyKind::og;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

void StrategyConfig::validate() const {
  zone.validate();
  if (kind == StrategyKind::ddm &&
      !(ddm.near_width > 0.0 && ddm.far_width > 0.0 && ddm.depth > 0.0)) {
    throw std::invalid_argument("DDM trapezoid widths and depth must be positive");
  }
}

namespace {

Point slot_prev(const std::vector<RouteStop>& route, Point pos, std::size_t slot) {
  return slot == 0 ? pos : route[slot - 1].location;
}

double single_insertion_cost(const std::vector<RouteStop>& route, Point pos, Point stop,
                             std::size_t slot) {
  const Point prev = slot_prev(route, pos, slot);
  if (slot == route.size()) return manhattan_dist(prev, stop);
  const Point next = route[slot].location;
  return manhattan_dist(prev, stop) + manhattan_dist(stop, next) - manhattan_dist(prev, next);
}

bool pair_fits(const std::vector<int>& load_before, int capacity, std::size_t p,
               std::size_t d) {
  for (std::size_t k = p; k <= d; ++k) {
    if (load_before[k] + 1 > capacity) return false;
  }
  return true;
}

// Keeps the lexicographically smallest (added, a, b) with an eps-tolerant
// comparison on added.
template <typename Key>
bool better(double added, const Key& key, double best_added, const Key& best_key) {
  if (added < best_added - kTieEps) return true;
  if (added > best_added + kTieEps) return false;
  return key < best_key;
}

struct SlotPair {
  std::size_t p;
  std::size_t d;
  auto operator<=>(const SlotPair&) const = default;
};

// Cheapest feasible (pickup, dropoff) pair over all slots.
std::optional<MatchDecision> best_pair(const Vehicle& v, const TripRequest& r) {
  const auto loads = load_profile(v.route, v.onboard_count());
  const std::size_t n = v.route.size();
  std::optional<MatchDecision> best;
  for (std::size_t p = 0; p <= n; ++p) {
    if (loads[p] + 1 > v.capacity) continue;
    for (std::size_t d = p; d <= n; ++d) {
      if (loads[d] + 1 > v.capacity) break;  // load must fit on every slot in [p, d]
      const double added =
          pair_insertion_cost(v.route, v.position, r.origin, r.destination, p, d);
      if (!best || better(added, SlotPair{p, d}, best->added_distance,
                          SlotPair{best->pickup_index, best->dropoff_index})) {
        best = MatchDecision{v.id, p, d, added};
      }
    }
  }
  return best;
}

std::optional<MatchDecision> pick_fleet_best(
    std::span<const Vehicle> fleet,
    const std::function<std::optional<MatchDecision>(const Vehicle&)>& eval) {
  std::optional<MatchDecision> best;
  for (const auto& v : fleet) {
    auto cand = eval(v);
    if (!cand) continue;
    if (!best || better(cand->added_distance, cand->vehicle_id, best->added_distance,
                        best->vehicle_id)) {
      best = cand;
    }
  }
  return best;
}

}  // namespace

std::optional<Insertion> cheapest_insertion(const std::vector<RouteStop>& route,
                                            Point vehicle_pos, Point stop,
                                            std::size_t first_slot,
                                            const SlotPredicate& slot_ok) {
  std::optional<Insertion> best;
  for (std::size_t k = first_slot; k <= route.size(); ++k) {
    if (slot_ok && !slot_ok(k)) continue;
    const double added = single_insertion_cost(route, vehicle_pos, stop, k);
    if (!best || added < best->added_km - kTieEps) best = Insertion{k, added};
  }
  return best;
}

std::vector<int> load_profile(const std::vector<RouteStop>& route, int initial_load) {
  std::vector<int> loads(route.size() + 1);
  int load = initial_load;
  for (std::size_t k = 0; k < route.size(); ++k) {
    loads[k] = load;
    load += route[k].kind == StopKind::pickup ? 1 : -1;
  }
  loads[route.size()] = load;
  return loads;
}

double pair_insertion_cost(const std::vector<RouteStop>& route, Point vehicle_pos,
                           Point origin, Point destination, std::size_t pickup_slot,
                           std::size_t dropoff_slot) {
  if (pickup_slot > dropoff_slot || dropoff_slot > route.size()) {
    throw std::out_of_range("invalid insertion slots");
  }
  if (pickup_slot != dropoff_slot) {
    return single_insertion_cost(route, vehicle_pos, origin, pickup_slot) +
           single_insertion_cost(route, vehicle_pos, destination, dropoff_slot);
  }
  const Point prev = slot_prev(route, vehicle_pos, pickup_slot);
  double added = manhattan_dist(prev, origin) + manhattan_dist(origin, destination);
  if (pickup_slot < route.size()) {
    const Point next = route[pickup_slot].location;
    added += manhattan_dist(destination, next) - manhattan_dist(prev, next);
  }
  return added;
}

std::vector<RouteStop> route_with(const std::vector<RouteStop>& route,
                                  const TripRequest& request, std::size_t pickup_slot,
                                  std::size_t dropoff_slot) {
  if (pickup_slot > dropoff_slot || dropoff_slot > route.size()) {
    throw std::out_of_range("invalid insertion slots");
  }
  std::vector<RouteStop> out;
  out.reserve(route.size() + 2);
  for (std::size_t k = 0; k <= route.size(); ++k) {
    if (k == pickup_slot) out.push_back({request.origin, StopKind::pickup, request.id});
    if (k == dropoff_slot) out.push_back({request.destination, StopKind::dropoff, request.id});
    if (k < route.size()) out.push_back(route[k]);
  }
  return out;
}

AdaptiveState adaptive_state(const Vehicle& v, double now, double c_w, double c_t) {
  AdaptiveState best;
  double best_penalty = -1.0;
  double t = now;
  Point at = v.position;
  for (const auto& stop : v.route) {
    t += manhattan_dist(at, stop.location) / v.speed;
    at = stop.location;
    if (stop.kind != StopKind::dropoff) continue;
    const RiderRecord* rider = v.find_rider(stop.request_id);
    if (rider == nullptr || !rider->on_board()) continue;
    const double wait = *rider->pickup_time - rider->assigned_time;
    const double trip = t - *rider->pickup_time;
    const double penalty = c_w * wait + c_t * std::max(0.0, trip - rider->solo_time);
    if (penalty > best_penalty) {
      best_penalty = penalty;
      best = AdaptiveState{wait, trip, rider->solo_time};
    }
  }
  return best;
}

std::optional<PolarFrame> heading_frame(const Vehicle& v) {
  for (const auto& stop : v.route) {
    if (stop.location != v.position) return PolarFrame(v.position, stop.location);
  }
  return std::nullopt;
}

std::optional<PcrmCandidate> pcrm_candidate(const Vehicle& v, const TripRequest& r,
                                            const ZoneParams& zone, double now) {
  if (euclidean_dist(v.position, r.origin) > zone.r_s * (1.0 + 1e-9)) return std::nullopt;

  if (v.idle()) {
    if (v.capacity < 1 || !in_source_disk(v.position, r.origin, zone.r_s)) return std::nullopt;
    const double added =
        manhattan_dist(v.position, r.origin) + manhattan_dist(r.origin, r.destination);
    return PcrmCandidate{{v.id, 0, 0, added}, zone.n_s_init, zone.n_d_init, true};
  }

  const AdaptiveState state = adaptive_state(v, now, zone.c_w, zone.c_t);
  const double n_s = adaptive_factor(zone.n_s_init, state, zone.c_w, zone.c_t, zone.tau);
  const double n_d = adaptive_factor(zone.n_d_init, state, zone.c_w, zone.c_t, zone.tau);

  const auto frame = heading_frame(v);
  const bool src_ok = frame ? in_source_zone(*frame, r.origin, zone.r_s, n_s)
                            : in_source_disk(v.position, r.origin, zone.r_s);
  if (!src_ok) return std::nullopt;

  const auto loads = load_profile(v.route, v.onboard_count());
  const auto src = cheapest_insertion(v.route, v.position, r.origin, 0, [&](std::size_t k) {
    return loads[k] + 1 <= v.capacity;
  });
  if (!src) return std::nullopt;
  const std::size_t k = src->index;
  const std::size_t n = v.route.size();

  // Route after the source insertion is q[0..n]: q[k] = origin.
  auto q = [&](std::size_t j) -> Point {
    if (j < k) return v.route[j].location;
    if (j == k) return r.origin;
    return v.route[j - 1].location;
  };

  std::optional<MatchDecision> best;
  auto consider = [&](std::size_t slot, double dest_cost) {
    if (!pair_fits(loads, v.capacity, k, slot)) return;
    const double added = src->added_km + dest_cost;
    if (!best || better(added, slot, best->added_distance, best->dropoff_index)) {
      best = MatchDecision{v.id, k, slot, added};
    }
  };

  // Oval zones with poles q[k] .. q[n-1]; pole q[j] places the dropoff between
  // q[j] and q[j+1], i.e. in front of route[j].
  for (std::size_t j = k; j < n; ++j) {
    const Point pole = q(j);
    const Point next = q(j + 1);
    if (!in_oval_zone(pole, next, r.destination, n_d)) continue;
    consider(j, manhattan_dist(pole, r.destination) + manhattan_dist(r.destination, next) -
                    manhattan_dist(pole, next));
  }

  // Triangular zone past the tail q[n].
  const Point tail = q(n);
  std::optional<Point> tail_prev;
  for (std::size_t j = n; j-- > 0;) {
    if (q(j) != tail) {
      tail_prev = q(j);
      break;
    }
  }
  if (!tail_prev && v.position != tail) tail_prev = v.position;
  if (!tail_prev || in_triangle_zone(*tail_prev, tail, r.destination, zone.phi)) {
    consider(n, manhattan_dist(tail, r.destination));
  }

  if (!best) return std::nullopt;
  return PcrmCandidate{*best, n_s, n_d, false};
}

std::optional<MatchDecision> pcrm_match(const TripRequest& request,
                                        std::span<const Vehicle> fleet,
                                        const ZoneParams& zone, double now) {
  return pick_fleet_best(fleet, [&](const Vehicle& v) -> std::optional<MatchDecision> {
    auto c = pcrm_candidate(v, request, zone, now);
    if (!c) return std::nullopt;
    return c->decision;
  });
}

bool in_trapezoid(const Vehicle& v, Point origin, const Trapezoid& trap) {
  const auto frame = heading_frame(v);
  if (!frame) return euclidean_dist(v.position, origin) <= trap.depth;
  const double vx = origin.x - v.position.x;
  const double vy = origin.y - v.position.y;
  const double along = frame->axis_x() * vx + frame->axis_y() * vy;
  const double lateral = frame->axis_x() * vy - frame->axis_y() * vx;
  if (along < 0.0 || along > trap.depth) return false;
  const double half_width =
      0.5 * (trap.near_width + (trap.far_width - trap.near_width) * along / trap.depth);
  return std::abs(lateral) <= half_width;
}

std::optional<MatchDecision> ddm_match(const TripRequest& request,
                                       std::span<const Vehicle> fleet,
                                       const Trapezoid& trap, double /*now*/) {
  const double reach = std::hypot(trap.depth, 0.5 * std::max(trap.near_width, trap.far_width));
  return pick_fleet_best(fleet, [&](const Vehicle& v) -> std::optional<MatchDecision> {
    if (euclidean_dist(v.position, request.origin) > reach) return std::nullopt;
    if (!in_trapezoid(v, request.origin, trap)) return std::nullopt;
    return best_pair(v, request);
  });
}

std::optional<MatchDecision> og_match(const TripRequest& request,
                                      std::span<const Vehicle> fleet, double /*now*/) {
  return pick_fleet_best(fleet, [&](const Vehicle& v) { return best_pair(v, request); });
}

std::optional<MatchDecision> match(const StrategyConfig& config, const TripRequest& request,
                                   std::span<const Vehicle> fleet, double now) {
  switch (config.kind) {
    case StrategyKind::pcrm: return pcrm_match(request, fleet, config.zone, now);
    case StrategyKind::ddm: return ddm_match(request, fleet, config.ddm, now);
    case StrategyKind::og: return og_match(request, fleet, now);
  }
  return std::nullopt;
}

void commit(Vehicle& v, const TripRequest& request, const MatchDecision& d, double now) {
  if (d.vehicle_id != v.id) throw std::logic_error("decision committed to wrong vehicle");
  auto route = route_with(v.route, request, d.pickup_index, d.dropoff_index);
  if (!route_feasible(route, v.onboard_count(), v.capacity)) {
    throw std::logic_error("decision yields an infeasible route");
  }
  v.route = std::move(route);
  v.riders.push_back({request.id, now, single_drive_time(request, v.speed), std::nullopt});
}

}  // namespace pcrm
