#include "pcrm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace pcrm {

void SimConfig::validate() const {
  if (!(tick > 0.0)) throw std::invalid_argument("tick must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (fleet_size <= 0) throw std::invalid_argument("fleet_size must be positive");
  if (capacity <= 0) throw std::invalid_argument("capacity must be positive");
  if (!(speed > 0.0)) throw std::invalid_argument("speed must be positive");
  if (!(patience > 0.0)) throw std::invalid_argument("patience must be positive");
  if (!(region.xmax > region.xmin && region.ymax > region.ymin)) {
    throw std::invalid_argument("region must have positive extent");
  }
  if (!(drain_limit > 0.0)) throw std::invalid_argument("drain_limit must be positive");
  strategy.validate();
  weights.validate();
}

std::string_view to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::released: return "released";
    case EventKind::assigned: return "assigned";
    case EventKind::picked_up: return "picked_up";
    case EventKind::dropped_off: return "dropped_off";
    case EventKind::rejected: return "rejected";
    case EventKind::moved: return "moved";
  }
  return "unknown";
}

void EventLog::append(const Event& e) {
  if (!events_.empty() && e.time < events_.back().time) {
    throw std::logic_error("event log timestamps must be non-decreasing");
  }
  events_.push_back(e);
}

namespace {

constexpr double kArrivalSlack = 1e-12;  // minutes

int hour_of(double minutes) { return static_cast<int>(std::floor(minutes / 60.0)); }

Event request_event(double t, EventKind kind, RequestId r, VehicleId v = -1) {
  Event e;
  e.time = t;
  e.kind = kind;
  e.request = r;
  e.vehicle = v;
  return e;
}

}  // namespace

std::vector<Event> advance_vehicle(Vehicle& v, double now, double dt, bool log_moves) {
  if (!(dt > 0.0)) throw std::invalid_argument("advance step must be positive");
  std::vector<Event> out;
  double elapsed = 0.0;

  auto segment = [&](Point to, double minutes) {
    if (to == v.position) return;
    const double km = manhattan_dist(v.position, to);
    v.odometer += km;
    elapsed += minutes;
    if (log_moves) {
      out.push_back({std::min(now + elapsed, now + dt), EventKind::moved, -1, v.id, v.position,
                     to, km});
    }
    v.position = to;
  };

  while (!v.route.empty()) {
    const RouteStop stop = v.route.front();
    const double need = manhattan_dist(v.position, stop.location) / v.speed;
    const double left = dt - elapsed;
    if (need <= left + kArrivalSlack) {
      const Point corner{stop.location.x, v.position.y};
      segment(corner, std::abs(corner.x - v.position.x) / v.speed);
      segment(stop.location, std::abs(stop.location.y - v.position.y) / v.speed);
      const double t = std::min(now + elapsed, now + dt);
      v.route.erase(v.route.begin());
      auto rider = std::find_if(v.riders.begin(), v.riders.end(), [&](const RiderRecord& r) {
        return r.request_id == stop.request_id;
      });
      if (rider == v.riders.end()) throw std::logic_error("stop for unknown rider");
      if (stop.kind == StopKind::pickup) {
        rider->pickup_time = t;
        out.push_back(request_event(t, EventKind::picked_up, stop.request_id, v.id));
      } else {
        v.riders.erase(rider);
        out.push_back(request_event(t, EventKind::dropped_off, stop.request_id, v.id));
      }
      continue;
    }
    // Partial leg: x first, then y.
    double budget = left * v.speed;
    const double dx = stop.location.x - v.position.x;
    if (std::abs(dx) > 0.0) {
      const double step = std::min(budget, std::abs(dx));
      segment({v.position.x + std::copysign(step, dx), v.position.y}, step / v.speed);
      budget -= step;
    }
    if (budget > 0.0) {
      const double dy = stop.location.y - v.position.y;
      const double step = std::min(budget, std::abs(dy));
      segment({v.position.x, v.position.y + std::copysign(step, dy)}, step / v.speed);
    }
    break;
  }
  return out;
}

std::vector<Vehicle> initial_fleet(const SimConfig& config) {
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> ux(config.region.xmin, config.region.xmax);
  std::uniform_real_distribution<double> uy(config.region.ymin, config.region.ymax);
  std::vector<Vehicle> fleet(static_cast<std::size_t>(config.fleet_size));
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    auto& v = fleet[i];
    v.id = static_cast<VehicleId>(i);
    v.position.x = ux(rng);
    v.position.y = uy(rng);
    v.capacity = config.capacity;
    v.speed = config.speed;
  }
  return fleet;
}

void validate_workload(const std::vector<TripRequest>& requests) {
  std::unordered_set<RequestId> ids;
  double last = 0.0;
  for (const auto& r : requests) {
    if (r.release_time < 0.0) {
      throw std::invalid_argument("request " + std::to_string(r.id) + " has negative release time");
    }
    if (r.release_time < last) throw std::invalid_argument("workload not sorted by release time");
    last = r.release_time;
    if (r.state() != RequestState::pending) {
      throw std::invalid_argument("workload request " + std::to_string(r.id) + " is not pending");
    }
    if (!ids.insert(r.id).second) {
      throw std::invalid_argument("duplicate request id " + std::to_string(r.id));
    }
  }
}

RunResult run(const SimConfig& config, const std::vector<TripRequest>& workload) {
  return run(config, workload, initial_fleet(config));
}

RunResult run(const SimConfig& config, const std::vector<TripRequest>& workload,
              std::vector<Vehicle> fleet) {
  config.validate();
  validate_workload(workload);

  RunResult res;
  for (const auto& r : workload) {
    if (r.release_time < config.horizon) {
      res.requests.push_back(r);
    } else {
      ++res.beyond_horizon;
    }
  }
  auto& requests = res.requests;
  std::unordered_map<RequestId, std::size_t> req_index;
  for (std::size_t i = 0; i < requests.size(); ++i) req_index.emplace(requests[i].id, i);

  std::unordered_map<VehicleId, std::size_t> veh_index;
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    if (!veh_index.emplace(fleet[i].id, i).second) {
      throw std::invalid_argument("duplicate vehicle id");
    }
  }
  res.mileage.per_vehicle.assign(fleet.size(), {});

  // Steps every vehicle from tick k to tick k+1. Event times are clamped to
  // the next tick boundary, since now + dt may round past (k+1)*tick.
  auto tick_vehicles = [&](long k) {
    const double now = static_cast<double>(k) * config.tick;
    const double next = static_cast<double>(k + 1) * config.tick;
    std::vector<Event> evs;
    for (std::size_t i = 0; i < fleet.size(); ++i) {
      auto& v = fleet[i];
      const double before = v.odometer;
      auto step = advance_vehicle(v, now, next - now, config.log_moves);
      for (auto& e : step) e.time = std::min(e.time, next);
      const double driven = v.odometer - before;
      if (driven > 0.0) {
        res.mileage.per_vehicle[i].share_km += driven;
        res.mileage.share_by_hour[hour_of(now)] += driven;
      }
      evs.insert(evs.end(), step.begin(), step.end());
    }
    std::stable_sort(evs.begin(), evs.end(),
                     [](const Event& a, const Event& b) { return a.time < b.time; });
    for (const auto& e : evs) {
      if (e.kind == EventKind::picked_up) {
        requests[req_index.at(e.request)].pick_up(e.time);
      } else if (e.kind == EventKind::dropped_off) {
        auto& r = requests[req_index.at(e.request)];
        r.drop_off(e.time);
        const double solo = manhattan_dist(r.origin, r.destination);
        res.mileage.per_vehicle[veh_index.at(e.vehicle)].single_km += solo;
        res.mileage.single_by_hour[hour_of(e.time)] += solo;
      }
      res.log.append(e);
    }
  };

  std::vector<std::size_t> pending;
  std::size_t next = 0;
  long k = 0;
  double now = 0.0;
  for (;; ++k) {
    now = static_cast<double>(k) * config.tick;
    if (now >= config.horizon) break;

    while (next < requests.size() && requests[next].release_time <= now) {
      res.log.append(request_event(now, EventKind::released, requests[next].id));
      pending.push_back(next++);
    }

    std::vector<std::size_t> waiting;
    waiting.reserve(pending.size());
    for (std::size_t i : pending) {
      auto& r = requests[i];
      if (now > r.deadline()) {
        waiting.push_back(i);
        continue;
      }
      auto d = match(config.strategy, r, fleet, now);
      if (d) {
        auto& v = fleet[veh_index.at(d->vehicle_id)];
        if (config.expiry == ExpiryMode::pickup) {
          auto route = route_with(v.route, r, d->pickup_index, d->dropoff_index);
          route.resize(d->pickup_index + 1);
          if (now + route_length(v.position, route) / v.speed > r.deadline()) d.reset();
        }
        if (d) {
          commit(v, r, *d, now);
          r.assign(now);
          res.log.append(request_event(now, EventKind::assigned, r.id, v.id));
          continue;
        }
      }
      waiting.push_back(i);
    }

    pending.clear();
    for (std::size_t i : waiting) {
      auto& r = requests[i];
      if (now > r.deadline()) {
        r.reject(now);
        res.log.append(request_event(now, EventKind::rejected, r.id));
      } else {
        pending.push_back(i);
      }
    }

    tick_vehicles(k);
  }

  for (std::size_t i : pending) {
    requests[i].reject(now);
    res.log.append(request_event(now, EventKind::rejected, requests[i].id));
  }

  auto busy = [&] {
    return std::any_of(fleet.begin(), fleet.end(), [](const Vehicle& v) { return !v.idle(); });
  };
  while (busy()) {
    if (now >= config.horizon + config.drain_limit) {
      throw std::runtime_error("vehicles failed to drain within the drain limit");
    }
    tick_vehicles(k);
    now = static_cast<double>(++k) * config.tick;
  }

  res.end_time = now;
  res.fleet = std::move(fleet);
  res.report = compute_report(res.requests, res.mileage, config.speed, config.strategy.zone.c_w,
                              config.strategy.zone.c_t, config.weights);
  return res;
}

}  // namespace pcrm
