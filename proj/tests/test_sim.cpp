#include <algorithm>
#include <map>

#include <gtest/gtest.h>

#include "pcrm/io.hpp"
#include "pcrm/sim.hpp"

using namespace pcrm;

namespace {

// Dyadic tick and speed keep every event time exact.
SimConfig small_config(StrategyKind kind = StrategyKind::pcrm) {
  SimConfig c;
  c.tick = 1.0;
  c.speed = 0.25;
  c.horizon = 10.0;
  c.fleet_size = 1;
  c.strategy.kind = kind;
  c.strategy.zone.r_s = 2.0;
  return c;
}

Vehicle at(VehicleId id, Point p) {
  Vehicle v;
  v.id = id;
  v.position = p;
  v.speed = 0.25;
  return v;
}

std::vector<Event> of_kind(const EventLog& log, EventKind k) {
  std::vector<Event> out;
  for (const auto& e : log.events()) {
    if (e.kind == k) out.push_back(e);
  }
  return out;
}

std::vector<TripRequest> synthetic(std::uint64_t seed, double rate) {
  SyntheticSpec s;
  s.rate_per_hour = {rate, rate};
  s.region = {-2, 2, -2, 2};
  s.seed = seed;
  return generate(s);
}

SimConfig busy_config(StrategyKind kind) {
  SimConfig c;
  c.horizon = 120;
  c.fleet_size = 20;
  c.region = {-2, 2, -2, 2};
  c.strategy.kind = kind;
  return c;
}

}  // namespace

TEST(Advance, ExactArrivalTimesXThenY) {
  Vehicle v = at(0, {0, 0});
  v.riders.push_back({1, 0.0, 4.0, std::nullopt});
  v.route = {{{0.5, 0.25}, StopKind::pickup, 1}, {{0.5, 1.0}, StopKind::dropoff, 1}};
  auto evs = advance_vehicle(v, 0.0, 1.0);
  // 0.25 km in the first minute: all of it along x.
  ASSERT_EQ(evs.size(), 1u);
  EXPECT_EQ(evs[0].kind, EventKind::moved);
  EXPECT_EQ(v.position, (Point{0.25, 0.0}));
  evs = advance_vehicle(v, 1.0, 1.0);
  EXPECT_EQ(v.position, (Point{0.5, 0.0}));
  evs = advance_vehicle(v, 2.0, 2.0);
  // 0.25 km of y reaches the pickup at t=3; 0.25 km more toward the dropoff.
  auto pick = std::find_if(evs.begin(), evs.end(), [](const Event& e) { return e.kind == EventKind::picked_up; });
  ASSERT_NE(pick, evs.end());
  EXPECT_EQ(pick->time, 3.0);
  EXPECT_EQ(*v.riders[0].pickup_time, 3.0);
  EXPECT_EQ(v.position, (Point{0.5, 0.5}));
  evs = advance_vehicle(v, 4.0, 5.0);
  auto drop = std::find_if(evs.begin(), evs.end(), [](const Event& e) { return e.kind == EventKind::dropped_off; });
  ASSERT_NE(drop, evs.end());
  EXPECT_EQ(drop->time, 6.0);
  EXPECT_TRUE(v.route.empty());
  EXPECT_TRUE(v.riders.empty());
  EXPECT_EQ(v.odometer, 1.5);
  EXPECT_THROW(advance_vehicle(v, 0.0, 0.0), std::invalid_argument);
}

TEST(Episode, SingleRiderTrace) {
  auto cfg = small_config();
  cfg.horizon = 5.0;  // dropoff happens while draining
  std::vector<TripRequest> wl{TripRequest(1, {1, 0}, {1, 1}, 0.0, 20.0)};
  const auto res = run(cfg, wl, {at(0, {0, 0})});
  const auto& r = res.requests.at(0);
  EXPECT_EQ(r.state(), RequestState::completed);
  EXPECT_EQ(*r.assigned_time(), 0.0);
  EXPECT_EQ(*r.pickup_time(), 4.0);
  EXPECT_EQ(*r.dropoff_time(), 8.0);
  EXPECT_EQ(res.end_time, 8.0);
  EXPECT_DOUBLE_EQ(res.report.ici_total, 4.4);
  EXPECT_EQ(res.report.msi, -0.5);
  EXPECT_EQ(res.report.mean_extra_trip_minutes, 0.0);
  EXPECT_EQ(res.fleet[0].position, (Point{1, 1}));
}

TEST(Episode, TwoVehiclesHandComputed) {
  // OG: r1 -> A (2 km); r2 -> B (1 km); r3 rides along with r1 at zero cost.
  auto cfg = small_config(StrategyKind::og);
  std::vector<TripRequest> wl{TripRequest(1, {0, 0}, {2, 0}, 0.0, 20.0),
                              TripRequest(2, {5, 0}, {5, 1}, 0.0, 20.0),
                              TripRequest(3, {1, 0}, {2, 0}, 0.0, 20.0)};
  const auto res = run(cfg, wl, {at(0, {0, 0}), at(1, {5, 0})});
  const auto assigned = of_kind(res.log, EventKind::assigned);
  ASSERT_EQ(assigned.size(), 3u);
  EXPECT_EQ(assigned[0].vehicle, 0);
  EXPECT_EQ(assigned[1].vehicle, 1);
  EXPECT_EQ(assigned[2].vehicle, 0);
  EXPECT_EQ(res.report.share_km, 3.0);
  EXPECT_EQ(res.report.single_km, 4.0);
  EXPECT_DOUBLE_EQ(res.report.msi, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(res.report.ici_total, 4.4);
  EXPECT_EQ(*res.requests[2].pickup_time(), 4.0);
  EXPECT_EQ(*res.requests[2].dropoff_time(), 8.0);
  EXPECT_EQ(*res.requests[0].dropoff_time(), 8.0);
}

TEST(Episode, ReleaseSnapsToNextTick) {
  auto cfg = small_config();
  std::vector<TripRequest> wl{TripRequest(1, {0, 0}, {0.5, 0}, 0.5, 20.0)};
  const auto res = run(cfg, wl, {at(0, {0, 0})});
  EXPECT_EQ(of_kind(res.log, EventKind::released).at(0).time, 1.0);
  EXPECT_EQ(*res.requests[0].assigned_time(), 1.0);
}

TEST(Episode, UnreachableRequestExpires) {
  auto cfg = small_config();
  std::vector<TripRequest> wl{TripRequest(1, {4, 4}, {5, 5}, 0.0, 2.0)};
  const auto res = run(cfg, wl, {at(0, {0, 0})});
  EXPECT_EQ(res.requests[0].state(), RequestState::rejected);
  EXPECT_EQ(*res.requests[0].rejected_time(), 3.0);
  EXPECT_EQ(res.report.sai, 0.0);
  EXPECT_EQ(res.report.msi, 0.0);
}

TEST(Episode, PickupExpiryMode) {
  auto cfg = small_config(StrategyKind::og);
  std::vector<TripRequest> wl{TripRequest(1, {2, 0}, {3, 0}, 0.0, 5.0)};
  auto res = run(cfg, wl, {at(0, {0, 0})});
  EXPECT_EQ(res.requests[0].state(), RequestState::completed);  // 8 min away, assigned anyway
  cfg.expiry = ExpiryMode::pickup;
  res = run(cfg, wl, {at(0, {0, 0})});
  EXPECT_EQ(res.requests[0].state(), RequestState::rejected);
}

TEST(Episode, BeyondHorizonExcluded) {
  auto cfg = small_config();
  std::vector<TripRequest> wl{TripRequest(1, {0, 0}, {0.5, 0}, 9.0, 20.0),
                              TripRequest(2, {0, 0}, {0.5, 0}, 10.0, 20.0)};
  const auto res = run(cfg, wl, {at(0, {0, 0})});
  EXPECT_EQ(res.beyond_horizon, 1);
  EXPECT_EQ(res.report.released, 1);
}

TEST(Episode, PendingAtHorizonRejected) {
  auto cfg = small_config();
  std::vector<TripRequest> wl{TripRequest(1, {4, 4}, {5, 5}, 9.0, 20.0)};
  const auto res = run(cfg, wl, {at(0, {0, 0})});
  EXPECT_EQ(res.requests[0].state(), RequestState::rejected);
}

TEST(Workload, Validation) {
  auto cfg = small_config();
  std::vector<TripRequest> unsorted{TripRequest(1, {0, 0}, {1, 0}, 2.0, 20.0),
                                    TripRequest(2, {0, 0}, {1, 0}, 1.0, 20.0)};
  EXPECT_THROW(run(cfg, unsorted), std::invalid_argument);
  std::vector<TripRequest> dup{TripRequest(1, {0, 0}, {1, 0}, 1.0, 20.0),
                               TripRequest(1, {0, 0}, {1, 0}, 2.0, 20.0)};
  EXPECT_THROW(run(cfg, dup), std::invalid_argument);
  cfg.tick = 0;
  EXPECT_THROW(run(cfg, {}), std::invalid_argument);
}

TEST(Fleet, SeededPositionsInsideRegion) {
  SimConfig c;
  c.fleet_size = 50;
  c.region = {-1, 1, 2, 3};
  const auto a = initial_fleet(c);
  const auto b = initial_fleet(c);
  ASSERT_EQ(a.size(), 50u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(c.region.contains(a[i].position));
    EXPECT_EQ(a[i].position, b[i].position);
    EXPECT_EQ(a[i].id, static_cast<VehicleId>(i));
  }
  c.seed = 2;
  EXPECT_NE(initial_fleet(c)[0].position, a[0].position);
}

class BusyRun : public ::testing::TestWithParam<StrategyKind> {};

TEST_P(BusyRun, ConservationAtEveryEvent) {
  const auto res = run(busy_config(GetParam()), synthetic(3, 3.0));
  int released = 0, completed = 0, rejected = 0, assigned = 0;
  double last = 0.0;
  for (const auto& e : res.log.events()) {
    EXPECT_GE(e.time, last);
    last = e.time;
    switch (e.kind) {
      case EventKind::released: ++released; break;
      case EventKind::dropped_off: ++completed; break;
      case EventKind::rejected: ++rejected; break;
      case EventKind::assigned: ++assigned; break;
      default: break;
    }
    EXPECT_GE(released - completed - rejected, 0);
    EXPECT_LE(completed, assigned);
  }
  EXPECT_EQ(released, res.report.released);
  EXPECT_EQ(released, completed + rejected);
  EXPECT_EQ(res.report.served + res.report.rejected, res.report.released);
  for (const auto& v : res.fleet) {
    EXPECT_TRUE(v.idle());
    EXPECT_TRUE(v.riders.empty());
  }
}

TEST_P(BusyRun, DistanceAccounting) {
  const auto res = run(busy_config(GetParam()), synthetic(4, 3.0));
  double moved = 0.0, odo = 0.0, share = 0.0, hourly = 0.0;
  for (const auto& e : of_kind(res.log, EventKind::moved)) {
    EXPECT_DOUBLE_EQ(e.distance, manhattan_dist(e.from, e.to));
    EXPECT_TRUE(e.from.x == e.to.x || e.from.y == e.to.y);
    moved += e.distance;
  }
  for (const auto& v : res.fleet) odo += v.odometer;
  for (const auto& m : res.mileage.per_vehicle) share += m.share_km;
  for (const auto& [h, km] : res.mileage.share_by_hour) hourly += km;
  EXPECT_NEAR(moved, share, 1e-9 * share);
  EXPECT_NEAR(odo, share, 1e-9 * share);
  EXPECT_NEAR(hourly, share, 1e-9 * share);
}

TEST_P(BusyRun, MsiFromTraceMatchesLedger) {
  const auto wl = synthetic(5, 3.0);
  const auto res = run(busy_config(GetParam()), wl);
  std::map<RequestId, const TripRequest*> by_id;
  for (const auto& r : wl) by_id[r.id] = &r;
  double share = 0.0, single = 0.0;
  for (const auto& e : res.log.events()) {
    if (e.kind == EventKind::moved) share += std::abs(e.to.x - e.from.x) + std::abs(e.to.y - e.from.y);
    if (e.kind == EventKind::dropped_off) {
      const auto* r = by_id.at(e.request);
      single += manhattan_dist(r->origin, r->destination);
    }
  }
  const double from_trace = (single - share) / share;
  EXPECT_NEAR(from_trace, res.report.msi, 1e-9 * std::abs(res.report.msi) + 1e-12);
}

TEST_P(BusyRun, WaitAndTripDefinitions) {
  const auto res = run(busy_config(GetParam()), synthetic(6, 3.0));
  for (const auto& r : res.requests) {
    if (r.state() != RequestState::completed) continue;
    EXPECT_LE(*r.assigned_time(), r.deadline());
    EXPECT_GE(*r.assigned_time(), r.release_time);
    EXPECT_LE(*r.pickup_time(), *r.dropoff_time());
  }
}

TEST_P(BusyRun, SeedDeterminism) {
  const auto wl = synthetic(7, 3.0);
  const auto a = run(busy_config(GetParam()), wl);
  const auto b = run(busy_config(GetParam()), wl);
  EXPECT_TRUE(a.log.events() == b.log.events());
  EXPECT_EQ(a.end_time, b.end_time);
  auto cfg = busy_config(GetParam());
  cfg.seed = 99;
  const auto c = run(cfg, wl);
  EXPECT_FALSE(a.log.events() == c.log.events());
}

INSTANTIATE_TEST_SUITE_P(Strategies, BusyRun,
                         ::testing::Values(StrategyKind::pcrm, StrategyKind::ddm, StrategyKind::og),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(EventLog, RejectsTimeTravel) {
  EventLog log;
  Event e;
  e.time = 2.0;
  log.append(e);
  e.time = 1.0;
  EXPECT_THROW(log.append(e), std::logic_error);
}
