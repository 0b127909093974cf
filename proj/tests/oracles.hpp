#pragma once

// Brute-force reference implementations used only by tests. Nothing here
// calls into the matching or geometry code it is checked against: angles come
// from acos of normalized dot products instead of atan2, insertion costs from
// re-measuring whole routes, and feasibility from a separate route replay.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "pcrm/core.hpp"
#include "pcrm/matching.hpp"

namespace oracle {

using pcrm::Point;

double manhattan(Point a, Point b);
double full_route_km(Point start, const std::vector<pcrm::RouteStop>& route);

bool source_zone(Point pole, std::optional<Point> heading_target, Point src, double r_s,
                 double n_s);
bool oval_zone(Point pole, Point next, Point dest, double n_d);
bool triangle_zone(Point tail_prev, Point tail, Point dest, double phi_deg);
double adaptive_factor(double n_init, double wait, double trip, double single, double c_w,
                       double c_t, double tau);

/// Replays a route: no duplicate or orphan stops, pickups before dropoffs,
/// onboard riders dropped exactly once, load within capacity throughout.
bool route_valid(const pcrm::Vehicle& v, const std::vector<pcrm::RouteStop>& route);

/// Trapezoid membership as a convex polygon test on its four corners.
bool trapezoid_contains(const pcrm::Vehicle& v, Point origin, const pcrm::Trapezoid& trap);

/// Exhaustive enumeration over (vehicle, pickup slot, dropoff slot).
std::optional<pcrm::MatchDecision> og(const pcrm::TripRequest& r,
                                      const std::vector<pcrm::Vehicle>& fleet);
std::optional<pcrm::MatchDecision> ddm(const pcrm::TripRequest& r,
                                       const std::vector<pcrm::Vehicle>& fleet,
                                       const pcrm::Trapezoid& trap);
std::optional<pcrm::MatchDecision> pcrm(const pcrm::TripRequest& r,
                                        const std::vector<pcrm::Vehicle>& fleet,
                                        const pcrm::ZoneParams& zone, double now);

/// Random small dispatch instance: up to 4 vehicles with feasible routes
/// (at most 8 stops in total) and up to 3 pending requests.
struct Instance {
  std::vector<pcrm::Vehicle> fleet;
  std::vector<pcrm::TripRequest> pending;
  pcrm::ZoneParams zone;
  pcrm::Trapezoid trap;
  double now = 30.0;
};

Instance random_instance(std::mt19937_64& rng);

}  // namespace oracle
