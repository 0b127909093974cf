#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pcrm/core.hpp"
#include "pcrm/geometry.hpp"

namespace pcrm {

/// A committed pairing of a request with a vehicle. Both indexes are slots in
/// the vehicle's route *before* insertion: the pickup goes in front of
/// route[pickup_index], the dropoff in front of route[dropoff_index]; equal
/// indexes put the dropoff directly after the pickup.
struct MatchDecision {
  VehicleId vehicle_id = 0;
  std::size_t pickup_index = 0;
  std::size_t dropoff_index = 0;
  double added_distance = 0.0;  // km

  friend bool operator==(const MatchDecision&, const MatchDecision&) = default;
};

enum class StrategyKind { pcrm, ddm, og };

std::string_view to_string(StrategyKind k) noexcept;
/// Throws std::invalid_argument on an unknown name.
StrategyKind parse_strategy(std::string_view name);

/// Isosceles trapezoid ahead of a vehicle: the near edge (near_width) is
/// centered on the vehicle, the far edge (far_width) lies `depth` km ahead.
struct Trapezoid {
  double near_width = 0.4;
  double far_width = 1.6;
  double depth = 2.0;
};

struct StrategyConfig {
  StrategyKind kind = StrategyKind::pcrm;
  ZoneParams zone;
  Trapezoid ddm;

  void validate() const;
};

/// Added-distance ties within this many km are broken by vehicle id, then by
/// pickup slot, then by dropoff slot.
inline constexpr double kTieEps = 1e-9;

struct Insertion {
  std::size_t index = 0;
  double added_km = 0.0;
};

using SlotPredicate = std::function<bool(std::size_t)>;

/// Linear scan over slots [first_slot, route.size()] for the position that
/// adds the least Manhattan length when `stop` is inserted in front of
/// route[slot]. Slots rejected by `slot_ok` are skipped; ties go to the lower
/// slot. Returns nullopt when no slot is admissible.
std::optional<Insertion> cheapest_insertion(const std::vector<RouteStop>& route,
                                            Point vehicle_pos, Point stop,
                                            std::size_t first_slot = 0,
                                            const SlotPredicate& slot_ok = {});

/// load_before[k] = riders aboard just before route[k] is visited (and, for
/// k == route.size(), at the end of the route).
std::vector<int> load_profile(const std::vector<RouteStop>& route, int initial_load);

/// Extra Manhattan length of inserting (origin, destination) at slots
/// (pickup_slot <= dropoff_slot).
double pair_insertion_cost(const std::vector<RouteStop>& route, Point vehicle_pos,
                           Point origin, Point destination, std::size_t pickup_slot,
                           std::size_t dropoff_slot);

/// Route after applying a decision for `request`.
std::vector<RouteStop> route_with(const std::vector<RouteStop>& route,
                                  const TripRequest& request, std::size_t pickup_slot,
                                  std::size_t dropoff_slot);

/// Delay state of the onboard rider with the largest
/// C_w*T_w + C_t*max(0, T_t - T_s), with T_t projected to the rider's
/// dropoff along the current route. All zero when nobody is aboard.
AdaptiveState adaptive_state(const Vehicle& v, double now, double c_w, double c_t);

/// Frame with the vehicle as pole, pointing at the first route point that
/// differs from its position. Empty when the vehicle has no heading.
std::optional<PolarFrame> heading_frame(const Vehicle& v);

/// PCRM evaluation of one vehicle, with the adapted factors used.
struct PcrmCandidate {
  MatchDecision decision;
  double n_s = 0.0;
  double n_d = 0.0;
  bool idle_rule = false;
};

std::optional<PcrmCandidate> pcrm_candidate(const Vehicle& v, const TripRequest& request,
                                            const ZoneParams& zone, double now);

std::optional<MatchDecision> pcrm_match(const TripRequest& request,
                                        std::span<const Vehicle> fleet,
                                        const ZoneParams& zone, double now);

/// Trapezoid membership of `origin` for a vehicle; vehicles without a
/// heading accept origins within `depth` of their position.
bool in_trapezoid(const Vehicle& v, Point origin, const Trapezoid& trap);

std::optional<MatchDecision> ddm_match(const TripRequest& request,
                                       std::span<const Vehicle> fleet,
                                       const Trapezoid& trap, double now);

std::optional<MatchDecision> og_match(const TripRequest& request,
                                      std::span<const Vehicle> fleet, double now);

/// Dispatches on config.kind.
std::optional<MatchDecision> match(const StrategyConfig& config, const TripRequest& request,
                                   std::span<const Vehicle> fleet, double now);

/// Inserts the request's stops into the vehicle route and records the rider.
/// Throws std::logic_error if the resulting route is infeasible.
void commit(Vehicle& v, const TripRequest& request, const MatchDecision& d, double now);

}  // namespace pcrm
