#pragma once

#include <cstdint>
#include <vector>

#include "pcrm/core.hpp"
#include "pcrm/matching.hpp"
#include "pcrm/metrics.hpp"

namespace pcrm {

/// Axis-aligned box in km.
struct Region {
  double xmin = -5.0;
  double xmax = 5.0;
  double ymin = -5.0;
  double ymax = 5.0;

  bool contains(Point p) const noexcept {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
};

/// When an unserved request gives up.
enum class ExpiryMode {
  assignment,  // rejected if still unassigned after release + patience
  pickup,      // additionally, never assigned if its projected pickup is past that time
};

struct SimConfig {
  double tick = 0.1;       // minutes
  double horizon = 360.0;  // minutes; no releases or assignments after this
  int fleet_size = 200;
  int capacity = 4;
  double speed = 0.35;     // km per minute
  double patience = 20.0;  // minutes, applied by workload builders
  StrategyConfig strategy;
  Weights weights;
  std::uint64_t seed = 1;
  Region region;
  ExpiryMode expiry = ExpiryMode::assignment;
  bool log_moves = true;
  double drain_limit = 14.0 * 24.0 * 60.0;  // safety cap on post-horizon driving

  void validate() const;
};

enum class EventKind { released, assigned, picked_up, dropped_off, rejected, moved };

std::string_view to_string(EventKind k) noexcept;

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::released;
  RequestId request = -1;
  VehicleId vehicle = -1;
  Point from;  // moved only
  Point to;    // moved only
  double distance = 0.0;

  friend bool operator==(const Event&, const Event&) = default;
};

class EventLog {
 public:
  void append(const Event& e);
  const std::vector<Event>& events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }

 private:
  std::vector<Event> events_;
};

/// Moves `v` for `dt` minutes starting at `now`, along x-then-y Manhattan
/// legs toward its next stops. Arrivals fire pickup/dropoff events at their
/// exact time and update the vehicle's riders; leftover time carries into the
/// following leg. Emits one moved event per straight segment when
/// `log_moves` is set.
std::vector<Event> advance_vehicle(Vehicle& v, double now, double dt, bool log_moves = true);

/// Fleet with positions drawn uniformly over the region from the seed.
std::vector<Vehicle> initial_fleet(const SimConfig& config);

/// Throws std::invalid_argument for unsorted release times, negative times,
/// or duplicate ids.
void validate_workload(const std::vector<TripRequest>& requests);

struct RunResult {
  EventLog log;
  std::vector<TripRequest> requests;  // released requests, final states
  std::vector<Vehicle> fleet;
  MileageLedger mileage;
  MetricsReport report;
  double end_time = 0.0;
  int beyond_horizon = 0;  // workload entries released at or after the horizon
};

/// Runs one episode on a freshly seeded fleet.
RunResult run(const SimConfig& config, const std::vector<TripRequest>& workload);

/// Runs one episode on a caller-provided fleet.
RunResult run(const SimConfig& config, const std::vector<TripRequest>& workload,
              std::vector<Vehicle> fleet);

}  // namespace pcrm
