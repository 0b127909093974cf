#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pcrm {

using RequestId = std::int64_t;
using VehicleId = std::int64_t;

/// Planar location in kilometers (x east, y north).
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double manhattan_dist(Point a, Point b) noexcept;
double euclidean_dist(Point a, Point b) noexcept;

enum class RequestState { pending, assigned, on_board, completed, rejected };

std::string_view to_string(RequestState s) noexcept;

/// A rider's trip request with its lifecycle. State only moves along
/// pending -> assigned -> on_board -> completed, or pending -> rejected;
/// the transition methods throw std::logic_error on anything else.
class TripRequest {
 public:
  TripRequest(RequestId id, Point origin, Point destination,
              double release_time, double patience);

  RequestId id;
  Point origin;
  Point destination;
  double release_time;  // minutes
  double patience;      // minutes

  RequestState state() const noexcept { return state_; }
  std::optional<double> assigned_time() const noexcept { return assigned_time_; }
  std::optional<double> pickup_time() const noexcept { return pickup_time_; }
  std::optional<double> dropoff_time() const noexcept { return dropoff_time_; }
  std::optional<double> rejected_time() const noexcept { return rejected_time_; }

  /// Latest time at which the request may still be assigned.
  double deadline() const noexcept { return release_time + patience; }

  void assign(double t);
  void pick_up(double t);
  void drop_off(double t);
  void reject(double t);

 private:
  RequestState state_ = RequestState::pending;
  std::optional<double> assigned_time_;
  std::optional<double> pickup_time_;
  std::optional<double> dropoff_time_;
  std::optional<double> rejected_time_;
};

/// Solo-drive time T_s from origin to destination.
double single_drive_time(const TripRequest& r, double speed);

enum class StopKind { pickup, dropoff };

struct RouteStop {
  Point location;
  StopKind kind = StopKind::pickup;
  RequestId request_id = 0;

  friend bool operator==(const RouteStop&, const RouteStop&) = default;
};

/// Per-rider timing a vehicle keeps for every rider it has committed to.
/// pickup_time is empty until the rider boards.
struct RiderRecord {
  RequestId request_id = 0;
  double assigned_time = 0.0;
  double solo_time = 0.0;  // T_s, minutes
  std::optional<double> pickup_time;

  bool on_board() const noexcept { return pickup_time.has_value(); }
};

struct Vehicle {
  VehicleId id = 0;
  Point position;
  int capacity = 4;
  double speed = 0.35;  // km per minute
  double odometer = 0.0;  // km driven so far
  std::vector<RouteStop> route;
  std::vector<RiderRecord> riders;

  int onboard_count() const noexcept;
  bool idle() const noexcept { return route.empty(); }
  const RiderRecord* find_rider(RequestId id) const noexcept;
};

/// Manhattan length of driving from `start` through every stop in order.
double route_length(Point start, const std::vector<RouteStop>& route) noexcept;

/// True when replaying `route` from `initial_load` riders never exceeds
/// `capacity`, every dropoff follows its pickup, and every request present
/// at the start (the onboard riders) has exactly one dropoff.
bool route_feasible(const std::vector<RouteStop>& route, int initial_load,
                    int capacity);

/// Checks the vehicle invariants: onboard count within capacity, one
/// remaining dropoff per onboard rider, one pickup and one dropoff per
/// assigned-but-waiting rider, and load feasibility along the route.
bool vehicle_consistent(const Vehicle& v);

struct ZoneParams {
  double r_s = 0.7;   // km
  double phi = 60.0;  // degrees
  double n_s_init = 2.0;
  double n_d_init = 1.0;
  double tau = 20.0;  // minutes
  double c_w = 1.1;
  double c_t = 1.0;

  void validate() const;
};

struct Weights {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 0.1;

  void validate() const;
};

}  // namespace pcrm
