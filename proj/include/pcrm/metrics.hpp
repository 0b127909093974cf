#pragma once

#include <map>
#include <vector>

#include "pcrm/core.hpp"

namespace pcrm {

struct VehicleMileage {
  double share_km = 0.0;   // M_share: distance actually driven
  double single_km = 0.0;  // M_single: solo distances of riders it delivered
};

/// Driven and solo mileage, per vehicle and bucketed by hour of simulated
/// time (movement by the hour it happened, solo mileage by dropoff hour).
struct MileageLedger {
  std::vector<VehicleMileage> per_vehicle;
  std::map<int, double> share_by_hour;
  std::map<int, double> single_by_hour;
};

struct HourlyMetrics {
  int hour = 0;
  int released = 0;
  int served = 0;
  double msi = 0.0;
  double sai = 1.0;
  double ici_mean = 0.0;
  double ui = 0.0;
};

struct MetricsReport {
  int released = 0;
  int served = 0;
  int rejected = 0;
  double ici_total = 0.0;            // trip excess clamped at zero
  double ici_total_unclamped = 0.0;  // raw sum of C_w*T_w + C_t*(T_t - T_s)
  double ici_mean = 0.0;             // ici_total per served request
  double msi = 0.0;
  double sai = 1.0;
  double ui = 0.0;
  double mean_wait_minutes = 0.0;
  double mean_extra_trip_minutes = 0.0;  // mean of T_t - T_s over served
  double share_km = 0.0;
  double single_km = 0.0;
  std::vector<HourlyMetrics> hourly;
};

/// Timing of one served request.
struct ServedTiming {
  double wait = 0.0;    // T_w
  double trip = 0.0;    // T_t
  double single = 0.0;  // T_s
};

/// Timing of a completed request; throws std::logic_error when any timestamp
/// is missing.
ServedTiming served_timing(const TripRequest& r, double speed);

/// Inconvenience summed over served requests. With `clamp_excess` the
/// trip-time excess contributes max(0, T_t - T_s).
double ici(const std::vector<TripRequest>& requests, double c_w, double c_t, double speed,
           bool clamp_excess = true);

/// (sum M_single - sum M_share) / sum M_share. Zero when nothing moved and
/// nobody was served; throws std::domain_error if riders were delivered
/// without any driving.
double msi(const std::vector<VehicleMileage>& vehicles);

/// |R+| / |R| over released requests; 1 for an empty set.
double sai(const std::vector<TripRequest>& requests);

double ui(double msi_value, double sai_value, double ici_mean, const Weights& w);

MetricsReport compute_report(const std::vector<TripRequest>& requests,
                             const MileageLedger& mileage, double speed, double c_w,
                             double c_t, const Weights& weights);

}  // namespace pcrm
