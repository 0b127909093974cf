#include "pcrm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pcrm {

ServedTiming served_timing(const TripRequest& r, double speed) {
  if (!r.assigned_time() || !r.pickup_time() || !r.dropoff_time()) {
    throw std::logic_error("served request " + std::to_string(r.id) + " lacks timing");
  }
  return {*r.pickup_time() - *r.assigned_time(), *r.dropoff_time() - *r.pickup_time(),
          single_drive_time(r, speed)};
}

namespace {

double rider_ici(const ServedTiming& t, double c_w, double c_t, bool clamp) {
  const double excess = t.trip - t.single;
  return c_w * t.wait + c_t * (clamp ? std::max(0.0, excess) : excess);
}

int hour_of(double minutes) { return static_cast<int>(std::floor(minutes / 60.0)); }

double ratio_or_zero(double single, double share) {
  return share > 0.0 ? (single - share) / share : 0.0;
}

}  // namespace

double ici(const std::vector<TripRequest>& requests, double c_w, double c_t, double speed,
           bool clamp_excess) {
  double total = 0.0;
  for (const auto& r : requests) {
    if (r.state() != RequestState::completed) continue;
    total += rider_ici(served_timing(r, speed), c_w, c_t, clamp_excess);
  }
  return total;
}

double msi(const std::vector<VehicleMileage>& vehicles) {
  double single = 0.0;
  double share = 0.0;
  for (const auto& v : vehicles) {
    single += v.single_km;
    share += v.share_km;
  }
  if (share == 0.0) {
    if (single == 0.0) return 0.0;
    throw std::domain_error("riders delivered with zero driven mileage");
  }
  return (single - share) / share;
}

double sai(const std::vector<TripRequest>& requests) {
  if (requests.empty()) return 1.0;
  const auto served = std::count_if(requests.begin(), requests.end(), [](const TripRequest& r) {
    return r.state() == RequestState::completed;
  });
  return static_cast<double>(served) / static_cast<double>(requests.size());
}

double ui(double msi_value, double sai_value, double ici_mean, const Weights& w) {
  return w.alpha * msi_value + w.beta * sai_value - w.gamma * ici_mean;
}

MetricsReport compute_report(const std::vector<TripRequest>& requests,
                             const MileageLedger& mileage, double speed, double c_w,
                             double c_t, const Weights& weights) {
  MetricsReport rep;
  rep.released = static_cast<int>(requests.size());

  struct HourAcc {
    int released = 0;
    int served = 0;
    double ici = 0.0;
  };
  std::map<int, HourAcc> by_hour;

  double wait_sum = 0.0;
  double extra_sum = 0.0;
  for (const auto& r : requests) {
    auto& acc = by_hour[hour_of(r.release_time)];
    ++acc.released;
    if (r.state() == RequestState::rejected) ++rep.rejected;
    if (r.state() != RequestState::completed) continue;
    const ServedTiming t = served_timing(r, speed);
    const double clamped = rider_ici(t, c_w, c_t, true);
    ++rep.served;
    ++acc.served;
    acc.ici += clamped;
    rep.ici_total += clamped;
    rep.ici_total_unclamped += rider_ici(t, c_w, c_t, false);
    wait_sum += t.wait;
    extra_sum += t.trip - t.single;
  }
  if (rep.served > 0) {
    rep.ici_mean = rep.ici_total / rep.served;
    rep.mean_wait_minutes = wait_sum / rep.served;
    rep.mean_extra_trip_minutes = extra_sum / rep.served;
  }
  rep.sai = rep.released == 0 ? 1.0 : static_cast<double>(rep.served) / rep.released;
  rep.msi = msi(mileage.per_vehicle);
  for (const auto& v : mileage.per_vehicle) {
    rep.share_km += v.share_km;
    rep.single_km += v.single_km;
  }
  rep.ui = ui(rep.msi, rep.sai, rep.ici_mean, weights);

  for (const auto& [h, _] : mileage.share_by_hour) by_hour.try_emplace(h);
  for (const auto& [h, _] : mileage.single_by_hour) by_hour.try_emplace(h);
  for (const auto& [h, acc] : by_hour) {
    HourlyMetrics hm;
    hm.hour = h;
    hm.released = acc.released;
    hm.served = acc.served;
    hm.sai = acc.released == 0 ? 1.0 : static_cast<double>(acc.served) / acc.released;
    hm.ici_mean = acc.served == 0 ? 0.0 : acc.ici / acc.served;
    const auto share = mileage.share_by_hour.find(h);
    const auto single = mileage.single_by_hour.find(h);
    hm.msi = ratio_or_zero(single == mileage.single_by_hour.end() ? 0.0 : single->second,
                           share == mileage.share_by_hour.end() ? 0.0 : share->second);
    hm.ui = ui(hm.msi, hm.sai, hm.ici_mean, weights);
    rep.hourly.push_back(hm);
  }
  return rep;
}

}  // namespace pcrm
