#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pcrm/core.hpp"
#include "pcrm/matching.hpp"
#include "pcrm/metrics.hpp"
#include "pcrm/sim.hpp"

namespace pcrm {

struct GeoBox {
  double lon_min = -74.05;
  double lat_min = 40.65;
  double lon_max = -73.90;
  double lat_max = 40.85;

  bool contains(double lon, double lat) const noexcept {
    return lon >= lon_min && lon <= lon_max && lat >= lat_min && lat <= lat_max;
  }
};

/// Equirectangular projection to km about a reference latitude/longitude.
class Projection {
 public:
  Projection(double ref_lon, double ref_lat);
  static Projection about_centroid(const GeoBox& box);

  Point to_km(double lon, double lat) const noexcept;
  std::pair<double, double> to_lonlat(Point p) const noexcept;  // (lon, lat)
  /// Projected extent of a box.
  Region region_of(const GeoBox& box) const noexcept;

  double ref_lon() const noexcept { return ref_lon_; }
  double ref_lat() const noexcept { return ref_lat_; }

 private:
  double ref_lon_;
  double ref_lat_;
  double km_per_deg_lon_;
};

/// Minutes since 1970-01-01 for "YYYY-MM-DD HH:MM:SS[.fff]" (a 'T'
/// separator is accepted). Throws std::invalid_argument when malformed.
double parse_datetime_minutes(std::string_view text);
/// Inverse of parse_datetime_minutes, with microsecond resolution.
std::string format_datetime(double minutes_since_epoch);

/// Header names for the trip-record columns; NYC schemas differ by year.
struct ColumnMap {
  std::string pickup_datetime = "pickup_datetime";
  std::string pickup_lon = "pickup_longitude";
  std::string pickup_lat = "pickup_latitude";
  std::string dropoff_lon = "dropoff_longitude";
  std::string dropoff_lat = "dropoff_latitude";
};

struct IngestOptions {
  GeoBox bbox;
  std::string window_start = "2016-06-01 00:00:00";
  double window_minutes = 24.0 * 60.0;
  ColumnMap columns;
  bool strict = false;
  double patience = 20.0;
};

struct Workload {
  std::vector<TripRequest> requests;
  std::size_t rows = 0;
  std::size_t skipped_malformed = 0;
  std::size_t skipped_outside = 0;
};

/// Reads a trip-record CSV into requests sorted by release time (minutes
/// since the window start), projected about the bbox centroid. Malformed rows
/// are skipped with a warning on stderr, or abort the read in strict mode.
/// Throws std::runtime_error when the file is unreadable or nothing survives.
Workload ingest_csv(const std::filesystem::path& path, const IngestOptions& options);

/// Writes requests in the trip-record schema, so ingest_csv with the same
/// options reads them back.
void write_workload_csv(const std::filesystem::path& path,
                        const std::vector<TripRequest>& requests,
                        const IngestOptions& options);

struct Hotspot {
  Point center;
  double sigma = 0.5;  // km
  double weight = 1.0;
};

struct SyntheticSpec {
  std::vector<double> rate_per_hour;  // requests per minute, one entry per hour
  Region region;
  std::vector<Hotspot> hotspots;  // empty: uniform over the region
  double min_trip_km = 0.5;
  double patience = 20.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Poisson arrivals at the piecewise-constant hourly rates; endpoints drawn
/// from the hotspot mixture and kept inside the region. Deterministic per
/// seed.
std::vector<TripRequest> generate(const SyntheticSpec& spec);

struct SweepCell {
  double r_s = 0.0;
  double phi = 0.0;
  MetricsReport report;
};

struct StrategyRun {
  StrategyKind kind = StrategyKind::pcrm;
  MetricsReport report;
};

inline constexpr std::string_view kSweepHeader = "r_s,phi,msi,sai,ici_total,ici_mean,ui";
inline constexpr std::string_view kCompareHeader = "hour,strategy,msi,sai,ici_mean,ui";

std::string sweep_csv(const std::vector<SweepCell>& cells);
/// Per-hour rows for each strategy followed by one "all" row per strategy.
std::string compare_csv(const std::vector<StrategyRun>& runs);
std::vector<SweepCell> parse_sweep_csv(std::string_view text);

/// Writes `contents` to a temporary sibling and renames it into place.
/// Throws std::runtime_error when the path is unwritable.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

/// FNV-1a 64-bit digest, rendered as 16 hex digits.
std::string digest_hex(std::string_view bytes);

}  // namespace pcrm
