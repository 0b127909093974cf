#include "pcrm/io.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pcrm {

namespace {

constexpr double kEarthRadiusKm = 6371.0088;
constexpr double kKmPerDegLat = kEarthRadiusKm * std::numbers::pi / 180.0;
constexpr std::int64_t kMicrosPerMinute = 60'000'000;

// Shortest of %.15g / %.17g that parses back to the same double.
std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<int> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  int v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

std::int64_t parse_datetime_micros(std::string_view text) {
  text = trim(text);
  auto fail = [&]() -> std::int64_t {
    throw std::invalid_argument("malformed datetime '" + std::string(text) + "'");
  };
  if (text.size() < 19 || text[4] != '-' || text[7] != '-' || (text[10] != ' ' && text[10] != 'T') ||
      text[13] != ':' || text[16] != ':') {
    return fail();
  }
  const auto y = parse_int(text.substr(0, 4));
  const auto mo = parse_int(text.substr(5, 2));
  const auto d = parse_int(text.substr(8, 2));
  const auto h = parse_int(text.substr(11, 2));
  const auto mi = parse_int(text.substr(14, 2));
  const auto s = parse_int(text.substr(17, 2));
  if (!y || !mo || !d || !h || !mi || !s || *h > 23 || *mi > 59 || *s > 60) return fail();
  using namespace std::chrono;
  const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)},
                           day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return fail();
  std::int64_t micros = 0;
  std::string_view rest = text.substr(19);
  if (!rest.empty()) {
    if (rest.front() != '.' || rest.size() < 2) return fail();
    rest.remove_prefix(1);
    std::int64_t scale = 100'000;
    for (char c : rest) {
      if (c < '0' || c > '9') return fail();
      micros += (c - '0') * scale;
      scale /= 10;
    }
  }
  const std::int64_t days = sys_days{ymd}.time_since_epoch().count();
  return ((days * 24 + *h) * 60 + *mi) * kMicrosPerMinute + std::int64_t{*s} * 1'000'000 + micros;
}

std::string format_datetime_micros(std::int64_t micros) {
  using namespace std::chrono;
  const std::int64_t per_day = 24 * 60 * kMicrosPerMinute;
  std::int64_t days = micros / per_day;
  std::int64_t rem = micros % per_day;
  if (rem < 0) {
    rem += per_day;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  const std::int64_t secs = rem / 1'000'000;
  const std::int64_t frac = rem % 1'000'000;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02lld:%02lld:%02lld.%06lld",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<long long>(secs / 3600),
                static_cast<long long>((secs / 60) % 60), static_cast<long long>(secs % 60),
                static_cast<long long>(frac));
  return buf;
}

}  // namespace

Projection::Projection(double ref_lon, double ref_lat)
    : ref_lon_(ref_lon),
      ref_lat_(ref_lat),
      km_per_deg_lon_(kKmPerDegLat * std::cos(ref_lat * std::numbers::pi / 180.0)) {}

Projection Projection::about_centroid(const GeoBox& box) {
  return Projection(0.5 * (box.lon_min + box.lon_max), 0.5 * (box.lat_min + box.lat_max));
}

Point Projection::to_km(double lon, double lat) const noexcept {
  return {(lon - ref_lon_) * km_per_deg_lon_, (lat - ref_lat_) * kKmPerDegLat};
}

std::pair<double, double> Projection::to_lonlat(Point p) const noexcept {
  return {ref_lon_ + p.x / km_per_deg_lon_, ref_lat_ + p.y / kKmPerDegLat};
}

Region Projection::region_of(const GeoBox& box) const noexcept {
  const Point lo = to_km(box.lon_min, box.lat_min);
  const Point hi = to_km(box.lon_max, box.lat_max);
  return {lo.x, hi.x, lo.y, hi.y};
}

double parse_datetime_minutes(std::string_view text) {
  return static_cast<double>(parse_datetime_micros(text)) / kMicrosPerMinute;
}

std::string format_datetime(double minutes_since_epoch) {
  return format_datetime_micros(std::llround(minutes_since_epoch * kMicrosPerMinute));
}

Workload ingest_csv(const std::filesystem::path& path, const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open workload file " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) {
    throw std::runtime_error("workload file " + path.string() + " is empty");
  }
  const auto header = split_csv(line);
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), std::string_view(name));
    if (it == header.end()) {
      throw std::runtime_error("workload file lacks column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto& cm = options.columns;
  const std::size_t c_time = column(cm.pickup_datetime);
  const std::size_t c_plon = column(cm.pickup_lon);
  const std::size_t c_plat = column(cm.pickup_lat);
  const std::size_t c_dlon = column(cm.dropoff_lon);
  const std::size_t c_dlat = column(cm.dropoff_lat);
  const std::size_t needed = std::max({c_time, c_plon, c_plat, c_dlon, c_dlat}) + 1;

  const std::int64_t start = parse_datetime_micros(options.window_start);
  const auto window =
      static_cast<std::int64_t>(std::llround(options.window_minutes * kMicrosPerMinute));
  const Projection proj = Projection::about_centroid(options.bbox);

  struct Row {
    std::int64_t offset;
    Point origin;
    Point destination;
  };
  std::vector<Row> rows;
  Workload out;
  std::size_t line_no = 1;
  auto malformed = [&](const std::string& why) {
    if (options.strict) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + why);
    }
    if (out.skipped_malformed < 10) {
      std::cerr << "warning: " << path.string() << ":" << line_no << ": skipping row (" << why
                << ")\n";
    }
    ++out.skipped_malformed;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++out.rows;
    const auto f = split_csv(line);
    if (f.size() < needed) {
      malformed("too few fields");
      continue;
    }
    std::int64_t when = 0;
    try {
      when = parse_datetime_micros(f[c_time]);
    } catch (const std::invalid_argument& e) {
      malformed(e.what());
      continue;
    }
    const auto plon = parse_double(f[c_plon]);
    const auto plat = parse_double(f[c_plat]);
    const auto dlon = parse_double(f[c_dlon]);
    const auto dlat = parse_double(f[c_dlat]);
    if (!plon || !plat || !dlon || !dlat) {
      malformed("non-numeric coordinate");
      continue;
    }
    if (*plon == *dlon && *plat == *dlat) {
      malformed("dropoff equals pickup");
      continue;
    }
    const std::int64_t offset = when - start;
    if (offset < 0 || offset >= window || !options.bbox.contains(*plon, *plat) ||
        !options.bbox.contains(*dlon, *dlat)) {
      ++out.skipped_outside;
      continue;
    }
    rows.push_back({offset, proj.to_km(*plon, *plat), proj.to_km(*dlon, *dlat)});
  }
  if (out.skipped_malformed > 10) {
    std::cerr << "warning: " << out.skipped_malformed << " malformed rows skipped in total\n";
  }
  if (rows.empty()) {
    throw std::runtime_error("no usable trip records in " + path.string());
  }

  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rows[a].offset < rows[b].offset; });
  out.requests.reserve(rows.size());
  for (std::size_t i : order) {
    const auto& r = rows[i];
    out.requests.emplace_back(static_cast<RequestId>(i), r.origin, r.destination,
                              static_cast<double>(r.offset) / kMicrosPerMinute, options.patience);
  }
  return out;
}

void write_workload_csv(const std::filesystem::path& path,
                        const std::vector<TripRequest>& requests,
                        const IngestOptions& options) {
  const std::int64_t start = parse_datetime_micros(options.window_start);
  const Projection proj = Projection::about_centroid(options.bbox);
  const auto& cm = options.columns;
  std::string out = cm.pickup_datetime + "," + cm.pickup_lon + "," + cm.pickup_lat + "," +
                    cm.dropoff_lon + "," + cm.dropoff_lat + "\n";
  char buf[160];
  for (const auto& r : requests) {
    const auto [plon, plat] = proj.to_lonlat(r.origin);
    const auto [dlon, dlat] = proj.to_lonlat(r.destination);
    const std::string when =
        format_datetime_micros(start + std::llround(r.release_time * kMicrosPerMinute));
    std::snprintf(buf, sizeof buf, ",%.10f,%.10f,%.10f,%.10f\n", plon, plat, dlon, dlat);
    out += when;
    out += buf;
  }
  write_file_atomic(path, out);
}

void SyntheticSpec::validate() const {
  for (double r : rate_per_hour) {
    if (!(r >= 0.0)) throw std::invalid_argument("arrival rates must be non-negative");
  }
  if (!(region.xmax > region.xmin && region.ymax > region.ymin)) {
    throw std::invalid_argument("synthetic region must have positive extent");
  }
  if (!hotspots.empty()) {
    double total = 0.0;
    for (const auto& h : hotspots) {
      if (h.weight < 0.0 || !(h.sigma > 0.0)) {
        throw std::invalid_argument("hotspot weights must be >= 0 and sigmas > 0");
      }
      total += h.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("hotspot weights must sum to 1");
  }
  if (min_trip_km < 0.0) throw std::invalid_argument("min_trip_km must be non-negative");
  if (!(patience > 0.0)) throw std::invalid_argument("patience must be positive");
}

std::vector<TripRequest> generate(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> ux(spec.region.xmin, spec.region.xmax);
  std::uniform_real_distribution<double> uy(spec.region.ymin, spec.region.ymax);
  std::vector<double> weights;
  for (const auto& h : spec.hotspots) weights.push_back(h.weight);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::normal_distribution<double> normal(0.0, 1.0);

  auto draw_point = [&]() -> Point {
    if (spec.hotspots.empty()) return {ux(rng), uy(rng)};
    const auto& h = spec.hotspots[pick(rng)];
    for (int attempt = 0; attempt < 64; ++attempt) {
      const Point p{h.center.x + h.sigma * normal(rng), h.center.y + h.sigma * normal(rng)};
      if (spec.region.contains(p)) return p;
    }
    return {ux(rng), uy(rng)};
  };

  std::vector<TripRequest> out;
  for (std::size_t hour = 0; hour < spec.rate_per_hour.size(); ++hour) {
    const double rate = spec.rate_per_hour[hour];
    if (rate <= 0.0) continue;
    std::exponential_distribution<double> gap(rate);
    const double end = 60.0 * static_cast<double>(hour + 1);
    double t = 60.0 * static_cast<double>(hour);
    for (;;) {
      t += gap(rng);
      if (t >= end) break;
      const Point origin = draw_point();
      Point dest = draw_point();
      for (int attempt = 0;
           attempt < 1000 && (dest == origin || manhattan_dist(origin, dest) < spec.min_trip_km);
           ++attempt) {
        dest = draw_point();
      }
      if (dest == origin || manhattan_dist(origin, dest) < spec.min_trip_km) {
        throw std::runtime_error("cannot draw a trip longer than min_trip_km in the region");
      }
      out.emplace_back(static_cast<RequestId>(out.size()), origin, dest, t, spec.patience);
    }
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
  std::string out(kSweepHeader);
  out += '\n';
  for (const auto& c : cells) {
    const auto& r = c.report;
    out += fmt_num(c.r_s) + ',' + fmt_num(c.phi) + ',' + fmt_num(r.msi) + ',' + fmt_num(r.sai) +
           ',' + fmt_num(r.ici_total) + ',' + fmt_num(r.ici_mean) + ',' + fmt_num(r.ui) + '\n';
  }
  return out;
}

std::string compare_csv(const std::vector<StrategyRun>& runs) {
  std::string out(kCompareHeader);
  out += '\n';
  for (const auto& run : runs) {
    const std::string name(to_string(run.kind));
    for (const auto& h : run.report.hourly) {
      out += std::to_string(h.hour) + ',' + name + ',' + fmt_num(h.msi) + ',' + fmt_num(h.sai) +
             ',' + fmt_num(h.ici_mean) + ',' + fmt_num(h.ui) + '\n';
    }
    const auto& r = run.report;
    out += "all," + name + ',' + fmt_num(r.msi) + ',' + fmt_num(r.sai) + ',' +
           fmt_num(r.ici_mean) + ',' + fmt_num(r.ui) + '\n';
  }
  return out;
}

std::vector<SweepCell> parse_sweep_csv(std::string_view text) {
  std::vector<SweepCell> cells;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty()) continue;
    if (header) {
      if (line != kSweepHeader) throw std::runtime_error("unexpected sweep CSV header");
      header = false;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 7) throw std::runtime_error("sweep CSV row must have 7 fields");
    std::array<double, 7> v{};
    for (std::size_t i = 0; i < 7; ++i) {
      const auto d = parse_double(f[i]);
      if (!d) throw std::runtime_error("non-numeric sweep CSV field");
      v[i] = *d;
    }
    SweepCell c;
    c.r_s = v[0];
    c.phi = v[1];
    c.report.msi = v[2];
    c.report.sai = v[3];
    c.report.ici_total = v[4];
    c.report.ici_mean = v[5];
    c.report.ui = v[6];
    cells.push_back(c);
  }
  if (header) throw std::runtime_error("sweep CSV lacks a header");
  return cells;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("cannot write " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot write " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string digest_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pcrm
