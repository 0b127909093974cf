#include "pcrm/config.hpp"

#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace pcrm {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const char* where) {
  if (!j.is_object()) throw std::invalid_argument(std::string(where) + " must be an object");
  for (const auto& [k, _] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) {
      throw std::invalid_argument("unknown key '" + k + "' in " + where);
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  reject_unknown(j,
                 {"tick", "horizon", "fleet_size", "capacity", "speed", "patience", "seed",
                  "expiry", "log_moves", "drain_limit", "region", "strategy", "weights", "ingest"},
                 "config");
  ExperimentConfig c;
  auto& s = c.sim;
  read(j, "tick", s.tick);
  read(j, "horizon", s.horizon);
  read(j, "fleet_size", s.fleet_size);
  read(j, "capacity", s.capacity);
  read(j, "speed", s.speed);
  read(j, "patience", s.patience);
  read(j, "seed", s.seed);
  read(j, "log_moves", s.log_moves);
  read(j, "drain_limit", s.drain_limit);
  if (auto it = j.find("expiry"); it != j.end()) {
    const auto v = it->get<std::string>();
    if (v == "assignment") {
      s.expiry = ExpiryMode::assignment;
    } else if (v == "pickup") {
      s.expiry = ExpiryMode::pickup;
    } else {
      throw std::invalid_argument("expiry must be 'assignment' or 'pickup'");
    }
  }

  if (auto it = j.find("strategy"); it != j.end()) {
    const json& st = *it;
    reject_unknown(st, {"kind", "r_s", "phi", "n_s", "n_d", "tau", "c_w", "c_t", "ddm"},
                   "strategy");
    if (auto k = st.find("kind"); k != st.end()) {
      s.strategy.kind = parse_strategy(k->get<std::string>());
    }
    auto& z = s.strategy.zone;
    read(st, "r_s", z.r_s);
    read(st, "phi", z.phi);
    read(st, "n_s", z.n_s_init);
    read(st, "n_d", z.n_d_init);
    read(st, "tau", z.tau);
    read(st, "c_w", z.c_w);
    read(st, "c_t", z.c_t);
    if (auto d = st.find("ddm"); d != st.end()) {
      reject_unknown(*d, {"near_width", "far_width", "depth"}, "strategy.ddm");
      read(*d, "near_width", s.strategy.ddm.near_width);
      read(*d, "far_width", s.strategy.ddm.far_width);
      read(*d, "depth", s.strategy.ddm.depth);
    }
  }
  if (auto it = j.find("weights"); it != j.end()) {
    reject_unknown(*it, {"alpha", "beta", "gamma"}, "weights");
    read(*it, "alpha", s.weights.alpha);
    read(*it, "beta", s.weights.beta);
    read(*it, "gamma", s.weights.gamma);
  }
  if (auto it = j.find("ingest"); it != j.end()) {
    const json& in = *it;
    reject_unknown(in, {"bbox", "window_start", "window_minutes", "strict", "columns"}, "ingest");
    if (auto b = in.find("bbox"); b != in.end()) {
      const auto v = b->get<std::vector<double>>();
      if (v.size() != 4) {
        throw std::invalid_argument("ingest.bbox must be [lon_min, lat_min, lon_max, lat_max]");
      }
      c.ingest.bbox = {v[0], v[1], v[2], v[3]};
    }
    read(in, "window_start", c.ingest.window_start);
    read(in, "window_minutes", c.ingest.window_minutes);
    read(in, "strict", c.ingest.strict);
    if (auto cols = in.find("columns"); cols != in.end()) {
      reject_unknown(*cols,
                     {"pickup_datetime", "pickup_lon", "pickup_lat", "dropoff_lon", "dropoff_lat"},
                     "ingest.columns");
      auto& cm = c.ingest.columns;
      read(*cols, "pickup_datetime", cm.pickup_datetime);
      read(*cols, "pickup_lon", cm.pickup_lon);
      read(*cols, "pickup_lat", cm.pickup_lat);
      read(*cols, "dropoff_lon", cm.dropoff_lon);
      read(*cols, "dropoff_lat", cm.dropoff_lat);
    }
  }
  c.ingest.patience = s.patience;

  if (auto it = j.find("region"); it != j.end()) {
    reject_unknown(*it, {"xmin", "xmax", "ymin", "ymax"}, "region");
    read(*it, "xmin", s.region.xmin);
    read(*it, "xmax", s.region.xmax);
    read(*it, "ymin", s.region.ymin);
    read(*it, "ymax", s.region.ymax);
  } else {
    s.region = Projection::about_centroid(c.ingest.bbox).region_of(c.ingest.bbox);
  }
  s.validate();
  return c;
}

ordered_json to_json(const ExperimentConfig& c) {
  const auto& s = c.sim;
  const auto& z = s.strategy.zone;
  const auto& cm = c.ingest.columns;
  ordered_json j;
  j["tick"] = s.tick;
  j["horizon"] = s.horizon;
  j["fleet_size"] = s.fleet_size;
  j["capacity"] = s.capacity;
  j["speed"] = s.speed;
  j["patience"] = s.patience;
  j["seed"] = s.seed;
  j["expiry"] = s.expiry == ExpiryMode::assignment ? "assignment" : "pickup";
  j["log_moves"] = s.log_moves;
  j["drain_limit"] = s.drain_limit;
  j["region"] = {{"xmin", s.region.xmin},
                 {"xmax", s.region.xmax},
                 {"ymin", s.region.ymin},
                 {"ymax", s.region.ymax}};
  j["strategy"] = {{"kind", std::string(to_string(s.strategy.kind))},
                   {"r_s", z.r_s},
                   {"phi", z.phi},
                   {"n_s", z.n_s_init},
                   {"n_d", z.n_d_init},
                   {"tau", z.tau},
                   {"c_w", z.c_w},
                   {"c_t", z.c_t},
                   {"ddm",
                    {{"near_width", s.strategy.ddm.near_width},
                     {"far_width", s.strategy.ddm.far_width},
                     {"depth", s.strategy.ddm.depth}}}};
  j["weights"] = {{"alpha", s.weights.alpha}, {"beta", s.weights.beta}, {"gamma", s.weights.gamma}};
  j["ingest"] = {{"bbox", {c.ingest.bbox.lon_min, c.ingest.bbox.lat_min, c.ingest.bbox.lon_max,
                           c.ingest.bbox.lat_max}},
                 {"window_start", c.ingest.window_start},
                 {"window_minutes", c.ingest.window_minutes},
                 {"strict", c.ingest.strict},
                 {"columns",
                  {{"pickup_datetime", cm.pickup_datetime},
                   {"pickup_lon", cm.pickup_lon},
                   {"pickup_lat", cm.pickup_lat},
                   {"dropoff_lon", cm.dropoff_lon},
                   {"dropoff_lat", cm.dropoff_lat}}}};
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const json j = parse_file(path);
  try {
    if (j.is_object() && j.contains("config")) return config_from_json(j.at("config"));
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

SyntheticSpec spec_from_json(const json& j) {
  reject_unknown(j, {"rate_per_hour", "region", "hotspots", "min_trip_km", "patience", "seed"},
                 "synthetic spec");
  SyntheticSpec s;
  read(j, "rate_per_hour", s.rate_per_hour);
  read(j, "min_trip_km", s.min_trip_km);
  read(j, "patience", s.patience);
  read(j, "seed", s.seed);
  if (auto it = j.find("region"); it != j.end()) {
    reject_unknown(*it, {"xmin", "xmax", "ymin", "ymax"}, "region");
    read(*it, "xmin", s.region.xmin);
    read(*it, "xmax", s.region.xmax);
    read(*it, "ymin", s.region.ymin);
    read(*it, "ymax", s.region.ymax);
  }
  if (auto it = j.find("hotspots"); it != j.end()) {
    for (const auto& h : *it) {
      reject_unknown(h, {"x", "y", "sigma", "weight"}, "hotspot");
      Hotspot hs;
      read(h, "x", hs.center.x);
      read(h, "y", hs.center.y);
      read(h, "sigma", hs.sigma);
      read(h, "weight", hs.weight);
      s.hotspots.push_back(hs);
    }
  }
  s.validate();
  return s;
}

ordered_json to_json(const SyntheticSpec& s) {
  ordered_json j;
  j["rate_per_hour"] = s.rate_per_hour;
  j["region"] = {{"xmin", s.region.xmin},
                 {"xmax", s.region.xmax},
                 {"ymin", s.region.ymin},
                 {"ymax", s.region.ymax}};
  j["hotspots"] = ordered_json::array();
  for (const auto& h : s.hotspots) {
    j["hotspots"].push_back(
        {{"x", h.center.x}, {"y", h.center.y}, {"sigma", h.sigma}, {"weight", h.weight}});
  }
  j["min_trip_km"] = s.min_trip_km;
  j["patience"] = s.patience;
  j["seed"] = s.seed;
  return j;
}

SyntheticSpec load_spec(const std::filesystem::path& path) {
  try {
    return spec_from_json(parse_file(path));
  } catch (const json::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

ordered_json to_json(const MetricsReport& r) {
  ordered_json j;
  j["released"] = r.released;
  j["served"] = r.served;
  j["rejected"] = r.rejected;
  j["msi"] = r.msi;
  j["sai"] = r.sai;
  j["ici_total"] = r.ici_total;
  j["ici_total_unclamped"] = r.ici_total_unclamped;
  j["ici_mean"] = r.ici_mean;
  j["ui"] = r.ui;
  j["mean_wait_minutes"] = r.mean_wait_minutes;
  j["mean_extra_trip_minutes"] = r.mean_extra_trip_minutes;
  j["share_km"] = r.share_km;
  j["single_km"] = r.single_km;
  return j;
}

}  // namespace pcrm
