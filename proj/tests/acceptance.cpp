// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// blocking criterion fails. Criterion 8 needs a user-supplied trip-record
// extract (PCRM_NYC_CSV, optionally PCRM_NYC_CONFIG) and never blocks.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "pcrm/config.hpp"
#include "pcrm/experiment.hpp"
#include "pcrm/geometry.hpp"
#include "pcrm/io.hpp"
#include "pcrm/matching.hpp"
#include "pcrm/metrics.hpp"
#include "pcrm/sim.hpp"

using namespace pcrm;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failed = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failed;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

// Pooled-demand workload: 12 hours, about 10k trips in a 6 km square with
// two commuter hotspots and a diffuse center.
SyntheticSpec workload_spec(std::uint64_t seed) {
  SyntheticSpec s;
  s.rate_per_hour = {12, 14, 16, 16, 14, 12, 12, 14, 16, 16, 14, 12};
  s.region = {-3, 3, -3, 3};
  s.hotspots = {{{-1.5, -1.2}, 0.5, 0.3}, {{1.2, 1.5}, 0.5, 0.3}, {{0, 0}, 1.0, 0.4}};
  s.min_trip_km = 0.5;
  s.patience = 20;
  s.seed = seed;
  return s;
}

SimConfig workload_config() {
  SimConfig c;
  c.horizon = 720;
  c.fleet_size = 200;
  c.region = {-3, 3, -3, 3};
  c.log_moves = false;
  return c;
}

// ---------------------------------------------------------------- 1
void geometry_oracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(-3, 3);
  std::uniform_real_distribution<double> un(0.01, 2.0);
  std::uniform_real_distribution<double> ur(0.05, 5.0);
  std::uniform_real_distribution<double> uphi(0.5, 90.0);
  std::uniform_int_distribution<int> degenerate(0, 99);
  auto point = [&] {
    const double x = u(rng);
    return Point{x, u(rng)};
  };
  constexpr int kN = 100000;
  int bad_src = 0, bad_oval = 0, bad_tri = 0;
  for (int i = 0; i < kN; ++i) {
    const Point a = point(), b = point();
    Point c = point();
    if (degenerate(rng) == 0) c = a;  // query at the pole
    if (a == b) continue;
    const double n = un(rng), r = ur(rng);
    if (in_source_zone(PolarFrame(a, b), c, r, n) != oracle::source_zone(a, b, c, r, n)) ++bad_src;
    const double nd = std::min(n, 1.0);
    if (in_oval_zone(a, b, c, nd) != oracle::oval_zone(a, b, c, nd)) ++bad_oval;
    if (degenerate(rng) == 0) c = b;  // dropoff at the tail
    const double phi = uphi(rng);
    if (in_triangle_zone(a, b, c, phi) != oracle::triangle_zone(a, b, c, phi)) ++bad_tri;
  }
  const double secs = seconds_since(t0);
  const bool ok = bad_src == 0 && bad_oval == 0 && bad_tri == 0 && secs < 10.0;
  report(1, "zone predicates vs brute-force oracles", ok,
         std::to_string(kN) + " instances each; disagreements source=" + std::to_string(bad_src) +
             " oval=" + std::to_string(bad_oval) + " triangle=" + std::to_string(bad_tri) +
             fmt("; %.2f s (limit 10 s)", secs));
}

// ---------------------------------------------------------------- 2
void adaptive_identities() {
  bool ok = true;
  std::string why;
  for (double n0 : {0.3, 1.0, 2.0}) {
    if (adaptive_factor(n0, {}, 1.1, 1.0, 20.0) != n0) {
      ok = false;
      why += " zero-delay";
    }
  }
  const double hand = adaptive_factor(2.0, {10.0, 5.0, 5.0}, 1.1, 1.0, 20.0);
  const double expect = 2.0 - (std::exp(0.55) - 1.0);
  const double err = std::abs(hand - expect);
  if (!(err <= 1e-12)) {
    ok = false;
    why += " hand-value";
  }
  for (int term = 0; term < 2; ++term) {
    double prev = adaptive_factor(2.0, {}, 1.1, 1.0, 20.0);
    bool floored = false;
    for (int k = 1; k <= 4000; ++k) {
      const double d = 0.01 * k;
      const AdaptiveState s = term == 0 ? AdaptiveState{d, 0, 0} : AdaptiveState{0, 10 + d, 10};
      const double n = adaptive_factor(2.0, s, 1.1, 1.0, 20.0);
      if (prev > kAdaptiveFloor ? !(n < prev) : n != kAdaptiveFloor) {
        ok = false;
        why += term == 0 ? " wait-monotone" : " trip-monotone";
        break;
      }
      floored = floored || n == kAdaptiveFloor;
      prev = n;
    }
    if (!floored) {
      ok = false;
      why += " floor-not-reached";
    }
  }
  report(2, "adaptive factor identities", ok,
         fmt("n(2; T_lw=10) = %.15f", hand) + fmt(", |err| = %.2e (limit 1e-12)", err) +
             (why.empty() ? "" : ";" + why));
}

// ---------------------------------------------------------------- 3
void metric_identities() {
  std::vector<std::string> bad;
  SimConfig c;
  c.tick = 1.0;
  c.speed = 0.25;
  c.horizon = 10.0;
  c.fleet_size = 1;
  c.strategy.zone.r_s = 2.0;
  Vehicle v;
  v.speed = 0.25;

  const std::vector<TripRequest> pair{TripRequest(1, {0, 0}, {1, 0}, 0, 20),
                                      TripRequest(2, {0, 0}, {1, 0}, 0, 20)};
  const double msi_pair = run(c, pair, {v}).report.msi;
  if (msi_pair != 1.0) bad.push_back("pooled pair MSI");

  const std::vector<TripRequest> single{TripRequest(1, {0, 0}, {0.75, 0.5}, 0, 20)};
  const double msi_single = run(c, single, {v}).report.msi;
  if (msi_single != 0.0) bad.push_back("single rider MSI");

  std::vector<TripRequest> four;
  for (int i = 0; i < 4; ++i) four.emplace_back(i, Point{0, 0}, Point{1, 0}, 0, 20);
  for (int i = 0; i < 3; ++i) {
    four[i].assign(0);
    four[i].pick_up(1);
    four[i].drop_off(5);
  }
  four[3].reject(21);
  if (sai(four) != 0.75 || sai({}) != 1.0) bad.push_back("SAI rational");

  const Weights w;
  const double b = ui(0.25, 0.5, 2.0, w);
  if (!(ui(0.5, 0.5, 2.0, w) - b == 0.25 && ui(0.25, 0.75, 2.0, w) - b == 0.25 &&
        ui(0.25, 0.5, 4.0, w) < b)) {
    bad.push_back("UI affine signs");
  }

  SimConfig busy = workload_config();
  busy.horizon = 120;
  busy.fleet_size = 40;
  busy.strategy.zone.c_w = 0.0;
  busy.strategy.zone.c_t = 0.0;
  auto spec = workload_spec(3);
  spec.rate_per_hour = {10, 10};
  const auto res = run(busy, generate(spec));
  if (res.report.ici_total != 0.0 || res.report.ici_total_unclamped != 0.0 ||
      ici(res.requests, 0.0, 0.0, busy.speed) != 0.0) {
    bad.push_back("zero-weight ICI");
  }

  std::string detail = fmt("MSI(pair)=%g", msi_pair) + fmt(", MSI(single)=%g", msi_single) +
                       fmt(", SAI(3/4)=%g", sai(four)) +
                       fmt(", ICI(C_w=C_t=0) over %g served = ", res.report.served) +
                       fmt("%g", res.report.ici_total);
  for (const auto& s : bad) detail += "; broken: " + s;
  report(3, "metric identities", bad.empty(), detail);
}

// ---------------------------------------------------------------- 4
void matching_oracles() {
  std::mt19937_64 rng(4242);
  constexpr int kInstances = 400;
  int decisions = 0, bad = 0, accepted = 0;
  auto same = [](const std::optional<MatchDecision>& a, const std::optional<MatchDecision>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    return a->vehicle_id == b->vehicle_id && a->pickup_index == b->pickup_index &&
           a->dropoff_index == b->dropoff_index &&
           std::abs(a->added_distance - b->added_distance) < 1e-9;
  };
  for (int i = 0; i < kInstances; ++i) {
    const auto inst = oracle::random_instance(rng);
    for (const auto& r : inst.pending) {
      const auto p = pcrm_match(r, inst.fleet, inst.zone, inst.now);
      const auto d = ddm_match(r, inst.fleet, inst.trap, inst.now);
      const auto o = og_match(r, inst.fleet, inst.now);
      bad += !same(p, oracle::pcrm(r, inst.fleet, inst.zone, inst.now));
      bad += !same(d, oracle::ddm(r, inst.fleet, inst.trap));
      bad += !same(o, oracle::og(r, inst.fleet));
      decisions += 3;
      accepted += p.has_value() + d.has_value() + o.has_value();
    }
  }
  report(4, "matching vs exhaustive enumeration", bad == 0 && kInstances >= 200,
         std::to_string(kInstances) + " instances, " + std::to_string(decisions) +
             " decisions (" + std::to_string(accepted) + " matches), " + std::to_string(bad) +
             " disagreements");
}

// ---------------------------------------------------------------- 5, 6
void trend_and_saturation() {
  const auto wl = generate(workload_spec(7));
  const std::vector<double> rs{0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  const std::vector<double> phis{45, 60, 75, 90};

  const auto t0 = Clock::now();
  const auto cells = run_sweep(workload_config(), wl, rs, phis, jobs());
  const double secs = seconds_since(t0);
  double worst = 1.0;
  std::string per_phi;
  for (std::size_t j = 0; j < phis.size(); ++j) {
    std::vector<double> ici_mean;
    for (std::size_t i = 0; i < rs.size(); ++i) ici_mean.push_back(cells[i * phis.size() + j].report.ici_mean);
    const double rho = spearman(rs, ici_mean);
    worst = std::min(worst, rho);
    per_phi += fmt(" phi=%g:", phis[j]) + fmt("%.3f", rho);
  }
  report(5, "mean ICI rises with R_s", worst >= 0.8 && secs < 300.0,
         std::to_string(wl.size()) + " requests / 200 vehicles; Spearman" + per_phi +
             fmt(" (min %.3f, need >= 0.8)", worst) + fmt("; %.1f s (limit 300 s)", secs));

  auto cfg = workload_config();
  cfg.fleet_size = 400;
  cfg.strategy.zone.r_s = 5.0;
  cfg.strategy.zone.phi = 90.0;
  const auto rep = run(cfg, wl).report;
  report(6, "saturation with wide zones", rep.sai >= 0.999,
         fmt("R_s=5 km, phi=90, 400 vehicles: SAI = %.5f (need >= 0.999)", rep.sai) +
             fmt(", served %g", rep.served) + fmt(" of %g", rep.released));
}

// ---------------------------------------------------------------- 7
void strategy_ordering() {
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    const auto runs = run_compare(workload_config(), generate(workload_spec(seed)),
                                  {StrategyKind::pcrm, StrategyKind::og}, jobs());
    const double margin = runs[0].report.ui - runs[1].report.ui;
    ok = ok && margin >= 0.0;
    detail += fmt(" seed %g:", static_cast<double>(seed)) + fmt(" PCRM %.3f", runs[0].report.ui) +
              fmt(" vs OG %.3f", runs[1].report.ui) + fmt(" (margin %+.3f);", margin);
  }
  report(7, "UI(PCRM) >= UI(OG)", ok, detail);
}

// ---------------------------------------------------------------- 8
void real_data() {
  const char* csv = std::getenv("PCRM_NYC_CSV");
  if (csv == nullptr || *csv == '\0') {
    std::printf("[SKIP] 8 real-data magnitudes: set PCRM_NYC_CSV to a trip-record extract "
                "(non-blocking)\n");
    return;
  }
  try {
    ExperimentConfig cfg;
    if (const char* c = std::getenv("PCRM_NYC_CONFIG"); c != nullptr && *c != '\0') cfg = load_config(c);
    cfg.sim.log_moves = false;
    const auto wl = ingest_csv(csv, cfg.ingest);
    const auto rep = run(cfg.sim, wl.requests).report;
    const bool ok = std::abs(rep.msi - 0.38) <= 0.08 && rep.sai >= 0.99 &&
                    std::abs(rep.mean_extra_trip_minutes - 3.8) <= 1.5;
    std::printf("[%s] 8 real-data magnitudes (non-blocking): MSI %.3f (0.38 +- 0.08), SAI %.4f "
                "(>= 0.99), mean extra trip %.2f min (3.8 +- 1.5)\n",
                ok ? "PASS" : "FAIL", rep.msi, rep.sai, rep.mean_extra_trip_minutes);
  } catch (const std::exception& e) {
    std::printf("[FAIL] 8 real-data magnitudes (non-blocking): %s\n", e.what());
  }
}

// ---------------------------------------------------------------- 9
int sh(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void manifest_determinism() {
  std::random_device rd;
  const fs::path dir = fs::temp_directory_path() / ("pcrm_accept_" + std::to_string(rd()));
  fs::create_directories(dir);
  auto q = [](const fs::path& p) { return "'" + p.string() + "'"; };
  const std::string cli = PCRM_CLI_PATH;

  auto spec = workload_spec(11);
  spec.rate_per_hour = {8, 10};
  ExperimentConfig cfg;
  cfg.sim = workload_config();
  cfg.sim.horizon = 120;
  cfg.sim.fleet_size = 60;
  write_workload_csv(dir / "wl.csv", generate(spec), cfg.ingest);
  write_file_atomic(dir / "config.json", to_json(cfg).dump(2));

  struct Case {
    std::string name;
    std::string args;
    std::vector<std::string> files;
  };
  const std::vector<Case> cases{
      {"run", "run --seed 3 --strategy ddm", {"report.csv", "hourly.csv"}},
      {"sweep", "sweep --grid-rs 0.5,0.9 --grid-phi 45,90 --jobs 2", {"sweep.csv"}},
      {"compare", "compare --strategy pcrm,og", {"compare.csv"}},
  };
  int identical = 0, total = 0;
  std::string problems;
  for (const auto& c : cases) {
    const fs::path a = dir / (c.name + "_a");
    const fs::path b = dir / (c.name + "_b");
    const std::string io = " --workload " + q(dir / "wl.csv") + " 2>/dev/null >/dev/null";
    if (sh(cli + " " + c.args + " --config " + q(dir / "config.json") + " --out " + q(a) + io) != 0 ||
        sh(cli + " " + c.name + " --config " + q(a / "manifest.json") + " --out " + q(b) + io) != 0) {
      problems += " " + c.name + ":exit";
      total += static_cast<int>(c.files.size());
      continue;
    }
    for (const auto& f : c.files) {
      ++total;
      if (read_file(a / f) == read_file(b / f)) {
        ++identical;
      } else {
        problems += " " + c.name + "/" + f;
      }
    }
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  report(9, "manifest re-runs are byte-identical", identical == total && total > 0,
         std::to_string(identical) + "/" + std::to_string(total) +
             " CSV outputs identical across run, sweep and compare" +
             (problems.empty() ? "" : "; differing:" + problems));
}

void guarded(const char* name, int id, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main() {
  guarded("zone predicates vs brute-force oracles", 1, geometry_oracles);
  guarded("adaptive factor identities", 2, adaptive_identities);
  guarded("metric identities", 3, metric_identities);
  guarded("matching vs exhaustive enumeration", 4, matching_oracles);
  guarded("trend and saturation", 5, trend_and_saturation);
  guarded("UI(PCRM) >= UI(OG)", 7, strategy_ordering);
  real_data();
  guarded("manifest re-runs are byte-identical", 9, manifest_determinism);
  std::printf("%s: %d blocking criteria failed\n", g_failed == 0 ? "ACCEPTED" : "REJECTED", g_failed);
  return g_failed == 0 ? 0 : 1;
}
