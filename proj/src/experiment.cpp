#include "pcrm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace pcrm {

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<SweepCell> run_sweep(const SimConfig& base, const std::vector<TripRequest>& workload,
                                 const std::vector<double>& r_s_values,
                                 const std::vector<double>& phi_values, int jobs) {
  if (r_s_values.empty() || phi_values.empty()) {
    throw std::invalid_argument("sweep grid must be non-empty");
  }
  std::vector<SweepCell> cells;
  for (double r : r_s_values) {
    for (double p : phi_values) cells.push_back({r, p, {}});
  }
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    SimConfig cfg = base;
    cfg.strategy.kind = StrategyKind::pcrm;
    cfg.strategy.zone.r_s = cells[i].r_s;
    cfg.strategy.zone.phi = cells[i].phi;
    cells[i].report = run(cfg, workload).report;
  });
  return cells;
}

const SweepCell& argmax_ui(const std::vector<SweepCell>& cells) {
  if (cells.empty()) throw std::invalid_argument("no sweep cells");
  const SweepCell* best = &cells.front();
  for (const auto& c : cells) {
    if (c.report.ui > best->report.ui) best = &c;
  }
  return *best;
}

std::vector<StrategyRun> run_compare(const SimConfig& base,
                                     const std::vector<TripRequest>& workload,
                                     const std::vector<StrategyKind>& kinds, int jobs) {
  if (kinds.empty()) throw std::invalid_argument("no strategies to compare");
  std::vector<StrategyRun> runs;
  for (auto k : kinds) runs.push_back({k, {}});
  parallel_for(runs.size(), jobs, [&](std::size_t i) {
    SimConfig cfg = base;
    cfg.strategy.kind = runs[i].kind;
    runs[i].report = run(cfg, workload).report;
  });
  return runs;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("spearman needs two equal-length samples of size >= 2");
  }
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace pcrm
