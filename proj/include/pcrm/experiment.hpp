#pragma once

#include <functional>
#include <vector>

#include "pcrm/io.hpp"
#include "pcrm/sim.hpp"

namespace pcrm {

/// Calls fn(0..count-1) on up to `jobs` worker threads.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

/// One PCRM run per (R_s, phi) cell on a shared workload and fleet seed.
/// Cells come back in row-major order (R_s outer, phi inner).
std::vector<SweepCell> run_sweep(const SimConfig& base, const std::vector<TripRequest>& workload,
                                 const std::vector<double>& r_s_values,
                                 const std::vector<double>& phi_values, int jobs = 1);

/// Cell with the largest UI; the first one wins ties.
const SweepCell& argmax_ui(const std::vector<SweepCell>& cells);

/// Each strategy on the same workload, fleet and seed.
std::vector<StrategyRun> run_compare(const SimConfig& base,
                                     const std::vector<TripRequest>& workload,
                                     const std::vector<StrategyKind>& kinds, int jobs = 1);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pcrm
