#pragma once

// Test-only reference computations. None of these call into the analysis
// or simulator code they are used to check.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tcs/model.hpp"

namespace tcs::oracle {

struct PeriodicTask {
    std::string id;
    std::int64_t cost;
    std::int64_t period; // 0: one-shot
    std::int64_t priority;
};

/// Unit-step simulation of one preemptive fixed-priority core with every
/// task released at t = 0 and then periodically. Equal priorities run FIFO
/// by release time, then id. Returns the worst response per task over all
/// jobs released before `horizon` (time measured in ticks).
std::map<std::string, std::int64_t> tick_simulation(const std::vector<PeriodicTask>& tasks, std::int64_t horizon);

/// Longest path through the DAG a series-parallel expression induces,
/// weighting each node by its response time.
std::int64_t dag_longest_path(const Composition& expr, const std::map<StageId, std::int64_t>& weights);

/// Linear search for the least m >= 1 with total < (m - 1/2) * u_max.
long long min_cores_by_search(const Rational& total, const Rational& u_max);

/// True iff every pair of stages is ordered by (deadline, id), higher
/// priority first, in `priorities`.
bool dm_order_holds_pairwise(const System& system, const std::map<StageId, long long>& priorities);

} // namespace tcs::oracle
