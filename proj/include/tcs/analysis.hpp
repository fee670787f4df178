#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tcs/model.hpp"

namespace tcs {

/// Worst-case response bound. Empty when the fixed-point iteration passed
/// its cap (the stage is reported as diverged).
using Bound = std::optional<Duration>;

struct AnalyticVerdict {
    Bound end_to_end;
    Duration deadline;
    bool feasible = false;

    friend bool operator==(const AnalyticVerdict&, const AnalyticVerdict&) = default;
};

struct ResponseReport {
    std::map<StageId, Bound> per_stage;
    std::map<std::string, AnalyticVerdict> per_analytic;
    bool system_feasible = false;

    friend bool operator==(const ResponseReport&, const ResponseReport&) = default;
};

struct UtilizationSummary {
    Rational total{0};
    std::map<StageId, Rational> per_stage;
};

/// Least fixed point of R = B + C + sum_z ceil(R / T_z) * C_z, iterated from
/// R = B + C. A one-shot cotenant contributes its cost exactly once. The
/// caller passes only the interfering cotenants (same core, priority >= the
/// stage's). Returns nullopt once an iterate exceeds deadline_cap.
Bound stage_response_time(const Stage& stage, std::span<const Stage> cotenants, Duration deadline_cap);

/// Per-core RTA for every stage plus series-parallel end-to-end composition.
/// Every stage is iterated up to the longest end-to-end deadline in the
/// system, so a stage that misses its own deadline by less than that still
/// reports a finite response. Stages are solved in parallel when OpenMP is
/// enabled.
ResponseReport solve_system(const System& system, const Allocation& allocation, const Cluster& cluster);

/// Single-threaded reference for solve_system; results are identical.
ResponseReport solve_system_serial(const System& system, const Allocation& allocation,
                                   const Cluster& cluster);

/// Seq sums, Par takes the maximum. Throws MissingStage for an unknown leaf.
Duration end_to_end_response(const Composition& expr, const std::map<StageId, Duration>& per_stage);

UtilizationSummary total_utilization(const System& system);

/// Least m >= 1 with total < (m - 1/2) * u_max.
long long min_cores(const Rational& total, const Rational& u_max);

/// total utilization < (m - 1/2) * u_max, after verifying T + B = D on every
/// periodic stage and deadline-monotonic priorities. Throws
/// PreconditionViolated naming the offending stage otherwise.
bool check_utilization_bound(const System& system, long long m, const Rational& u_max);

/// Throws PreconditionViolated unless the system is in the T + B = D,
/// deadline-monotonic regime the utilization bound assumes.
void require_utilization_bound_regime(const System& system);

} // namespace tcs
