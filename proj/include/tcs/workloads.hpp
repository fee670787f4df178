#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "tcs/model.hpp"

namespace tcs {

enum class ScenarioId { microblog_online, microblog_offline, book_online, book_offline, table_vi };

std::string_view to_string(ScenarioId id);
std::optional<ScenarioId> scenario_from_string(std::string_view name);

enum class TableViPriorities {
    unassigned,
    general_purpose, ///< both analytics share one priority
    time_critical,   ///< the shorter deadline gets the higher priority
};

struct ScenarioParams {
    std::optional<Rational> frequency; ///< Hz; required by the online scenarios
    std::vector<Duration> costs;       ///< required by the offline scenarios (4 stages)
    long long splitter_hint = 1;       ///< number of round-robin splitters (online)
    std::optional<Duration> deadline;  ///< overrides the end-to-end deadline
    TableViPriorities table_vi = TableViPriorities::unassigned;
};

/// Per-stage worst-case costs measured for the online analytics:
/// generator, splitter/counter, aggregator.
inline const std::vector<Duration>& microblog_online_costs()
{
    static const std::vector<Duration> costs{Duration::us(127), Duration::us(507), Duration::us(511)};
    return costs;
}

inline const std::vector<Duration>& book_online_costs()
{
    static const std::vector<Duration> costs{Duration::us(1100), Duration::ms(5), Duration::us(800)};
    return costs;
}

/// Online scenarios are Seq(G, Par(S...), C) with explicit priorities
/// G > S > C; offline scenarios are one-shot Seq(download, map, reduce, sort);
/// TABLE_VI is two one-shot single-stage analytics of one hour each.
/// Throws MissingParam when a required parameter is absent.
System builtin_system(ScenarioId id, const ScenarioParams& params = {});

/// The cluster the scenario is usually analysed on: one full-capacity core.
Cluster builtin_cluster(ScenarioId id);

/// Single-analytic Seq of n stages whose utilizations are a uniform sample
/// of the simplex summing to u_target (UUniFast). Periods are log-uniform in
/// [t_min, t_max] and floored to whole nanoseconds; C = max(1, floor(u*T)),
/// D = T, B = 0. Priorities and cores are left unassigned.
System random_system(std::size_t n_stages, double u_target, std::pair<Duration, Duration> t_range,
                     std::uint64_t seed);

/// UUniFast utilization vector (exposed for distributional tests).
std::vector<double> uunifast(std::size_t n, double u_target, std::uint64_t seed);

} // namespace tcs
