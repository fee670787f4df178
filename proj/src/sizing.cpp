#include "tcs/sizing.hpp"

#include <algorithm>
#include <exception>
#include <set>

namespace tcs {

namespace {

void deadlines_follow_periods(System& system)
{
    for (auto& a : system.analytics)
        for (auto& s : a.stages)
            if (!s.one_shot())
                s.deadline = s.inter_arrival + s.blocking;
}

SweepRow sweep_row(const System& topology_template, const Rational& hz, const Rational& u_max, long long k_max)
{
    const System retimed = retime(topology_template, hz);
    System replicated = replicate_system_for_rate(retimed, k_max);
    deadlines_follow_periods(replicated);

    SweepRow row;
    row.frequency = hz;
    row.total_utilization = total_utilization(replicated).total;
    row.min_cores = min_cores(row.total_utilization, u_max);
    // k replicas of C every k*T carry exactly C/T between them.
    retimed.for_each_stage(
        [&](const Analytic&, const Stage& s) { row.per_stage_utilization[s.id] = s.utilization(); });
    return row;
}

bool all_have_priorities(const System& system)
{
    bool all = true;
    system.for_each_stage([&](const Analytic&, const Stage& s) { all = all && s.priority.has_value(); });
    return all;
}

bool all_have_cores(const System& system)
{
    bool all = true;
    system.for_each_stage([&](const Analytic&, const Stage& s) { all = all && s.core.has_value(); });
    return all;
}

const Analytic* owner_of(const System& system, const StageId& id)
{
    for (const auto& a : system.analytics)
        if (a.find(id) != nullptr)
            return &a;
    return nullptr;
}

} // namespace

System retime(const System& system, const Rational& hz)
{
    const Duration period = period_from_frequency(hz);
    System out = system;
    for (auto& a : out.analytics)
        for (auto& s : a.stages)
            if (!s.one_shot())
                s.inter_arrival = period;
    return out;
}

StageId default_aggregator(const System& system)
{
    if (system.analytics.empty())
        throw PreconditionViolated("system has no analytics");
    const auto leaves = system.analytics.front().topology.leaves();
    if (leaves.empty())
        throw PreconditionViolated("first analytic has an empty topology");
    return leaves.back();
}

std::vector<SweepRow> frequency_sweep(const System& topology_template, const std::vector<Rational>& frequencies,
                                      const Rational& u_max, long long k_max)
{
    std::vector<SweepRow> rows(frequencies.size());
    std::vector<std::exception_ptr> errors(frequencies.size());
    const auto n = static_cast<long>(frequencies.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            rows[idx] = sweep_row(topology_template, frequencies[idx], u_max, k_max);
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return rows;
}

std::vector<SweepRow> frequency_sweep_serial(const System& topology_template,
                                             const std::vector<Rational>& frequencies, const Rational& u_max,
                                             long long k_max)
{
    std::vector<SweepRow> rows;
    rows.reserve(frequencies.size());
    for (const auto& hz : frequencies)
        rows.push_back(sweep_row(topology_template, hz, u_max, k_max));
    return rows;
}

std::vector<DecimationRow> decimation_sweep(const System& topology, const Rational& input_frequency,
                                            const std::vector<long long>& factors, const Rational& u_max,
                                            const std::optional<StageId>& aggregator)
{
    const StageId agg_id = aggregator ? *aggregator : default_aggregator(topology);
    if (topology.find(agg_id) == nullptr)
        throw PreconditionViolated("unknown aggregator stage " + agg_id);
    for (long long f : factors)
        if (f < 1)
            throw PreconditionViolated("decimation factors must be >= 1");

    const Duration input_period = period_from_frequency(input_frequency);
    System base = retime(topology, input_frequency);
    deadlines_follow_periods(base);
    if (base.find(agg_id)->one_shot())
        throw PreconditionViolated("aggregator " + agg_id + " is one-shot");

    // Deployment of the undecimated system, held fixed across factors.
    if (!all_have_priorities(base))
        apply_priorities(base, assign_priorities_dm(base));
    const Rational base_total = total_utilization(base).total;
    const long long base_cores = min_cores(base_total, u_max);

    Cluster cluster;
    Allocation allocation;
    if (all_have_cores(base)) {
        allocation = allocation_of(base);
        std::set<CoreId> ids;
        for (const auto& [stage, core] : allocation)
            ids.insert(core);
        for (const auto& id : ids)
            cluster.cores.push_back(Core{id, u_max, Duration::zero()});
    } else {
        // The utilization bound does not guarantee a first-fit packing; grow
        // the cluster until one exists.
        const auto limit = static_cast<long long>(std::max<std::size_t>(base.stage_count(), 1));
        for (long long m = base_cores;; ++m) {
            cluster = Cluster::uniform(static_cast<std::size_t>(m), u_max);
            try {
                allocation = allocate_first_fit(base, cluster);
                break;
            } catch (const AllocationFailed&) {
                if (m >= std::max(limit, base_cores))
                    throw;
            }
        }
    }

    const std::string owner = owner_of(base, agg_id)->id;
    std::vector<DecimationRow> rows;
    rows.reserve(factors.size());
    for (long long f : factors) {
        System decimated = base;
        Stage* agg = decimated.find(agg_id);
        agg->inter_arrival = input_period * f;
        agg->deadline = agg->inter_arrival + agg->blocking;

        const ResponseReport report = solve_system(decimated, allocation, cluster);
        DecimationRow row;
        row.factor = f;
        if (const Bound& e2e = report.per_analytic.at(owner).end_to_end) {
            try {
                // The first input of a batch waits for F - 1 more arrivals.
                row.end_to_end = *e2e + input_period * (f - 1);
            } catch (const OverflowError&) {
                row.end_to_end.reset();
            }
        }
        row.aggregator_utilization = agg->utilization();
        row.cores_saved = base_cores - min_cores(total_utilization(decimated).total, u_max);
        rows.push_back(std::move(row));
    }
    return rows;
}

BaselineComparison baseline_comparison(const System& system, const Rational& u_max)
{
    require_utilization_bound_regime(system);
    Rational ours(0);
    Rational charged(0);
    system.for_each_stage([&](const Analytic&, const Stage& s) {
        ours += s.utilization();
        if (!s.one_shot())
            charged += utilization(s.cost + s.blocking, s.inter_arrival);
    });
    return {min_cores(ours, u_max), min_cores(charged, u_max)};
}

} // namespace tcs
