#include "tcs/analysis.hpp"

#include <algorithm>

namespace tcs {

namespace {

struct Interferer {
    Duration::rep cost;
    Duration::rep period; // <= 0 encodes one-shot
};

// Fixed-point iteration on raw nanosecond counts; nullopt past the cap.
Bound iterate_response(Duration::rep blocking, Duration::rep cost, std::span<const Interferer> hp,
                       Duration::rep cap)
{
    Duration::rep base = 0;
    if (!try_add(blocking, cost, base) || base > cap)
        return std::nullopt;
    // Periodic interference of utilization >= 1 outgrows any iterate.
    Rational load(0);
    for (const auto& z : hp)
        if (z.period > 0)
            load += utilization(Duration(z.cost), Duration(z.period));
    if (load >= 1)
        return std::nullopt;
    Duration::rep r = base;
    for (;;) {
        Duration::rep next = base;
        for (const auto& z : hp) {
            Duration::rep term = z.cost;
            if (z.period > 0 && !try_mul(ceil_div(r, z.period), z.cost, term))
                return std::nullopt;
            if (!try_add(next, term, next) || next > cap)
                return std::nullopt;
        }
        if (next == r)
            return Duration(r);
        r = next;
    }
}

Interferer as_interferer(const Stage& s)
{
    return {s.cost.count(), s.one_shot() ? Duration::rep{0} : s.inter_arrival.count()};
}

struct StageJob {
    const Stage* stage;
    Duration blocking;
    Duration cap;
    std::vector<Interferer> hp;
};

std::vector<StageJob> prepare(const System& system, const Allocation& allocation, const Cluster& cluster)
{
    std::map<CoreId, std::vector<const Stage*>> by_core;
    std::vector<StageJob> jobs;
    // Iterates may run past a stage's own deadline up to the longest
    // end-to-end deadline in the system, so late stages still get a value.
    Duration cap = Duration::zero();
    for (const auto& a : system.analytics)
        cap = std::max(cap, a.end_to_end_deadline);
    jobs.reserve(system.stage_count());

    for (const auto& a : system.analytics) {
        for (const auto& s : a.stages) {
            auto it = allocation.find(s.id);
            if (it == allocation.end())
                throw InvalidAllocation("stage " + s.id + " has no core");
            const Core* core = cluster.find(it->second);
            if (core == nullptr)
                throw InvalidAllocation("stage " + s.id + " is allocated to unknown core " + it->second);
            if (!s.priority)
                throw PreconditionViolated("stage " + s.id + " has no priority");
            by_core[core->id].push_back(&s);
            jobs.push_back({&s, effective_blocking(s, core), cap, {}});
        }
    }

    for (auto& job : jobs) {
        const auto& mates = by_core[allocation.at(job.stage->id)];
        for (const Stage* other : mates)
            if (other != job.stage && *other->priority >= *job.stage->priority)
                job.hp.push_back(as_interferer(*other));
    }
    return jobs;
}

Bound solve_one(const StageJob& job)
{
    return iterate_response(job.blocking.count(), job.stage->cost.count(), job.hp, job.cap.count());
}

ResponseReport assemble(const System& system, const std::vector<StageJob>& jobs, const std::vector<Bound>& bounds)
{
    ResponseReport report;
    for (std::size_t i = 0; i < jobs.size(); ++i)
        report.per_stage[jobs[i].stage->id] = bounds[i];

    report.system_feasible = true;
    for (const auto& a : system.analytics) {
        AnalyticVerdict verdict;
        verdict.deadline = a.end_to_end_deadline;
        std::map<StageId, Duration> finite;
        bool diverged = false;
        for (const auto& s : a.stages) {
            const Bound& b = report.per_stage.at(s.id);
            if (!b)
                diverged = true;
            else
                finite.emplace(s.id, *b);
        }
        if (!diverged) {
            try {
                verdict.end_to_end = end_to_end_response(a.topology, finite);
            } catch (const OverflowError&) {
                verdict.end_to_end.reset();
            }
        }
        verdict.feasible = verdict.end_to_end && *verdict.end_to_end <= a.end_to_end_deadline;
        report.system_feasible = report.system_feasible && verdict.feasible;
        report.per_analytic[a.id] = verdict;
    }
    return report;
}

} // namespace

Bound stage_response_time(const Stage& stage, std::span<const Stage> cotenants, Duration deadline_cap)
{
    std::vector<Interferer> hp;
    hp.reserve(cotenants.size());
    for (const auto& z : cotenants)
        hp.push_back(as_interferer(z));
    return iterate_response(stage.blocking.count(), stage.cost.count(), hp, deadline_cap.count());
}

ResponseReport solve_system(const System& system, const Allocation& allocation, const Cluster& cluster)
{
    const auto jobs = prepare(system, allocation, cluster);
    std::vector<Bound> bounds(jobs.size());
    const auto n = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i)
        bounds[static_cast<std::size_t>(i)] = solve_one(jobs[static_cast<std::size_t>(i)]);
    return assemble(system, jobs, bounds);
}

ResponseReport solve_system_serial(const System& system, const Allocation& allocation, const Cluster& cluster)
{
    const auto jobs = prepare(system, allocation, cluster);
    std::vector<Bound> bounds;
    bounds.reserve(jobs.size());
    for (const auto& job : jobs)
        bounds.push_back(solve_one(job));
    return assemble(system, jobs, bounds);
}

Duration end_to_end_response(const Composition& expr, const std::map<StageId, Duration>& per_stage)
{
    switch (expr.kind()) {
    case Composition::Kind::leaf: {
        auto it = per_stage.find(expr.stage());
        if (it == per_stage.end())
            throw MissingStage(expr.stage());
        return it->second;
    }
    case Composition::Kind::seq: {
        Duration sum = Duration::zero();
        for (const auto& child : expr.children())
            sum += end_to_end_response(child, per_stage);
        return sum;
    }
    case Composition::Kind::par: {
        Duration worst = Duration::zero();
        for (const auto& child : expr.children())
            worst = std::max(worst, end_to_end_response(child, per_stage));
        return worst;
    }
    }
    return Duration::zero();
}

UtilizationSummary total_utilization(const System& system)
{
    UtilizationSummary out;
    system.for_each_stage([&](const Analytic&, const Stage& s) {
        Rational u = s.utilization();
        out.total += u;
        out.per_stage[s.id] = std::move(u);
    });
    return out;
}

long long min_cores(const Rational& total, const Rational& u_max)
{
    if (u_max <= 0 || u_max > 1)
        throw PreconditionViolated("u_max must lie in (0, 1]");
    if (total < 0)
        throw PreconditionViolated("total utilization must be non-negative");
    // total < (m - 1/2) u_max  <=>  m > total / u_max + 1/2
    const Rational threshold = total / u_max + ratio(1, 2);
    return floor_to_int(threshold) + 1;
}

void require_utilization_bound_regime(const System& system)
{
    std::vector<const Stage*> stages;
    system.for_each_stage([&](const Analytic&, const Stage& s) {
        if (!s.priority)
            throw PreconditionViolated("stage " + s.id + " has no priority");
        if (!s.one_shot()) {
            Duration::rep sum = 0;
            if (!try_add(s.inter_arrival.count(), s.blocking.count(), sum) || sum != s.deadline.count())
                throw PreconditionViolated("stage " + s.id + " violates T + B = D");
        }
        stages.push_back(&s);
    });

    // Deadline-monotonic: a strictly shorter deadline needs a strictly higher
    // priority. Sorted by deadline, each stage must sit strictly below the
    // lowest priority seen among strictly shorter deadlines.
    std::sort(stages.begin(), stages.end(),
              [](const Stage* a, const Stage* b) { return a->deadline < b->deadline; });
    std::optional<Priority> floor_of_shorter;
    std::size_t i = 0;
    while (i < stages.size()) {
        std::size_t j = i;
        Priority group_min = *stages[i]->priority;
        while (j < stages.size() && stages[j]->deadline == stages[i]->deadline) {
            if (floor_of_shorter && *stages[j]->priority >= *floor_of_shorter)
                throw PreconditionViolated("stage " + stages[j]->id +
                                           " breaks deadline-monotonic priority order");
            group_min = std::min(group_min, *stages[j]->priority);
            ++j;
        }
        floor_of_shorter = floor_of_shorter ? std::min(*floor_of_shorter, group_min) : group_min;
        i = j;
    }
}

bool check_utilization_bound(const System& system, long long m, const Rational& u_max)
{
    if (m < 1)
        throw PreconditionViolated("core count must be positive");
    if (u_max <= 0 || u_max > 1)
        throw PreconditionViolated("u_max must lie in (0, 1]");
    require_utilization_bound_regime(system);
    return total_utilization(system).total < (Rational(static_cast<long>(m)) - ratio(1, 2)) * u_max;
}

} // namespace tcs
