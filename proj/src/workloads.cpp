#include "tcs/workloads.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace tcs {

namespace {

constexpr std::array<std::pair<ScenarioId, std::string_view>, 5> kNames{{
    {ScenarioId::microblog_online, "microblog-online"},
    {ScenarioId::microblog_offline, "microblog-offline"},
    {ScenarioId::book_online, "book-online"},
    {ScenarioId::book_offline, "book-offline"},
    {ScenarioId::table_vi, "table-vi"},
}};

// 53 random bits mapped to [0, 1).
double unit(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<double> uunifast(std::size_t n, double u_target, std::mt19937_64& rng)
{
    std::vector<double> out;
    out.reserve(n);
    double remaining = u_target;
    for (std::size_t i = 1; i < n; ++i) {
        const double next = remaining * std::pow(unit(rng), 1.0 / static_cast<double>(n - i));
        out.push_back(remaining - next);
        remaining = next;
    }
    if (n > 0)
        out.push_back(remaining);
    return out;
}

System online(std::string id, const std::vector<Duration>& costs, const ScenarioParams& params)
{
    if (!params.frequency)
        throw MissingParam("scenario " + id + " needs an input frequency");
    if (params.splitter_hint < 1)
        throw MissingParam("splitter hint must be at least 1");
    const auto& c = params.costs.empty() ? costs : params.costs;
    if (c.size() != 3)
        throw MissingParam("scenario " + id + " takes exactly 3 stage costs");

    const Duration period = period_from_frequency(*params.frequency);
    Analytic a;
    a.id = std::move(id);
    a.end_to_end_deadline = params.deadline.value_or(Duration::s(1));

    auto stage = [](StageId sid, Duration cost, Duration t, Priority p) {
        return Stage{std::move(sid), cost, t, t, Duration::zero(), p, std::nullopt};
    };
    a.stages.push_back(stage("G", c[0], period, 3));
    std::vector<Composition> splitters;
    if (params.splitter_hint == 1) {
        a.stages.push_back(stage("S", c[1], period, 2));
        splitters.push_back(Composition::leaf("S"));
    } else {
        // Each of h splitters takes every h-th item.
        const Duration split_period = period * params.splitter_hint;
        for (long long i = 0; i < params.splitter_hint; ++i) {
            const std::string sid = "S" + std::to_string(i);
            a.stages.push_back(stage(sid, c[1], split_period, 2));
            splitters.push_back(Composition::leaf(sid));
        }
    }
    a.stages.push_back(stage("C", c[2], period, 1));
    a.topology = Composition::seq(
        {Composition::leaf("G"), Composition::par(std::move(splitters)), Composition::leaf("C")});
    return System{{std::move(a)}};
}

System offline(std::string id, Duration default_deadline, const ScenarioParams& params)
{
    if (params.costs.size() != 4)
        throw MissingParam("scenario " + id + " needs 4 stage costs (download, map, reduce, sort)");
    Analytic a;
    a.id = std::move(id);
    a.end_to_end_deadline = params.deadline.value_or(default_deadline);
    static constexpr std::array<std::string_view, 4> names{"download", "map", "reduce", "sort"};
    std::vector<Composition> chain;
    for (std::size_t i = 0; i < names.size(); ++i) {
        a.stages.push_back(Stage{std::string(names[i]), params.costs[i], Duration::infinite(),
                                 a.end_to_end_deadline, Duration::zero(), std::nullopt, std::nullopt});
        chain.push_back(Composition::leaf(std::string(names[i])));
    }
    a.topology = Composition::seq(std::move(chain));
    return System{{std::move(a)}};
}

System table_vi(const ScenarioParams& params)
{
    auto analytic = [](std::string id, Duration deadline, std::optional<Priority> p) {
        Analytic a;
        a.id = id;
        a.end_to_end_deadline = deadline;
        a.stages.push_back(Stage{id, Duration::h(1), Duration::infinite(), deadline, Duration::zero(), p,
                                 std::nullopt});
        a.topology = Composition::leaf(id);
        return a;
    };
    std::optional<Priority> tc1;
    std::optional<Priority> tc2;
    switch (params.table_vi) {
    case TableViPriorities::unassigned: break;
    case TableViPriorities::general_purpose: tc1 = tc2 = 1; break;
    case TableViPriorities::time_critical:
        tc1 = 1;
        tc2 = 2;
        break;
    }
    return System{{analytic("TC1", Duration::h(2), tc1), analytic("TC2", Duration::h(1), tc2)}};
}

} // namespace

std::string_view to_string(ScenarioId id)
{
    for (const auto& [sid, name] : kNames)
        if (sid == id)
            return name;
    return "?";
}

std::optional<ScenarioId> scenario_from_string(std::string_view name)
{
    for (const auto& [sid, n] : kNames)
        if (n == name)
            return sid;
    return std::nullopt;
}

System builtin_system(ScenarioId id, const ScenarioParams& params)
{
    switch (id) {
    case ScenarioId::microblog_online: return online("microblog-online", microblog_online_costs(), params);
    case ScenarioId::book_online: return online("book-online", book_online_costs(), params);
    case ScenarioId::microblog_offline: return offline("microblog-offline", Duration::h(2), params);
    case ScenarioId::book_offline: return offline("book-offline", Duration::min(10), params);
    case ScenarioId::table_vi: return table_vi(params);
    }
    throw MissingParam("unknown scenario");
}

Cluster builtin_cluster(ScenarioId)
{
    return Cluster::uniform(1, Rational(1));
}

std::vector<double> uunifast(std::size_t n, double u_target, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return uunifast(n, u_target, rng);
}

System random_system(std::size_t n_stages, double u_target, std::pair<Duration, Duration> t_range,
                     std::uint64_t seed)
{
    if (n_stages == 0)
        throw PreconditionViolated("random_system needs at least one stage");
    if (!(u_target > 0.0) || u_target > static_cast<double>(n_stages))
        throw PreconditionViolated("target utilization must lie in (0, n]");
    const auto [t_min, t_max] = t_range;
    if (t_min.is_infinite() || t_max.is_infinite() || t_min.count() <= 0 || t_max < t_min)
        throw PreconditionViolated("period range must be a finite positive interval");

    std::mt19937_64 rng(seed);
    const auto utils = uunifast(n_stages, u_target, rng);
    const double lo = std::log(static_cast<double>(t_min.count()));
    const double hi = std::log(static_cast<double>(t_max.count()));

    Analytic a;
    a.id = "A0";
    Duration total_deadline = Duration::zero();
    std::vector<Composition> chain;
    for (std::size_t i = 0; i < n_stages; ++i) {
        auto period = static_cast<Duration::rep>(std::floor(std::exp(lo + unit(rng) * (hi - lo))));
        period = std::clamp(period, t_min.count(), t_max.count());
        const auto cost = std::max<Duration::rep>(
            1, static_cast<Duration::rep>(std::floor(utils[i] * static_cast<double>(period))));
        const std::string id = "s" + std::to_string(i);
        a.stages.push_back(Stage{id, Duration(cost), Duration(period), Duration(period), Duration::zero(),
                                 std::nullopt, std::nullopt});
        chain.push_back(Composition::leaf(id));
        total_deadline += Duration(period);
    }
    a.end_to_end_deadline = total_deadline;
    a.topology = Composition::seq(std::move(chain));
    return System{{std::move(a)}};
}

} // namespace tcs
