#include "doctest.h"

#include <random>

#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "tcs/analysis.hpp"
#include "tcs/workloads.hpp"

using namespace tcs;

namespace {

Stage task(StageId id, Duration c, Duration t, Duration b = Duration::zero())
{
    return Stage{std::move(id), c, t, t, b, std::nullopt, std::nullopt};
}

Duration rhs(const Stage& s, const std::vector<Stage>& hp, Duration r)
{
    Duration sum = s.blocking + s.cost;
    for (const auto& z : hp)
        sum += z.one_shot() ? z.cost : z.cost * ceil_div(r.count(), z.inter_arrival.count());
    return sum;
}

System on_one_core(System sys)
{
    for (auto& a : sys.analytics)
        for (auto& s : a.stages)
            s.core = "core0";
    return sys;
}

ResponseReport solve(const System& sys, const Cluster& cluster = Cluster::uniform(1, Rational(1)))
{
    return solve_system(sys, allocation_of(sys), cluster);
}

} // namespace

TEST_CASE("stage response time examples")
{
    const Duration cap = Duration::s(10);
    CHECK(stage_response_time(task("s", Duration::us(100), Duration::s(1)), {}, cap) == Duration::us(100));

    const std::vector<Stage> hp{task("z", Duration::ms(2), Duration::ms(5))};
    CHECK(stage_response_time(task("s", Duration::ms(3), Duration::ms(15)), hp, cap) == Duration::ms(5));
    CHECK(stage_response_time(task("s", Duration::ms(3), Duration::ms(15), Duration::ms(1)), hp, cap) ==
          Duration::ms(8));

    const std::vector<Stage> one_shot{task("z", Duration::h(1), Duration::infinite())};
    CHECK(stage_response_time(task("s", Duration::h(1), Duration::infinite()), one_shot, Duration::h(3)) ==
          Duration::h(2));
}

TEST_CASE("two-task example matches the tick oracle")
{
    const auto worst = oracle::tick_simulation({{"hp", 2, 5, 2}, {"lp", 3, 15, 1}}, 15);
    CHECK(worst.at("lp") == 5);
    CHECK(worst.at("hp") == 2);
}

TEST_CASE("iteration stops past the cap")
{
    const std::vector<Stage> hp{task("z", Duration::ms(3), Duration::ms(5))};
    CHECK(stage_response_time(task("s", Duration::ms(3), Duration::ms(10)), hp, Duration::ms(10)) == Duration::ms(9));
    CHECK_FALSE(stage_response_time(task("s", Duration::ms(3), Duration::ms(10)), hp, Duration::ms(8)));
    // Exactly reaching the cap is fine.
    CHECK(stage_response_time(task("s", Duration::ms(2), Duration::ms(10)), hp, Duration::ms(5)) == Duration::ms(5));
}

TEST_CASE("Table VI configurations")
{
    SUBCASE("general purpose")
    {
        ScenarioParams p;
        p.table_vi = TableViPriorities::general_purpose;
        const auto r = solve(on_one_core(builtin_system(ScenarioId::table_vi, p)));
        CHECK(r.per_stage.at("TC1") == Duration::h(2));
        CHECK(r.per_stage.at("TC2") == Duration::h(2));
        CHECK(r.per_analytic.at("TC1").feasible);
        CHECK_FALSE(r.per_analytic.at("TC2").feasible);
        CHECK_FALSE(r.system_feasible);
    }
    SUBCASE("time critical")
    {
        ScenarioParams p;
        p.table_vi = TableViPriorities::time_critical;
        const auto r = solve(on_one_core(builtin_system(ScenarioId::table_vi, p)));
        CHECK(r.per_stage.at("TC2") == Duration::h(1));
        CHECK(r.per_stage.at("TC1") == Duration::h(2));
        CHECK(r.system_feasible);
    }
}

TEST_CASE("microblog at 1 Hz on one core")
{
    ScenarioParams p;
    p.frequency = Rational(1);
    const auto sys = on_one_core(builtin_system(ScenarioId::microblog_online, p));
    const auto r = solve(sys);
    CHECK(r.per_stage.at("G") == Duration::us(127));
    CHECK(r.per_stage.at("S") == Duration::us(634));
    CHECK(r.per_stage.at("C") == Duration::us(1145));
    const auto& v = r.per_analytic.at("microblog-online");
    CHECK(v.end_to_end == Duration::us(1906));
    CHECK(v.feasible);
    const std::map<StageId, std::int64_t> w{{"G", 127'000}, {"S", 634'000}, {"C", 1'145'000}};
    CHECK(oracle::dag_longest_path(sys.analytics[0].topology, w) == 1'906'000);
}

TEST_CASE("series-parallel composition")
{
    const std::map<StageId, Duration> rt{{"a", Duration::ms(3)}, {"b", Duration::ms(5)}, {"s", Duration::ms(5)},
                                         {"G", Duration::ms(1)}, {"S1", Duration::ms(2)}, {"S2", Duration::ms(3)},
                                         {"C", Duration::ms(4)}};
    using C = Composition;
    CHECK(end_to_end_response(C::leaf("s"), rt) == Duration::ms(5));
    CHECK(end_to_end_response(C::seq({C::leaf("a"), C::leaf("b")}), rt) == Duration::ms(8));
    CHECK(end_to_end_response(C::par({C::leaf("a"), C::leaf("b")}), rt) == Duration::ms(5));
    const auto pipeline = C::seq({C::leaf("G"), C::par({C::leaf("S1"), C::leaf("S2")}), C::leaf("C")});
    CHECK(end_to_end_response(pipeline, rt) == Duration::ms(8));
    CHECK_THROWS_AS(end_to_end_response(C::leaf("missing"), rt), MissingStage);
}

TEST_CASE("composition agrees with the DAG oracle")
{
    std::mt19937_64 rng(11);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto d = gen::pipelines(seed);
        for (const auto& a : d.system.analytics) {
            std::map<StageId, Duration> rt;
            std::map<StageId, std::int64_t> w;
            for (const auto& s : a.stages) {
                const auto v = static_cast<std::int64_t>(rng() % 1000);
                rt[s.id] = Duration(v);
                w[s.id] = v;
            }
            const auto e2e = end_to_end_response(a.topology, rt);
            CHECK(e2e.count() == oracle::dag_longest_path(a.topology, w));
            for (const auto& [id, r] : rt)
                CHECK(e2e >= r);
            CHECK(end_to_end_response(Composition::seq({a.topology}), rt) == e2e);
            CHECK(end_to_end_response(Composition::par({a.topology, a.topology}), rt) == e2e);
        }
    }
}

TEST_CASE("utilization totals")
{
    CHECK(total_utilization(System{}).total == 0);
    ScenarioParams p;
    p.frequency = Rational(4000);
    CHECK(total_utilization(builtin_system(ScenarioId::microblog_online, p)).total == ratio(229, 50));
    CHECK(total_utilization(builtin_system(ScenarioId::table_vi)).total == 0);
}

TEST_CASE("minimum cores")
{
    CHECK(min_cores(Rational(0), Rational(1)) == 1);
    CHECK(min_cores(ratio(229, 50), Rational(1)) == 6);
    CHECK(min_cores(ratio(1, 2), Rational(1)) == 2);
    for (int num = 0; num < 400; num += 7)
        for (int den : {1, 2, 3, 4, 10}) {
            const Rational u(num, 37);
            const Rational cap(den, 10);
            if (cap > 1)
                continue;
            CHECK(min_cores(u, cap) == oracle::min_cores_by_search(u, cap));
        }
    CHECK_THROWS_AS(min_cores(Rational(1), Rational(0)), PreconditionViolated);
    CHECK_THROWS_AS(min_cores(Rational(1), Rational(2)), PreconditionViolated);
}

TEST_CASE("minimum cores is monotone and tight")
{
    for (int a = 0; a < 60; ++a) {
        const Rational u(a, 7);
        CHECK(min_cores(u, Rational(1)) <= min_cores(u + ratio(1, 13), Rational(1)));
        CHECK(min_cores(u, ratio(9, 10)) >= min_cores(u, Rational(1)));
    }
    ScenarioParams p;
    p.frequency = Rational(4000);
    auto sys = builtin_system(ScenarioId::microblog_online, p);
    apply_priorities(sys, assign_priorities_dm(sys));
    for (int a = 1; a < 40; ++a) {
        // Scale the generator cost to sweep utilization.
        sys.analytics[0].stages[0].cost = Duration::us(127 + 37 * a);
        const Rational u = total_utilization(sys).total;
        const long long m = min_cores(u, Rational(1));
        CHECK(check_utilization_bound(sys, m, Rational(1)));
        if (m >= 2)
            CHECK_FALSE(check_utilization_bound(sys, m - 1, Rational(1)));
    }
}

TEST_CASE("utilization bound check")
{
    ScenarioParams p;
    p.frequency = Rational(4000);
    const auto sys = builtin_system(ScenarioId::microblog_online, p);
    CHECK(check_utilization_bound(sys, 6, Rational(1)));
    CHECK_FALSE(check_utilization_bound(sys, 5, Rational(1)));

    Analytic a;
    a.id = "A";
    a.stages = {Stage{"s", Duration::ms(1), Duration::ms(10), Duration::ms(9), Duration::zero(), 1, std::nullopt}};
    a.topology = Composition::leaf("s");
    a.end_to_end_deadline = Duration::ms(10);
    CHECK_THROWS_AS(check_utilization_bound(System{{a}}, 1, Rational(1)), PreconditionViolated);

    auto inverted = builtin_system(ScenarioId::microblog_online, p);
    inverted.analytics[0].stages[0].deadline = Duration::us(100);
    inverted.analytics[0].stages[0].inter_arrival = Duration::us(100);
    inverted.analytics[0].stages[0].priority = 1;
    CHECK_THROWS_AS(check_utilization_bound(inverted, 6, Rational(1)), PreconditionViolated);
}

TEST_CASE("response times are exact fixed points")
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        const auto n = 1 + rng() % 5;
        std::vector<Stage> hp;
        for (std::size_t k = 0; k < n; ++k) {
            const auto t = static_cast<Duration::rep>(10 + rng() % 1000);
            hp.push_back(task("z" + std::to_string(k), Duration(1 + static_cast<Duration::rep>(rng() % (t / 4 + 1))),
                              rng() % 5 == 0 ? Duration::infinite() : Duration(t)));
        }
        const auto s = task("s", Duration(1 + static_cast<Duration::rep>(rng() % 200)), Duration(1000),
                            Duration(static_cast<Duration::rep>(rng() % 50)));
        const auto r = stage_response_time(s, hp, Duration(100'000));
        if (r)
            CHECK(rhs(s, hp, *r) == *r);
    }
}

TEST_CASE("response times are monotone")
{
    std::mt19937_64 rng(5);
    const Duration cap(1'000'000);
    for (int i = 0; i < 1000; ++i) {
        std::vector<Stage> hp;
        for (int k = 0; k < 3; ++k) {
            const auto t = static_cast<Duration::rep>(50 + rng() % 500);
            hp.push_back(task("z" + std::to_string(k), Duration(1 + static_cast<Duration::rep>(rng() % (t / 5))),
                              Duration(t)));
        }
        auto s = task("s", Duration(1 + static_cast<Duration::rep>(rng() % 100)), Duration(1000),
                      Duration(static_cast<Duration::rep>(rng() % 20)));
        const auto base = stage_response_time(s, hp, cap);
        auto le = [&](const Bound& a, const Bound& b) { return !b || (a && *a <= *b); };

        auto more_cost = s;
        more_cost.cost += Duration(1 + static_cast<Duration::rep>(rng() % 10));
        CHECK(le(base, stage_response_time(more_cost, hp, cap)));

        auto more_block = s;
        more_block.blocking += Duration(1 + static_cast<Duration::rep>(rng() % 10));
        CHECK(le(base, stage_response_time(more_block, hp, cap)));

        auto heavier = hp;
        heavier[rng() % 3].cost += Duration(1);
        CHECK(le(base, stage_response_time(s, heavier, cap)));

        auto faster = hp;
        auto& z = faster[rng() % 3];
        if (z.inter_arrival.count() > z.cost.count() + 1)
            z.inter_arrival = Duration(z.inter_arrival.count() - 1);
        CHECK(le(base, stage_response_time(s, faster, cap)));

        auto extra = hp;
        extra.push_back(task("extra", Duration(3), Duration(400)));
        CHECK(le(base, stage_response_time(s, extra, cap)));
    }
}

TEST_CASE("equal priorities interfere both ways")
{
    Analytic a;
    a.id = "A";
    a.stages = {Stage{"x", Duration::ms(2), Duration::ms(10), Duration::ms(10), Duration::zero(), 1, "core0"},
                Stage{"y", Duration::ms(3), Duration::ms(10), Duration::ms(10), Duration::zero(), 1, "core0"}};
    a.topology = Composition::par({Composition::leaf("x"), Composition::leaf("y")});
    a.end_to_end_deadline = Duration::ms(10);
    const auto r = solve(System{{a}});
    CHECK(r.per_stage.at("x") == Duration::ms(5));
    CHECK(r.per_stage.at("y") == Duration::ms(5));
}

TEST_CASE("platform blocking enters through the host core")
{
    Analytic a;
    a.id = "A";
    a.stages = {Stage{"x", Duration::ms(2), Duration::ms(10), Duration::ms(10), Duration::ms(1), 1, "core0"}};
    a.topology = Composition::leaf("x");
    a.end_to_end_deadline = Duration::ms(10);
    CHECK(solve(System{{a}}, Cluster::uniform(1, Rational(1), Duration::ms(4))).per_stage.at("x") == Duration::ms(6));
}

TEST_CASE("allocation errors")
{
    ScenarioParams p;
    p.frequency = Rational(1);
    const auto sys = builtin_system(ScenarioId::microblog_online, p);
    CHECK_THROWS_AS(solve_system(sys, {}, Cluster::uniform(1, Rational(1))), InvalidAllocation);
    Allocation bad{{"G", "core9"}, {"S", "core0"}, {"C", "core0"}};
    CHECK_THROWS_AS(solve_system(sys, bad, Cluster::uniform(1, Rational(1))), InvalidAllocation);
}

TEST_CASE("parallel and serial solvers agree")
{
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto d = gen::pipelines(seed);
        CHECK(solve_system(d.system, d.allocation, d.cluster) ==
              solve_system_serial(d.system, d.allocation, d.cluster));
    }
}
