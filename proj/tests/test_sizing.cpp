#include "doctest.h"

#include "support/generators.hpp"
#include "tcs/sizing.hpp"
#include "tcs/workloads.hpp"

using namespace tcs;

namespace {

System microblog()
{
    ScenarioParams p;
    p.frequency = Rational(1);
    return builtin_system(ScenarioId::microblog_online, p);
}

System with_blocking(System sys, Duration b)
{
    for (auto& a : sys.analytics)
        for (auto& s : a.stages) {
            s.blocking = b;
            s.deadline = s.inter_arrival + b;
        }
    return sys;
}

} // namespace

TEST_CASE("frequency sweep rows")
{
    const auto rows = frequency_sweep(microblog(), {Rational(1), Rational(4000)}, Rational(1));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].total_utilization == ratio(1145, 1'000'000));
    CHECK(rows[0].min_cores == 1);
    CHECK(rows[1].total_utilization == ratio(229, 50));
    CHECK(rows[1].min_cores == 6);
    CHECK(rows[1].per_stage_utilization.at("S") == ratio(507, 250));

    ScenarioParams p;
    p.frequency = Rational(1);
    const auto book = frequency_sweep(builtin_system(ScenarioId::book_online, p), {Rational(1)}, Rational(1));
    CHECK(book[0].total_utilization == ratio(69, 10'000));
    CHECK(book[0].min_cores == 1);
}

TEST_CASE("utilization is exactly linear in frequency when periods are exact")
{
    std::vector<Rational> freqs;
    for (long hz : {1L, 2L, 5L, 10L, 100L, 1000L, 2000L, 4000L, 5000L, 8000L, 10000L, 20000L, 40000L})
        freqs.push_back(Rational(hz));
    const auto rows = frequency_sweep(microblog(), freqs, Rational(1));
    for (std::size_t i = 0; i < rows.size(); ++i)
        CHECK(rows[i].total_utilization == freqs[i] * ratio(1145, 1'000'000));
}

TEST_CASE("sweep is monotone and matches the serial reference")
{
    std::vector<Rational> freqs;
    for (long hz = 1; hz <= 24000; hz += 997)
        freqs.push_back(Rational(hz));
    const auto rows = frequency_sweep(microblog(), freqs, Rational(1));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].total_utilization >= rows[i - 1].total_utilization);
        CHECK(rows[i].min_cores >= rows[i - 1].min_cores);
    }
    const auto serial = frequency_sweep_serial(microblog(), freqs, Rational(1));
    REQUIRE(serial.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(serial[i].total_utilization == rows[i].total_utilization);
        CHECK(serial[i].min_cores == rows[i].min_cores);
        CHECK(serial[i].per_stage_utilization == rows[i].per_stage_utilization);
    }
}

TEST_CASE("sweep surfaces replication limits")
{
    CHECK_THROWS_AS(frequency_sweep(microblog(), {Rational(40000)}, Rational(1), 4), ReplicationExceeded);
}

TEST_CASE("decimation at 1 kHz")
{
    const auto rows = decimation_sweep(microblog(), Rational(1000), {1, 10, 100, 1000}, Rational(1));
    REQUIRE(rows.size() == 4);


    CHECK(rows[0].cores_saved == 0);
    CHECK(rows[0].aggregator_utilization == ratio(511, 1000));
    CHECK(rows[3].aggregator_utilization == ratio(511, 1'000'000));
    REQUIRE(rows[0].end_to_end);
    REQUIRE(rows[3].end_to_end);
    CHECK(*rows[3].end_to_end - *rows[0].end_to_end == Duration::ms(999));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(*rows[i].end_to_end >= *rows[i - 1].end_to_end);
        CHECK(rows[i].aggregator_utilization <= rows[i - 1].aggregator_utilization);
        CHECK(rows[i].cores_saved >= rows[i - 1].cores_saved);
    }
    CHECK(rows[3].cores_saved == 0);
}

TEST_CASE("decimation rejects bad input")
{
    CHECK_THROWS_AS(decimation_sweep(microblog(), Rational(1000), {0}, Rational(1)), PreconditionViolated);
    CHECK_THROWS_AS(decimation_sweep(microblog(), Rational(1000), {1}, Rational(1), StageId("nope")),
                    PreconditionViolated);
}

TEST_CASE("baseline comparison")
{
    ScenarioParams p;
    p.frequency = Rational(4000);
    auto sys = builtin_system(ScenarioId::microblog_online, p);
    apply_priorities(sys, assign_priorities_dm(sys));
    const auto none = baseline_comparison(sys, Rational(1));
    CHECK(none.ours == none.baseline);
    const auto blocked = baseline_comparison(with_blocking(sys, Duration::us(200)), Rational(1));
    CHECK(blocked.ours == 6);
    CHECK(blocked.baseline == 8);

    Analytic a;
    a.id = "A";
    a.stages = {Stage{"s", Duration(1), Duration(10), Duration(11), Duration(1), 1, std::nullopt}};
    a.topology = Composition::leaf("s");
    a.end_to_end_deadline = Duration(11);
    const auto tiny = baseline_comparison(System{{a}}, Rational(1));
    CHECK(tiny.ours == 1);
    CHECK(tiny.baseline == 1);
}

TEST_CASE("baseline never needs fewer cores")
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto sys = gen::bound_regime(seed, 0.5);
        const auto c = baseline_comparison(sys, Rational(1));
        CHECK(c.baseline >= c.ours);
    }
}
