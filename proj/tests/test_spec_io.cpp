#include "doctest.h"

#include "tcs/spec_io.hpp"
#include "tcs/workloads.hpp"

using namespace tcs;

namespace {

std::string minimal(const std::string& stage_body)
{
    return R"({"analytics":[{"id":"A","deadline":"10ms","stages":[{"id":"s",)" + stage_body +
           R"(}]}],"cluster":{"cores":[{"id":"core0"}]}})";
}

std::string error_path(const std::string& text)
{
    try {
        parse_system_spec(text);
    } catch (const ParseError& e) {
        return e.path();
    }
    return "<accepted>";
}

} // namespace

TEST_CASE("Table VI round-trips")
{
    for (auto mode : {TableViPriorities::unassigned, TableViPriorities::general_purpose,
                      TableViPriorities::time_critical}) {
        ScenarioParams p;
        p.table_vi = mode;
        SystemSpec spec{builtin_system(ScenarioId::table_vi, p), builtin_cluster(ScenarioId::table_vi), {}};
        const auto text = emit_system_spec(spec);
        const auto back = parse_system_spec(text);
        CHECK(back == spec);
        CHECK(emit_system_spec(back) == text);
    }
}

TEST_CASE("everything round-trips")
{
    ScenarioParams p;
    p.frequency = Rational(4000);
    p.splitter_hint = 3;
    SystemSpec spec{builtin_system(ScenarioId::microblog_online, p), Cluster::uniform(3, ratio(3, 4), Duration::us(5)),
                    {}};
    spec.system.analytics[0].stages[1].blocking = Duration(1'500'001);
    spec.system.analytics[0].stages[1].deadline = Duration::ms(3);
    spec.system.analytics[0].stages[0].core = "core1";
    spec.options.u_max = ratio(9, 10);
    spec.options.freqs = {Rational(1), Rational(4000), ratio(1, 3)};
    spec.options.factors = {1, 10};
    spec.options.input_frequency = Rational(1000);
    spec.options.aggregator = "C";
    spec.options.k_max = 64;
    spec.options.sim.horizon = Duration::ms(250);
    spec.options.sim.seed = 42;
    spec.options.sim.blocking_policy = BlockingPolicy::uniform;
    spec.options.sim.release_policy = ReleasePolicy::jittered;
    CHECK(parse_system_spec(emit_system_spec(spec)) == spec);
}

TEST_CASE("durations in specs")
{
    const auto spec = parse_system_spec(minimal(R"("cost":"1.5ms","inter_arrival":"10ms","deadline":"10ms")"));
    const Stage& s = spec.system.analytics[0].stages[0];
    CHECK(s.cost.count() == 1'500'000);
    CHECK(s.blocking == Duration::zero());
    CHECK(spec.system.analytics[0].topology == Composition::seq({Composition::leaf("s")}));
}

TEST_CASE("errors carry a JSON pointer")
{
    CHECK(error_path(minimal(R"("cost":"1ms","inter_arrival":"10ms")")) == "/analytics/0/stages/0/deadline");
    CHECK(error_path(minimal(R"("cost":"1xs","inter_arrival":"10ms","deadline":"10ms")")) ==
          "/analytics/0/stages/0/cost");
    CHECK(error_path(minimal(R"("cost":"1ms","inter_arrival":"10ms","deadline":"inf")")) ==
          "/analytics/0/stages/0/deadline");
    CHECK(error_path(minimal(R"("cost":"1ms","inter_arrival":"10ms","deadline":"10ms","colour":"red")")) ==
          "/analytics/0/stages/0/colour");
    CHECK(error_path(R"({"analytics":[]})") == "/cluster");
    CHECK(error_path(R"({"analytics":[],"cluster":{"cores":[]},"extra":1})") == "/extra");
    CHECK(error_path(R"({"analytics":[],"cluster":{"cores":[]},"priorities":{"zz":1}})") == "/priorities/zz");
    CHECK(error_path("{not json") == "");
}

TEST_CASE("duration errors name the token")
{
    try {
        parse_system_spec(minimal(R"("cost":"12 parsecs","inter_arrival":"10ms","deadline":"10ms")"));
        FAIL("accepted");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("'12 parsecs'") != std::string::npos);
    }
}

TEST_CASE("topology forms")
{
    const std::string text = R"({"analytics":[{"id":"A","deadline":"1s","stages":[
        {"id":"g","cost":"1ms","inter_arrival":"10ms","deadline":"10ms"},
        {"id":"x","cost":"1ms","inter_arrival":"10ms","deadline":"10ms"},
        {"id":"y","cost":"1ms","inter_arrival":"10ms","deadline":"10ms"}],
        "topology":{"seq":["g",{"par":["x","y"]}]}}],
        "cluster":{"cores":[{"id":"c","capacity":"0.75","blocking":"2us"}]},
        "options":{"u_max":0.9,"freqs":[1,"4000","1/3"],"factors":[1,10]}})";
    const auto spec = parse_system_spec(text);
    using C = Composition;
    CHECK(spec.system.analytics[0].topology == C::seq({C::leaf("g"), C::par({C::leaf("x"), C::leaf("y")})}));
    CHECK(spec.cluster.cores[0].capacity == ratio(3, 4));
    CHECK(spec.cluster.cores[0].platform_blocking == Duration::us(2));
    CHECK(*spec.options.u_max == ratio(9, 10));
    CHECK(spec.options.freqs == std::vector<Rational>{Rational(1), Rational(4000), ratio(1, 3)});
}
