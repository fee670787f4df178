// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include "tcs/analysis.hpp"
#include "tcs/sizing.hpp"
#include "tcs/workloads.hpp"

using namespace tcs;

namespace {

struct Deployment {
    System system;
    Cluster cluster;
    Allocation allocation;
};

// Many independent analytics packed onto a few cores.
Deployment many_analytics(std::size_t analytics)
{
    Deployment d;
    for (std::size_t i = 0; i < analytics; ++i) {
        System one = random_system(8, 0.4, {Duration::ms(1), Duration::s(1)}, i);
        Analytic a = std::move(one.analytics.front());
        a.id = "A" + std::to_string(i);
        std::vector<StageId> old_ids;
        for (auto& s : a.stages) {
            old_ids.push_back(s.id);
            s.id = a.id + "." + s.id;
        }
        for (const auto& id : old_ids)
            a.topology = a.topology.substitute(id, Composition::leaf(a.id + "." + id));
        d.system.analytics.push_back(std::move(a));
    }
    apply_priorities(d.system, assign_priorities_dm(d.system));
    const long long m = min_cores(total_utilization(d.system).total, Rational(1)) * 2;
    d.cluster = Cluster::uniform(static_cast<std::size_t>(m), Rational(1));
    d.allocation = allocate_first_fit(d.system, d.cluster);
    return d;
}

System microblog()
{
    ScenarioParams p;
    p.frequency = Rational(1);
    return builtin_system(ScenarioId::microblog_online, p);
}

std::vector<Rational> frequencies(long count)
{
    std::vector<Rational> out;
    for (long f = 1; f <= count; ++f)
        out.push_back(Rational(f * 97));
    return out;
}

void BM_solve_system(benchmark::State& state)
{
    const auto d = many_analytics(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_system(d.system, d.allocation, d.cluster));
}

void BM_solve_system_serial(benchmark::State& state)
{
    const auto d = many_analytics(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_system_serial(d.system, d.allocation, d.cluster));
}

void BM_frequency_sweep(benchmark::State& state)
{
    const auto sys = microblog();
    const auto freqs = frequencies(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(frequency_sweep(sys, freqs, Rational(1)));
}

void BM_frequency_sweep_serial(benchmark::State& state)
{
    const auto sys = microblog();
    const auto freqs = frequencies(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(frequency_sweep_serial(sys, freqs, Rational(1)));
}

} // namespace

BENCHMARK(BM_solve_system)->Arg(16)->Arg(128);
BENCHMARK(BM_solve_system_serial)->Arg(16)->Arg(128);
BENCHMARK(BM_frequency_sweep)->Arg(64)->Arg(256);
BENCHMARK(BM_frequency_sweep_serial)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
