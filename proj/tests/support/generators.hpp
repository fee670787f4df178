#pragma once

// Seeded random systems for the property and acceptance suites.

#include <cstdint>

#include "tcs/model.hpp"

namespace tcs::gen {

struct Deployed {
    System system; // priorities and cores set on the stages
    Cluster cluster;
    Allocation allocation;
};

/// Up to 6 independent periodic stages (one single-stage analytic each) on
/// one core: B = 0, D in [C, T], distinct deadline-monotonic priorities,
/// utilization at most 0.9. Periods divide 1e9 ns, so the hyperperiod does
/// too. The analytic deadline equals the stage period.
Deployed single_core_independent(std::uint64_t seed);

/// Hyperperiod of every finite inter-arrival in the system.
std::int64_t hyperperiod(const System& system);

/// random_system with blocking added: B uniform in [0, max_blocking_ratio*T],
/// D = T + B, deadline-monotonic priorities.
System bound_regime(std::uint64_t seed, double max_blocking_ratio);

/// 1-4 analytics, each a small Seq/Par pipeline sharing one period from a
/// harmonic-free but bounded set (hyperperiod <= 200 ms). Blocking is drawn
/// in [0, T/4]; D = T + B per stage; deadline-monotonic priorities;
/// first-fit onto the fewest uniform cores that accept the packing.
Deployed pipelines(std::uint64_t seed);

} // namespace tcs::gen
