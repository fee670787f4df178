#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "tcs/analysis.hpp"

namespace tcs {

enum class BlockingPolicy {
    adversarial, ///< full blocking at every job start
    uniform,     ///< blocking drawn uniformly from [0, B]
};

enum class ReleasePolicy {
    synchronous, ///< every analytic's first item arrives at t = 0
    jittered,    ///< first arrival offset pseudo-randomly within one item period
};

struct SimConfig {
    Duration horizon = Duration::s(1);
    std::uint64_t seed = 0;
    BlockingPolicy blocking_policy = BlockingPolicy::adversarial;
    ReleasePolicy release_policy = ReleasePolicy::synchronous;
    bool record_events = true; ///< false keeps only responses (batch runs)
};

enum class EventKind { release, start, preempt, resume, block_end, complete };

const char* to_string(EventKind kind);

struct SimEvent {
    Duration time;
    CoreId core;
    EventKind kind = EventKind::release;
    StageId stage;
    long long job = 0; ///< item index within the owning analytic

    friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

using JobKey = std::pair<StageId, long long>;
using ItemKey = std::pair<std::string, long long>;

struct SimTrace {
    std::vector<SimEvent> events;
    std::map<JobKey, Duration> job_responses;
    std::map<ItemKey, Duration> end_to_end_responses;
    std::map<CoreId, Duration> busy_time;

    friend bool operator==(const SimTrace&, const SimTrace&) = default;
};

struct ObservedMaxima {
    std::map<StageId, Duration> per_stage;
    std::map<std::string, Duration> per_analytic;
};

struct Violation {
    enum class Scope { stage, analytic };
    Scope scope = Scope::stage;
    std::string id;
    Duration observed;
    Duration bound;
};

/// Partitioned fixed-priority preemptive scheduling of the allocated system.
///
/// Items of an analytic arrive every T_item, the smallest finite
/// inter-arrival among its stages (one item for an all one-shot analytic),
/// for arrivals before the horizon. A stage with inter-arrival k*T_item runs
/// every k-th item; among Par siblings the phase is the sibling index, which
/// realizes round-robin replicas. A stage's job for item n is released when
/// all its topology predecessors have finished item n. Each job first waits
/// out its blocking, during which it does not hold the core and cannot be
/// shortened; it then competes for its core by priority, with equal
/// priorities served FIFO by release time, then stage id.
SimTrace simulate(const System& system, const Allocation& allocation, const Cluster& cluster,
                  const SimConfig& config);

ObservedMaxima worst_observed(const SimTrace& trace);

/// Stages and analytics whose observed maximum exceeds the analytic bound.
/// A diverged bound is never exceeded.
std::vector<Violation> verify_conservative(const ResponseReport& report, const ObservedMaxima& observed);

/// CSV with header "time_ns,core,kind,stage,job" and LF line endings.
void write_trace_csv(std::ostream& out, const SimTrace& trace);

} // namespace tcs
