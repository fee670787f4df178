#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tcs/rational.hpp"
#include "tcs/time.hpp"

namespace tcs {

using StageId = std::string;
using CoreId = std::string;

/// Fixed priority; larger value means higher priority. Equal values are
/// legal and mean the two stages interfere with each other.
using Priority = long long;

/// One schedulable segment of an analytic.
struct Stage {
    StageId id;
    Duration cost;
    Duration inter_arrival; ///< Duration::infinite() for a one-shot stage.
    Duration deadline;
    Duration blocking;
    std::optional<Priority> priority;
    std::optional<CoreId> core;

    bool one_shot() const { return inter_arrival.is_infinite(); }
    Rational utilization() const { return tcs::utilization(cost, inter_arrival); }

    friend bool operator==(const Stage&, const Stage&) = default;
};

/// Series-parallel composition over stage ids.
class Composition {
public:
    enum class Kind { leaf, seq, par };

    static Composition leaf(StageId id);
    static Composition seq(std::vector<Composition> children);
    static Composition par(std::vector<Composition> children);

    Kind kind() const { return kind_; }
    const StageId& stage() const { return stage_; }
    const std::vector<Composition>& children() const { return children_; }

    /// Leaf ids in left-to-right order.
    std::vector<StageId> leaves() const;

    /// Replaces every leaf `id` with `replacement`.
    Composition substitute(const StageId& id, const Composition& replacement) const;

    friend bool operator==(const Composition&, const Composition&) = default;

private:
    Kind kind_ = Kind::leaf;
    StageId stage_;
    std::vector<Composition> children_;
};

struct Analytic {
    std::string id;
    std::vector<Stage> stages;
    Composition topology;
    Duration end_to_end_deadline;

    const Stage* find(const StageId& id) const;

    friend bool operator==(const Analytic&, const Analytic&) = default;
};

struct System {
    std::vector<Analytic> analytics;

    std::size_t stage_count() const;
    const Stage* find(const StageId& id) const;
    Stage* find(const StageId& id);

    /// Calls f(analytic, stage) over every stage in declaration order.
    template <typename F>
    void for_each_stage(F&& f) const
    {
        for (const auto& a : analytics)
            for (const auto& s : a.stages)
                f(a, s);
    }

    friend bool operator==(const System&, const System&) = default;
};

struct Core {
    CoreId id;
    Rational capacity{1};
    Duration platform_blocking;

    friend bool operator==(const Core&, const Core&) = default;
};

struct Cluster {
    std::vector<Core> cores;

    const Core* find(const CoreId& id) const;

    /// `count` cores named core0..core{count-1}, all with the same capacity.
    static Cluster uniform(std::size_t count, const Rational& capacity,
                           Duration platform_blocking = Duration::zero());

    friend bool operator==(const Cluster&, const Cluster&) = default;
};

struct Finding {
    std::string path; ///< JSON-pointer style, e.g. /analytics/0/stages/1/cost
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;
    bool ok() const { return findings.empty(); }
};

using PriorityMap = std::map<StageId, Priority>;
using Allocation = std::map<StageId, CoreId>;

ValidationReport validate_system(const System& system);
ValidationReport validate_cluster(const Cluster& cluster);

/// Deadline-monotonic priorities. Ties on deadline are broken by stage id,
/// the lexicographically smaller id winning; priorities are 1..n with n the
/// highest.
PriorityMap assign_priorities_dm(const System& system);

/// Splits an over-rate stage (cost > inter-arrival) into k = ceil(C/T)
/// round-robin replicas named "<id>#<i>", each activated every k*T.
std::vector<Stage> replicate_for_rate(const Stage& stage, long long k_max);

/// Applies replicate_for_rate to every finite-rate stage of the system,
/// rewriting each replicated leaf as a Par over its replicas.
System replicate_system_for_rate(const System& system, long long k_max);

/// First-fit-decreasing by utilization (ties by stage id) onto the cluster.
Allocation allocate_first_fit(const System& system, const Cluster& cluster);

/// Copies explicit priorities and cores into the stage fields.
void apply_priorities(System& system, const PriorityMap& priorities);
void apply_allocation(System& system, const Allocation& allocation);

/// Reads the stage fields back out; stages without a value are skipped.
PriorityMap priorities_of(const System& system);
Allocation allocation_of(const System& system);

/// max(stage blocking, platform blocking of the host core).
Duration effective_blocking(const Stage& stage, const Core* host);

} // namespace tcs
