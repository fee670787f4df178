#include "tcs/model.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace tcs {

Composition Composition::leaf(StageId id)
{
    Composition c;
    c.kind_ = Kind::leaf;
    c.stage_ = std::move(id);
    return c;
}

Composition Composition::seq(std::vector<Composition> children)
{
    Composition c;
    c.kind_ = Kind::seq;
    c.children_ = std::move(children);
    return c;
}

Composition Composition::par(std::vector<Composition> children)
{
    Composition c;
    c.kind_ = Kind::par;
    c.children_ = std::move(children);
    return c;
}

std::vector<StageId> Composition::leaves() const
{
    std::vector<StageId> out;
    auto walk = [&](const Composition& node, auto& self) -> void {
        if (node.kind_ == Kind::leaf) {
            out.push_back(node.stage_);
            return;
        }
        for (const auto& child : node.children_)
            self(child, self);
    };
    walk(*this, walk);
    return out;
}

Composition Composition::substitute(const StageId& id, const Composition& replacement) const
{
    if (kind_ == Kind::leaf)
        return stage_ == id ? replacement : *this;
    Composition c = *this;
    for (auto& child : c.children_)
        child = child.substitute(id, replacement);
    return c;
}

const Stage* Analytic::find(const StageId& id) const
{
    for (const auto& s : stages)
        if (s.id == id)
            return &s;
    return nullptr;
}

std::size_t System::stage_count() const
{
    std::size_t n = 0;
    for (const auto& a : analytics)
        n += a.stages.size();
    return n;
}

const Stage* System::find(const StageId& id) const
{
    for (const auto& a : analytics)
        if (const Stage* s = a.find(id))
            return s;
    return nullptr;
}

Stage* System::find(const StageId& id)
{
    return const_cast<Stage*>(std::as_const(*this).find(id));
}

const Core* Cluster::find(const CoreId& id) const
{
    for (const auto& c : cores)
        if (c.id == id)
            return &c;
    return nullptr;
}

Cluster Cluster::uniform(std::size_t count, const Rational& capacity, Duration platform_blocking)
{
    Cluster cluster;
    for (std::size_t i = 0; i < count; ++i)
        cluster.cores.push_back(Core{"core" + std::to_string(i), capacity, platform_blocking});
    return cluster;
}

namespace {

void check_topology(const Composition& node, const std::string& path, const Analytic& analytic,
                    std::map<StageId, int>& seen, std::vector<Finding>& out)
{
    if (node.kind() == Composition::Kind::leaf) {
        if (analytic.find(node.stage()) == nullptr)
            out.push_back({path, "unknown stage " + node.stage()});
        else if (++seen[node.stage()] == 2)
            out.push_back({path, "stage covered twice: " + node.stage()});
        return;
    }
    const char* key = node.kind() == Composition::Kind::seq ? "seq" : "par";
    if (node.children().empty())
        out.push_back({path, std::string("empty ") + key + " composition"});
    for (std::size_t i = 0; i < node.children().size(); ++i)
        check_topology(node.children()[i], path + "/" + key + "/" + std::to_string(i), analytic,
                       seen, out);
}

} // namespace

ValidationReport validate_system(const System& system)
{
    ValidationReport report;
    auto& out = report.findings;
    std::set<std::string> analytic_ids;
    std::set<StageId> stage_ids;

    for (std::size_t ai = 0; ai < system.analytics.size(); ++ai) {
        const Analytic& a = system.analytics[ai];
        const std::string apath = "/analytics/" + std::to_string(ai);
        if (a.id.empty())
            out.push_back({apath + "/id", "empty analytic id"});
        else if (!analytic_ids.insert(a.id).second)
            out.push_back({apath + "/id", "duplicate analytic id " + a.id});
        if (a.end_to_end_deadline.is_infinite())
            out.push_back({apath + "/deadline", "end-to-end deadline must be finite"});
        else if (a.end_to_end_deadline.count() == 0)
            out.push_back({apath + "/deadline", "end-to-end deadline must be positive"});
        if (a.stages.empty())
            out.push_back({apath + "/stages", "analytic has no stages"});

        for (std::size_t si = 0; si < a.stages.size(); ++si) {
            const Stage& s = a.stages[si];
            const std::string spath = apath + "/stages/" + std::to_string(si);
            if (s.id.empty())
                out.push_back({spath + "/id", "empty stage id"});
            else if (!stage_ids.insert(s.id).second)
                out.push_back({spath + "/id", "duplicate stage id " + s.id});

            bool finite_fields = true;
            for (auto [field, value] : {std::pair{"cost", s.cost}, std::pair{"deadline", s.deadline},
                                        std::pair{"blocking", s.blocking}}) {
                if (value.is_infinite()) {
                    out.push_back({spath + "/" + field, std::string(field) + " must be finite"});
                    finite_fields = false;
                }
            }
            if (!s.one_shot() && s.inter_arrival.count() == 0)
                out.push_back({spath + "/inter_arrival", "inter-arrival must be positive"});
            if (!finite_fields)
                continue;
            if (s.cost > s.deadline)
                out.push_back({spath + "/cost", "cost exceeds deadline"});
            if (!s.one_shot()) {
                Duration::rep limit = 0;
                if (try_add(s.inter_arrival.count(), s.blocking.count(), limit) &&
                    s.deadline.count() > limit)
                    out.push_back({spath + "/deadline", "deadline exceeds inter-arrival plus blocking"});
            }
        }

        std::map<StageId, int> seen;
        check_topology(a.topology, apath + "/topology", a, seen, out);
        for (std::size_t si = 0; si < a.stages.size(); ++si)
            if (seen.find(a.stages[si].id) == seen.end())
                out.push_back({apath + "/stages/" + std::to_string(si) + "/id",
                               "stage not covered by topology: " + a.stages[si].id});
    }
    return report;
}

ValidationReport validate_cluster(const Cluster& cluster)
{
    ValidationReport report;
    if (cluster.cores.empty())
        report.findings.push_back({"/cluster/cores", "cluster has no cores"});
    std::set<CoreId> ids;
    for (std::size_t i = 0; i < cluster.cores.size(); ++i) {
        const Core& c = cluster.cores[i];
        const std::string path = "/cluster/cores/" + std::to_string(i);
        if (c.id.empty())
            report.findings.push_back({path + "/id", "empty core id"});
        else if (!ids.insert(c.id).second)
            report.findings.push_back({path + "/id", "duplicate core id " + c.id});
        if (c.capacity <= 0 || c.capacity > 1)
            report.findings.push_back({path + "/capacity", "capacity must lie in (0, 1]"});
        if (c.platform_blocking.is_infinite())
            report.findings.push_back({path + "/blocking", "blocking must be finite"});
    }
    return report;
}

PriorityMap assign_priorities_dm(const System& system)
{
    std::vector<std::pair<Duration, StageId>> order;
    system.for_each_stage([&](const Analytic&, const Stage& s) {
        if (s.deadline.is_infinite())
            throw PreconditionViolated("stage " + s.id + " has no finite deadline");
        order.emplace_back(s.deadline, s.id);
    });
    std::sort(order.begin(), order.end());
    PriorityMap out;
    auto next = static_cast<Priority>(order.size());
    for (const auto& entry : order)
        out[entry.second] = next--;
    return out;
}

std::vector<Stage> replicate_for_rate(const Stage& stage, long long k_max)
{
    if (stage.one_shot())
        throw PreconditionViolated("stage " + stage.id + " is one-shot; nothing to replicate");
    if (stage.inter_arrival.count() == 0)
        throw PreconditionViolated("stage " + stage.id + " has a zero inter-arrival time");
    if (stage.cost <= stage.inter_arrival)
        return {stage};

    const long long k = ceil_div(stage.cost.count(), stage.inter_arrival.count());
    if (k > k_max)
        throw ReplicationExceeded(stage.id, k, k_max);

    const Duration period = stage.inter_arrival * k;
    const Duration deadline = std::min(stage.deadline, period + stage.blocking);
    std::vector<Stage> replicas;
    replicas.reserve(static_cast<std::size_t>(k));
    for (long long i = 0; i < k; ++i) {
        Stage r = stage;
        r.id = stage.id + "#" + std::to_string(i);
        r.inter_arrival = period;
        r.deadline = deadline;
        replicas.push_back(std::move(r));
    }
    return replicas;
}

System replicate_system_for_rate(const System& system, long long k_max)
{
    System out;
    for (const auto& a : system.analytics) {
        Analytic copy = a;
        copy.stages.clear();
        for (const auto& s : a.stages) {
            if (s.one_shot() || s.cost <= s.inter_arrival) {
                copy.stages.push_back(s);
                continue;
            }
            auto replicas = replicate_for_rate(s, k_max);
            std::vector<Composition> leaves;
            for (auto& r : replicas) {
                leaves.push_back(Composition::leaf(r.id));
                copy.stages.push_back(std::move(r));
            }
            copy.topology = copy.topology.substitute(s.id, Composition::par(std::move(leaves)));
        }
        out.analytics.push_back(std::move(copy));
    }
    return out;
}

Allocation allocate_first_fit(const System& system, const Cluster& cluster)
{
    struct Item {
        Rational u;
        StageId id;
    };
    std::vector<Item> items;
    system.for_each_stage([&](const Analytic&, const Stage& s) { items.push_back({s.utilization(), s.id}); });
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.u != b.u)
            return a.u > b.u;
        return a.id < b.id;
    });

    std::vector<Rational> load(cluster.cores.size(), Rational(0));
    Allocation out;
    for (const auto& item : items) {
        bool placed = false;
        for (std::size_t c = 0; c < cluster.cores.size(); ++c) {
            Rational next = load[c] + item.u;
            if (next <= cluster.cores[c].capacity) {
                load[c] = std::move(next);
                out[item.id] = cluster.cores[c].id;
                placed = true;
                break;
            }
        }
        if (!placed)
            throw AllocationFailed(item.id);
    }
    return out;
}

void apply_priorities(System& system, const PriorityMap& priorities)
{
    for (auto& a : system.analytics)
        for (auto& s : a.stages)
            if (auto it = priorities.find(s.id); it != priorities.end())
                s.priority = it->second;
}

void apply_allocation(System& system, const Allocation& allocation)
{
    for (auto& a : system.analytics)
        for (auto& s : a.stages)
            if (auto it = allocation.find(s.id); it != allocation.end())
                s.core = it->second;
}

PriorityMap priorities_of(const System& system)
{
    PriorityMap out;
    system.for_each_stage([&](const Analytic&, const Stage& s) {
        if (s.priority)
            out[s.id] = *s.priority;
    });
    return out;
}

Allocation allocation_of(const System& system)
{
    Allocation out;
    system.for_each_stage([&](const Analytic&, const Stage& s) {
        if (s.core)
            out[s.id] = *s.core;
    });
    return out;
}

Duration effective_blocking(const Stage& stage, const Core* host)
{
    if (host == nullptr)
        return stage.blocking;
    return std::max(stage.blocking, host->platform_blocking);
}

} // namespace tcs
