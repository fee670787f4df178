#include "tcs/sim.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <set>

namespace tcs {

const char* to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::release: return "RELEASE";
    case EventKind::start: return "START";
    case EventKind::preempt: return "PREEMPT";
    case EventKind::resume: return "RESUME";
    case EventKind::block_end: return "BLOCK_END";
    case EventKind::complete: return "COMPLETE";
    }
    return "?";
}

namespace {

using rep = Duration::rep;
constexpr rep kNever = std::numeric_limits<rep>::max();

struct Leaf {
    const Stage* stage = nullptr;
    std::size_t analytic = 0;
    std::size_t core = 0;
    Priority priority = 0;
    rep blocking = 0;
    long long stride = 1; // 0: one-shot, item 0 only
    long long phase = 0;
    std::vector<std::size_t> successors;
    std::size_t pred_count = 0;
    bool sink = false;

    bool participates(long long item) const
    {
        if (stride == 0)
            return item == 0;
        return item % stride == phase % stride;
    }
};

struct Flow {
    std::string id;
    rep item_period = 0; // 0: single item
    rep offset = 0;
    std::size_t sinks = 0;
    std::vector<std::size_t> sources;
};

struct Job {
    std::size_t leaf;
    long long item;
    rep release;
    rep remaining;
    bool started = false;
};

// Timed events the loop wakes up for; completions are derived from cores.
struct Timed {
    rep time;
    int order; // 0 arrival, 1 block end
    const std::string* stage;
    long long item;
    std::size_t ref; // analytic index for arrivals, job index for block ends

    bool operator>(const Timed& o) const
    {
        if (time != o.time)
            return time > o.time;
        if (order != o.order)
            return order > o.order;
        if (*stage != *o.stage)
            return *stage > *o.stage;
        return item > o.item;
    }
};

class Simulator {
public:
    Simulator(const System& system, const Allocation& allocation, const Cluster& cluster, const SimConfig& config)
        : cluster_(cluster), config_(config), rng_(config.seed)
    {
        if (config.horizon.is_infinite() || config.horizon.count() <= 0)
            throw PreconditionViolated("simulation horizon must be positive and finite");
        build(system, allocation);
    }

    SimTrace run()
    {
        for (std::size_t a = 0; a < flows_.size(); ++a)
            if (flows_[a].offset < config_.horizon.count())
                timed_.push({flows_[a].offset, 0, &flows_[a].id, 0, a});

        rep now = 0;
        for (;;) {
            const rep next = next_time(now);
            if (next == kNever)
                break;
            advance(now, next);
            now = next;
            complete_due(now);
            while (!timed_.empty() && timed_.top().time == now) {
                const Timed ev = timed_.top();
                timed_.pop();
                if (ev.order == 0)
                    arrive(ev.ref, ev.item, now);
                else
                    unblock(ev.ref, now);
            }
            for (std::size_t c = 0; c < cores_.size(); ++c)
                dispatch(c, now);
        }
        for (std::size_t c = 0; c < cores_.size(); ++c)
            trace_.busy_time[cluster_.cores[c].id] = Duration(cores_[c].busy);
        if (trace_.end_to_end_responses.empty())
            throw HorizonTooShort("no item completed end-to-end within the horizon");
        return std::move(trace_);
    }

private:
    struct CoreState {
        std::set<std::size_t, std::function<bool(std::size_t, std::size_t)>> ready;
        std::optional<std::size_t> running;
        rep busy = 0;
    };

    void build(const System& system, const Allocation& allocation)
    {
        for (const auto& c : cluster_.cores) {
            CoreState state{std::set<std::size_t, std::function<bool(std::size_t, std::size_t)>>(
                                [this](std::size_t a, std::size_t b) { return ready_before(a, b); }),
                            std::nullopt, 0};
            cores_.push_back(std::move(state));
            core_index_.emplace(c.id, cores_.size() - 1);
        }

        for (std::size_t ai = 0; ai < system.analytics.size(); ++ai) {
            const Analytic& a = system.analytics[ai];
            Flow flow;
            flow.id = a.id;
            for (const auto& s : a.stages)
                if (!s.one_shot() && (flow.item_period == 0 || s.inter_arrival.count() < flow.item_period))
                    flow.item_period = s.inter_arrival.count();

            std::map<StageId, std::size_t> local;
            for (const auto& s : a.stages) {
                auto it = allocation.find(s.id);
                if (it == allocation.end())
                    throw InvalidAllocation("stage " + s.id + " has no core");
                auto core = core_index_.find(it->second);
                if (core == core_index_.end())
                    throw InvalidAllocation("stage " + s.id + " is allocated to unknown core " + it->second);
                if (!s.priority)
                    throw PreconditionViolated("stage " + s.id + " has no priority");
                Leaf leaf;
                leaf.stage = &s;
                leaf.analytic = ai;
                leaf.core = core->second;
                leaf.priority = *s.priority;
                leaf.blocking = effective_blocking(s, &cluster_.cores[core->second]).count();
                if (s.one_shot())
                    leaf.stride = 0;
                else
                    leaf.stride = std::max<long long>(1, s.inter_arrival.count() / flow.item_period);
                local.emplace(s.id, leaves_.size());
                leaves_.push_back(std::move(leaf));
            }

            const auto sinks = wire(a.topology, {}, local);
            for (std::size_t leaf : sinks)
                leaves_[leaf].sink = true;
            flow.sinks = sinks.size();
            // Sources fire in stage id order; `local` is a sorted map.
            for (const auto& [id, leaf] : local)
                if (leaves_[leaf].pred_count == 0)
                    flow.sources.push_back(leaf);

            if (config_.release_policy == ReleasePolicy::jittered && flow.item_period > 0)
                flow.offset = static_cast<rep>(rng_() % static_cast<std::uint64_t>(flow.item_period));
            flows_.push_back(std::move(flow));
        }
    }

    // Connects `incoming` to the entry leaves of `node`; returns its exit leaves.
    std::vector<std::size_t> wire(const Composition& node, const std::vector<std::size_t>& incoming,
                                  const std::map<StageId, std::size_t>& local)
    {
        switch (node.kind()) {
        case Composition::Kind::leaf: {
            auto it = local.find(node.stage());
            if (it == local.end())
                throw PreconditionViolated("topology references unknown stage " + node.stage());
            for (std::size_t p : incoming)
                leaves_[p].successors.push_back(it->second);
            leaves_[it->second].pred_count += incoming.size();
            return {it->second};
        }
        case Composition::Kind::seq: {
            std::vector<std::size_t> current = incoming;
            for (const auto& child : node.children())
                current = wire(child, current, local);
            return current;
        }
        case Composition::Kind::par: {
            std::vector<std::size_t> exits;
            for (std::size_t i = 0; i < node.children().size(); ++i) {
                const auto& child = node.children()[i];
                auto out = wire(child, incoming, local);
                if (child.kind() == Composition::Kind::leaf)
                    leaves_[out.front()].phase = static_cast<long long>(i);
                exits.insert(exits.end(), out.begin(), out.end());
            }
            return exits;
        }
        }
        return {};
    }

    bool ready_before(std::size_t a, std::size_t b) const
    {
        const Job& ja = jobs_[a];
        const Job& jb = jobs_[b];
        const Leaf& la = leaves_[ja.leaf];
        const Leaf& lb = leaves_[jb.leaf];
        if (la.priority != lb.priority)
            return la.priority > lb.priority;
        if (ja.release != jb.release)
            return ja.release < jb.release;
        if (la.stage->id != lb.stage->id)
            return la.stage->id < lb.stage->id;
        return ja.item < jb.item;
    }

    rep next_time(rep now) const
    {
        rep next = timed_.empty() ? kNever : timed_.top().time;
        for (const auto& core : cores_)
            if (core.running)
                next = std::min(next, now + jobs_[*core.running].remaining);
        return next;
    }

    void advance(rep from, rep to)
    {
        const rep elapsed = to - from;
        if (elapsed == 0)
            return;
        for (auto& core : cores_) {
            if (!core.running)
                continue;
            jobs_[*core.running].remaining -= elapsed;
            core.busy += elapsed;
        }
    }

    void emit(rep time, std::size_t core, EventKind kind, const Job& job)
    {
        if (!config_.record_events)
            return;
        trace_.events.push_back(
            {Duration(time), cluster_.cores[core].id, kind, leaves_[job.leaf].stage->id, job.item});
    }

    void complete_due(rep now)
    {
        std::vector<std::size_t> done;
        for (auto& core : cores_)
            if (core.running && jobs_[*core.running].remaining == 0)
                done.push_back(*core.running);
        std::sort(done.begin(), done.end(), [this](std::size_t a, std::size_t b) {
            const auto& ia = leaves_[jobs_[a].leaf].stage->id;
            const auto& ib = leaves_[jobs_[b].leaf].stage->id;
            return ia != ib ? ia < ib : jobs_[a].item < jobs_[b].item;
        });
        for (std::size_t j : done) {
            const Job& job = jobs_[j];
            const Leaf& leaf = leaves_[job.leaf];
            cores_[leaf.core].running.reset();
            emit(now, leaf.core, EventKind::complete, job);
            trace_.job_responses[{leaf.stage->id, job.item}] = Duration(now - job.release);
            finish(job.leaf, job.item, now);
        }
    }

    void arrive(std::size_t analytic, long long item, rep now)
    {
        Flow& flow = flows_[analytic];
        arrivals_[{analytic, item}] = now;
        if (flow.item_period > 0) {
            rep next = 0;
            if (try_add(now, flow.item_period, next) && next < config_.horizon.count())
                timed_.push({next, 0, &flow.id, item + 1, analytic});
        }
        for (std::size_t l : flow.sources)
            trigger(l, item, now);
    }

    void trigger(std::size_t leaf_index, long long item, rep now)
    {
        const Leaf& leaf = leaves_[leaf_index];
        if (!leaf.participates(item)) {
            finish(leaf_index, item, now);
            return;
        }
        jobs_.push_back({leaf_index, item, now, leaf.stage->cost.count(), false});
        const std::size_t j = jobs_.size() - 1;
        emit(now, leaf.core, EventKind::release, jobs_[j]);

        rep blocking = leaf.blocking;
        if (config_.blocking_policy == BlockingPolicy::uniform && blocking > 0)
            blocking = static_cast<rep>(rng_() % (static_cast<std::uint64_t>(blocking) + 1));
        if (blocking > 0)
            timed_.push({now + blocking, 1, &leaf.stage->id, item, j});
        else
            cores_[leaf.core].ready.insert(j);
    }

    void unblock(std::size_t j, rep now)
    {
        const Leaf& leaf = leaves_[jobs_[j].leaf];
        emit(now, leaf.core, EventKind::block_end, jobs_[j]);
        cores_[leaf.core].ready.insert(j);
    }

    // A leaf is finished for an item by completing its job or by skipping it.
    void finish(std::size_t leaf_index, long long item, rep now)
    {
        const Leaf& leaf = leaves_[leaf_index];
        for (std::size_t succ : leaf.successors) {
            auto [it, fresh] = pending_.try_emplace({succ, item}, leaves_[succ].pred_count);
            if (--it->second == 0) {
                pending_.erase(it);
                trigger(succ, item, now);
            }
        }
        if (leaf.sink) {
            const Flow& flow = flows_[leaf.analytic];
            auto [it, fresh] = sinks_left_.try_emplace({leaf.analytic, item}, flow.sinks);
            if (--it->second == 0) {
                sinks_left_.erase(it);
                const rep arrived = arrivals_.at({leaf.analytic, item});
                trace_.end_to_end_responses[{flow.id, item}] = Duration(now - arrived);
                arrivals_.erase({leaf.analytic, item});
            }
        }
    }

    void dispatch(std::size_t c, rep now)
    {
        CoreState& core = cores_[c];
        if (core.ready.empty())
            return;
        const std::size_t best = *core.ready.begin();
        if (core.running) {
            const std::size_t current = *core.running;
            if (leaves_[jobs_[best].leaf].priority <= leaves_[jobs_[current].leaf].priority)
                return;
            emit(now, c, EventKind::preempt, jobs_[current]);
            core.ready.insert(current);
        }
        core.ready.erase(core.ready.begin());
        core.running = best;
        Job& job = jobs_[best];
        emit(now, c, job.started ? EventKind::resume : EventKind::start, job);
        job.started = true;
    }

    const Cluster& cluster_;
    const SimConfig& config_;
    std::mt19937_64 rng_;

    std::vector<Leaf> leaves_;
    std::vector<Flow> flows_;
    std::vector<CoreState> cores_;
    std::map<CoreId, std::size_t> core_index_;
    std::vector<Job> jobs_;
    std::priority_queue<Timed, std::vector<Timed>, std::greater<>> timed_;
    std::map<std::pair<std::size_t, long long>, std::size_t> pending_;
    std::map<std::pair<std::size_t, long long>, std::size_t> sinks_left_;
    std::map<std::pair<std::size_t, long long>, rep> arrivals_;
    SimTrace trace_;
};

} // namespace

SimTrace simulate(const System& system, const Allocation& allocation, const Cluster& cluster, const SimConfig& config)
{
    Simulator sim(system, allocation, cluster, config);
    SimTrace trace = sim.run();
    return trace;
}

ObservedMaxima worst_observed(const SimTrace& trace)
{
    ObservedMaxima out;
    for (const auto& [key, response] : trace.job_responses) {
        auto [it, fresh] = out.per_stage.try_emplace(key.first, response);
        if (!fresh)
            it->second = std::max(it->second, response);
    }
    for (const auto& [key, response] : trace.end_to_end_responses) {
        auto [it, fresh] = out.per_analytic.try_emplace(key.first, response);
        if (!fresh)
            it->second = std::max(it->second, response);
    }
    return out;
}

std::vector<Violation> verify_conservative(const ResponseReport& report, const ObservedMaxima& observed)
{
    std::vector<Violation> out;
    for (const auto& [id, seen] : observed.per_stage) {
        auto it = report.per_stage.find(id);
        if (it != report.per_stage.end() && it->second && seen > *it->second)
            out.push_back({Violation::Scope::stage, id, seen, *it->second});
    }
    for (const auto& [id, seen] : observed.per_analytic) {
        auto it = report.per_analytic.find(id);
        if (it != report.per_analytic.end() && it->second.end_to_end && seen > *it->second.end_to_end)
            out.push_back({Violation::Scope::analytic, id, seen, *it->second.end_to_end});
    }
    return out;
}

void write_trace_csv(std::ostream& out, const SimTrace& trace)
{
    out << "time_ns,core,kind,stage,job\n";
    for (const auto& e : trace.events)
        out << e.time.count() << ',' << e.core << ',' << to_string(e.kind) << ',' << e.stage << ',' << e.job << '\n';
}

} // namespace tcs
