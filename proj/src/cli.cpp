#include "tcs/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "tcs/analysis.hpp"
#include "tcs/sim.hpp"
#include "tcs/sizing.hpp"
#include "tcs/spec_io.hpp"
#include "tcs/workloads.hpp"

namespace tcs {

namespace {

using json = nlohmann::ordered_json;

class UsageError : public Error {
public:
    using Error::Error;
};

json number9(const Rational& q)
{
    return json(std::stod(format_rational_sig9(q)));
}

json optional_ns(const Bound& b)
{
    return b ? json(b->count()) : json(nullptr);
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

SystemSpec load_spec(const std::string& path)
{
    SystemSpec spec = parse_system_spec(read_file(path));
    auto report = validate_system(spec.system);
    const auto cluster_report = validate_cluster(spec.cluster);
    report.findings.insert(report.findings.end(), cluster_report.findings.begin(), cluster_report.findings.end());
    if (!report.ok()) {
        const Finding& f = report.findings.front();
        std::string msg = "invalid spec at " + f.path + ": " + f.message;
        if (report.findings.size() > 1)
            msg += " (and " + std::to_string(report.findings.size() - 1) + " more)";
        throw UsageError(msg);
    }
    return spec;
}

// Fills in deadline-monotonic priorities when the spec gives none.
void ensure_priorities(System& system)
{
    std::size_t given = 0;
    system.for_each_stage([&](const Analytic&, const Stage& s) { given += s.priority ? 1 : 0; });
    if (given == 0)
        apply_priorities(system, assign_priorities_dm(system));
    else if (given != system.stage_count())
        throw UsageError("priorities must be given for every stage or for none");
}

// First-fit-decreasing onto the spec's cluster when the spec gives no allocation.
Allocation ensure_allocation(System& system, const Cluster& cluster)
{
    std::size_t given = 0;
    system.for_each_stage([&](const Analytic&, const Stage& s) { given += s.core ? 1 : 0; });
    if (given == 0)
        apply_allocation(system, allocate_first_fit(system, cluster));
    else if (given != system.stage_count())
        throw UsageError("allocation must cover every stage or none");
    return allocation_of(system);
}

Rational pick_umax(const std::string& flag, const SystemSpec& spec)
{
    if (!flag.empty())
        return parse_rational(flag);
    return spec.options.u_max.value_or(Rational(1));
}

std::vector<Rational> pick_freqs(const std::vector<std::string>& flag, const SystemSpec& spec)
{
    if (flag.empty())
        return spec.options.freqs;
    std::vector<Rational> out;
    for (const auto& f : flag)
        out.push_back(parse_rational(f));
    return out;
}

json report_json(const System& system, const ResponseReport& report)
{
    json stages = json::array();
    json analytics = json::array();
    for (const auto& a : system.analytics) {
        for (const auto& s : a.stages)
            stages.push_back(json{{"id", s.id},
                                  {"analytic", a.id},
                                  {"core", *s.core},
                                  {"priority", *s.priority},
                                  {"response_ns", optional_ns(report.per_stage.at(s.id))}});
        const AnalyticVerdict& v = report.per_analytic.at(a.id);
        analytics.push_back(json{{"id", a.id},
                                 {"deadline_ns", v.deadline.count()},
                                 {"end_to_end_ns", optional_ns(v.end_to_end)},
                                 {"feasible", v.feasible}});
    }
    json out;
    out["system_feasible"] = report.system_feasible;
    out["total_utilization"] = number9(total_utilization(system).total);
    out["stages"] = std::move(stages);
    out["analytics"] = std::move(analytics);
    return out;
}

int cmd_analyze(const std::string& path, std::ostream& out)
{
    SystemSpec spec = load_spec(path);
    ensure_priorities(spec.system);
    const Allocation allocation = ensure_allocation(spec.system, spec.cluster);
    const ResponseReport report = solve_system(spec.system, allocation, spec.cluster);
    out << report_json(spec.system, report).dump(2) << '\n';
    return report.system_feasible ? kExitFeasible : kExitInfeasible;
}

int cmd_size(const std::string& path, const std::vector<std::string>& freqs_flag, const std::string& umax_flag,
             std::ostream& out)
{
    const SystemSpec spec = load_spec(path);
    const auto freqs = pick_freqs(freqs_flag, spec);
    if (freqs.empty())
        throw UsageError("size needs --freqs or options.freqs");
    const auto rows = frequency_sweep(spec.system, freqs, pick_umax(umax_flag, spec),
                                      spec.options.k_max.value_or(kDefaultMaxReplicas));
    out << "frequency_hz,total_utilization,min_cores\n";
    for (const auto& r : rows)
        out << format_rational_sig9(r.frequency) << ',' << format_rational_sig9(r.total_utilization) << ','
            << r.min_cores << '\n';
    return kExitFeasible;
}

int cmd_decimate(const std::string& path, const std::vector<long long>& factors_flag, const std::string& freq_flag,
                 const std::string& aggregator_flag, const std::string& umax_flag, std::ostream& out)
{
    const SystemSpec spec = load_spec(path);
    const auto& factors = factors_flag.empty() ? spec.options.factors : factors_flag;
    if (factors.empty())
        throw UsageError("decimate needs --factors or options.factors");

    Rational hz;
    if (!freq_flag.empty()) {
        hz = parse_rational(freq_flag);
    } else if (spec.options.input_frequency) {
        hz = *spec.options.input_frequency;
    } else {
        std::optional<Duration> fastest;
        spec.system.for_each_stage([&](const Analytic&, const Stage& s) {
            if (!s.one_shot() && (!fastest || s.inter_arrival < *fastest))
                fastest = s.inter_arrival;
        });
        if (!fastest)
            throw UsageError("decimate needs a periodic stage or an input frequency");
        hz = Rational(1'000'000'000) / Rational(static_cast<long>(fastest->count()));
    }
    std::optional<StageId> aggregator = spec.options.aggregator;
    if (!aggregator_flag.empty())
        aggregator = aggregator_flag;

    const auto rows = decimation_sweep(spec.system, hz, factors, pick_umax(umax_flag, spec), aggregator);
    out << "factor,end_to_end_ns,aggregator_utilization,cores_saved\n";
    for (const auto& r : rows) {
        out << r.factor << ',';
        if (r.end_to_end)
            out << r.end_to_end->count();
        else
            out << "diverged";
        out << ',' << format_rational_sig9(r.aggregator_utilization) << ',' << r.cores_saved << '\n';
    }
    return kExitFeasible;
}

struct SimulateFlags {
    std::optional<std::uint64_t> seed;
    std::string horizon;
    std::string blocking;
    std::string release;
    std::string trace = "trace.csv";
};

std::uint64_t parse_seed(const std::string& text, const char* what)
{
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
        throw UsageError(std::string("bad ") + what + " '" + text + "'");
    try {
        return std::stoull(text);
    } catch (const std::exception&) {
        throw UsageError(std::string("bad ") + what + " '" + text + "'");
    }
}

int cmd_simulate(const std::string& path, const SimulateFlags& flags, std::ostream& out)
{
    SystemSpec spec = load_spec(path);
    ensure_priorities(spec.system);
    const Allocation allocation = ensure_allocation(spec.system, spec.cluster);

    SimConfig config;
    if (flags.seed)
        config.seed = *flags.seed;
    else if (const char* env = std::getenv("TC_SIZER_SEED"))
        config.seed = parse_seed(env, "TC_SIZER_SEED");
    else
        config.seed = spec.options.sim.seed.value_or(0);

    if (!flags.horizon.empty())
        config.horizon = parse_duration(flags.horizon);
    else if (spec.options.sim.horizon)
        config.horizon = *spec.options.sim.horizon;
    else
        throw UsageError("simulate needs --horizon or options.sim.horizon");

    config.blocking_policy = spec.options.sim.blocking_policy.value_or(BlockingPolicy::adversarial);
    if (!flags.blocking.empty()) {
        auto p = blocking_policy_from_string(flags.blocking);
        if (!p)
            throw UsageError("bad --blocking '" + flags.blocking + "'");
        config.blocking_policy = *p;
    }
    config.release_policy = spec.options.sim.release_policy.value_or(ReleasePolicy::synchronous);
    if (!flags.release.empty()) {
        auto p = release_policy_from_string(flags.release);
        if (!p)
            throw UsageError("bad --release '" + flags.release + "'");
        config.release_policy = *p;
    }

    const ResponseReport report = solve_system(spec.system, allocation, spec.cluster);
    const SimTrace trace = simulate(spec.system, allocation, spec.cluster, config);
    {
        std::ofstream csv(flags.trace, std::ios::binary);
        if (!csv)
            throw UsageError("cannot write " + flags.trace);
        write_trace_csv(csv, trace);
    }
    const ObservedMaxima observed = worst_observed(trace);
    const auto violations = verify_conservative(report, observed);

    json stages = json::object();
    for (const auto& [id, v] : observed.per_stage)
        stages[id] = v.count();
    json analytics = json::object();
    for (const auto& [id, v] : observed.per_analytic)
        analytics[id] = v.count();
    json list = json::array();
    for (const auto& v : violations)
        list.push_back(json{{"scope", v.scope == Violation::Scope::stage ? "stage" : "analytic"},
                            {"id", v.id},
                            {"observed_ns", v.observed.count()},
                            {"bound_ns", v.bound.count()}});

    json doc;
    doc["seed"] = config.seed;
    doc["horizon_ns"] = config.horizon.count();
    doc["blocking_policy"] = std::string(to_string(config.blocking_policy));
    doc["release_policy"] = std::string(to_string(config.release_policy));
    doc["trace"] = flags.trace;
    doc["observed"] = json{{"stages", std::move(stages)}, {"analytics", std::move(analytics)}};
    doc["conservative"] = violations.empty();
    doc["violations"] = std::move(list);
    doc["system_feasible"] = report.system_feasible;
    out << doc.dump(2) << '\n';
    return report.system_feasible ? kExitFeasible : kExitInfeasible;
}

int cmd_compare(const std::string& path, const std::string& umax_flag, std::ostream& out)
{
    SystemSpec spec = load_spec(path);
    ensure_priorities(spec.system);
    const Rational u_max = pick_umax(umax_flag, spec);
    const BaselineComparison cmp = baseline_comparison(spec.system, u_max);
    json doc;
    doc["u_max"] = number9(u_max);
    doc["ours"] = cmp.ours;
    doc["baseline"] = cmp.baseline;
    out << doc.dump(2) << '\n';
    return kExitFeasible;
}

struct ScenarioFlags {
    std::string name;
    std::string freq;
    std::vector<std::string> costs;
    long long hint = 1;
    std::string priorities;
    std::string deadline;
};

int cmd_scenario(const ScenarioFlags& flags, std::ostream& out)
{
    const auto id = scenario_from_string(flags.name);
    if (!id)
        throw UsageError("unknown scenario '" + flags.name + "'");
    ScenarioParams params;
    if (!flags.freq.empty())
        params.frequency = parse_rational(flags.freq);
    for (const auto& c : flags.costs)
        params.costs.push_back(parse_duration(c));
    params.splitter_hint = flags.hint;
    if (!flags.deadline.empty())
        params.deadline = parse_duration(flags.deadline);
    if (flags.priorities == "gp")
        params.table_vi = TableViPriorities::general_purpose;
    else if (flags.priorities == "tc")
        params.table_vi = TableViPriorities::time_critical;
    else if (!flags.priorities.empty())
        throw UsageError("bad --priorities '" + flags.priorities + "' (expected gp or tc)");

    SystemSpec spec{builtin_system(*id, params), builtin_cluster(*id), {}};
    out << emit_system_spec(spec);
    return kExitFeasible;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Schedulability analysis and cluster sizing for time-critical analytics", "tc-sizer"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string umax;

    auto* analyze = app.add_subcommand("analyze", "Solve response times and print verdicts as JSON");
    analyze->add_option("spec", spec_path, "System spec (JSON)")->required();

    std::vector<std::string> freqs;
    auto* size = app.add_subcommand("size", "Utilization and minimum cores per input frequency (CSV)");
    size->add_option("spec", spec_path, "System spec (JSON)")->required();
    size->add_option("--freqs", freqs, "Comma-separated frequencies in Hz")->delimiter(',');
    size->add_option("--umax", umax, "Per-core utilization ceiling");

    std::vector<long long> factors;
    std::string freq;
    std::string aggregator;
    auto* decimate = app.add_subcommand("decimate", "Aggregator decimation trade-off (CSV)");
    decimate->add_option("spec", spec_path, "System spec (JSON)")->required();
    decimate->add_option("--factors", factors, "Comma-separated decimation factors")->delimiter(',');
    decimate->add_option("--freq", freq, "Input frequency in Hz");
    decimate->add_option("--aggregator", aggregator, "Stage to decimate");
    decimate->add_option("--umax", umax, "Per-core utilization ceiling");

    SimulateFlags sim_flags;
    std::string seed_text;
    auto* simulate_cmd = app.add_subcommand("simulate", "Discrete-event simulation against the analytic bounds");
    simulate_cmd->add_option("spec", spec_path, "System spec (JSON)")->required();
    simulate_cmd->add_option("--seed", seed_text, "Seed (default: $TC_SIZER_SEED, then options.sim.seed)");
    simulate_cmd->add_option("--horizon", sim_flags.horizon, "Arrival horizon, e.g. 10s");
    simulate_cmd->add_option("--blocking", sim_flags.blocking, "adversarial | uniform");
    simulate_cmd->add_option("--release", sim_flags.release, "synchronous | jittered");
    simulate_cmd->add_option("--trace", sim_flags.trace, "Trace CSV output path")->capture_default_str();

    auto* compare = app.add_subcommand("compare", "Core counts with and without blocking charged as demand");
    compare->add_option("spec", spec_path, "System spec (JSON)")->required();
    compare->add_option("--umax", umax, "Per-core utilization ceiling");

    ScenarioFlags scenario_flags;
    auto* scenario = app.add_subcommand("scenario", "Print a built-in scenario as a spec");
    scenario->add_option("name", scenario_flags.name,
                         "microblog-online | microblog-offline | book-online | book-offline | table-vi")
        ->required();
    scenario->add_option("--freq", scenario_flags.freq, "Input frequency in Hz (online scenarios)");
    scenario->add_option("--costs", scenario_flags.costs, "Comma-separated stage costs")->delimiter(',');
    scenario->add_option("--hint", scenario_flags.hint, "Splitter parallelism (online scenarios)");
    scenario->add_option("--priorities", scenario_flags.priorities, "table-vi priorities: gp | tc");
    scenario->add_option("--deadline", scenario_flags.deadline, "End-to-end deadline override");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        out << (subs.empty() ? app.help() : subs.front()->help());
        return kExitFeasible;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (analyze->parsed())
            return cmd_analyze(spec_path, out);
        if (size->parsed())
            return cmd_size(spec_path, freqs, umax, out);
        if (decimate->parsed())
            return cmd_decimate(spec_path, factors, freq, aggregator, umax, out);
        if (simulate_cmd->parsed()) {
            if (!seed_text.empty())
                sim_flags.seed = parse_seed(seed_text, "--seed");
            return cmd_simulate(spec_path, sim_flags, out);
        }
        if (compare->parsed())
            return cmd_compare(spec_path, umax, out);
        if (scenario->parsed())
            return cmd_scenario(scenario_flags, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace tcs
