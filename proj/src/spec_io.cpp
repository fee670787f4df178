#include "tcs/spec_io.hpp"

#include <initializer_list>
#include <set>

#include "json.hpp"

namespace tcs {

namespace {

using json = nlohmann::ordered_json;

class Reader {
public:
    // Checks that `node` is an object holding only `allowed` keys.
    static void object(const json& node, const std::string& path, std::initializer_list<std::string_view> allowed)
    {
        if (!node.is_object())
            throw ParseError(path.empty() ? "/" : path, "expected an object");
        for (const auto& [key, value] : node.items()) {
            bool known = false;
            for (auto a : allowed)
                known = known || key == a;
            if (!known)
                throw ParseError(path + "/" + key, "unknown key");
        }
    }

    static const json& required(const json& node, const std::string& path, const char* key)
    {
        auto it = node.find(key);
        if (it == node.end())
            throw ParseError(path + "/" + key, "missing required field");
        return *it;
    }

    static std::string string(const json& node, const std::string& path)
    {
        if (!node.is_string())
            throw ParseError(path, "expected a string");
        return node.get<std::string>();
    }

    static Duration duration(const json& node, const std::string& path, bool allow_infinite = false)
    {
        if (node.is_number_integer() && node.get<long long>() == 0)
            return Duration::zero();
        const std::string text = string(node, path);
        Duration d;
        try {
            d = parse_duration(text);
        } catch (const ParseError& e) {
            throw ParseError(path, e.what());
        }
        if (d.is_infinite() && !allow_infinite)
            throw ParseError(path, "'inf' is only allowed for inter_arrival");
        return d;
    }

    static Rational rational(const json& node, const std::string& path)
    {
        std::string text;
        if (node.is_string())
            text = node.get<std::string>();
        else if (node.is_number())
            text = node.dump();
        else
            throw ParseError(path, "expected a number");
        try {
            return parse_rational(text);
        } catch (const ParseError& e) {
            throw ParseError(path, e.what());
        }
    }

    static long long integer(const json& node, const std::string& path)
    {
        if (!node.is_number_integer())
            throw ParseError(path, "expected an integer");
        return node.get<long long>();
    }

    static const json& array(const json& node, const std::string& path)
    {
        if (!node.is_array())
            throw ParseError(path, "expected an array");
        return node;
    }
};

Composition read_topology(const json& node, const std::string& path)
{
    if (node.is_string())
        return Composition::leaf(node.get<std::string>());
    Reader::object(node, path, {"seq", "par"});
    if (node.size() != 1)
        throw ParseError(path, "expected exactly one of \"seq\" or \"par\"");
    const bool is_seq = node.contains("seq");
    const std::string key = is_seq ? "seq" : "par";
    const std::string child_path = path + "/" + key;
    std::vector<Composition> children;
    const json& list = Reader::array(node.at(key), child_path);
    for (std::size_t i = 0; i < list.size(); ++i)
        children.push_back(read_topology(list[i], child_path + "/" + std::to_string(i)));
    return is_seq ? Composition::seq(std::move(children)) : Composition::par(std::move(children));
}

json write_topology(const Composition& c)
{
    if (c.kind() == Composition::Kind::leaf)
        return c.stage();
    json children = json::array();
    for (const auto& child : c.children())
        children.push_back(write_topology(child));
    return json{{c.kind() == Composition::Kind::seq ? "seq" : "par", std::move(children)}};
}

Stage read_stage(const json& node, const std::string& path)
{
    Reader::object(node, path, {"id", "cost", "inter_arrival", "deadline", "blocking"});
    Stage s;
    s.id = Reader::string(Reader::required(node, path, "id"), path + "/id");
    s.cost = Reader::duration(Reader::required(node, path, "cost"), path + "/cost");
    s.inter_arrival =
        Reader::duration(Reader::required(node, path, "inter_arrival"), path + "/inter_arrival", true);
    s.deadline = Reader::duration(Reader::required(node, path, "deadline"), path + "/deadline");
    if (node.contains("blocking"))
        s.blocking = Reader::duration(node.at("blocking"), path + "/blocking");
    return s;
}

Analytic read_analytic(const json& node, const std::string& path)
{
    Reader::object(node, path, {"id", "deadline", "stages", "topology"});
    Analytic a;
    a.id = Reader::string(Reader::required(node, path, "id"), path + "/id");
    a.end_to_end_deadline = Reader::duration(Reader::required(node, path, "deadline"), path + "/deadline");
    const json& stages = Reader::array(Reader::required(node, path, "stages"), path + "/stages");
    for (std::size_t i = 0; i < stages.size(); ++i)
        a.stages.push_back(read_stage(stages[i], path + "/stages/" + std::to_string(i)));
    if (node.contains("topology")) {
        a.topology = read_topology(node.at("topology"), path + "/topology");
    } else {
        std::vector<Composition> chain;
        for (const auto& s : a.stages)
            chain.push_back(Composition::leaf(s.id));
        a.topology = Composition::seq(std::move(chain));
    }
    return a;
}

Cluster read_cluster(const json& node, const std::string& path)
{
    Reader::object(node, path, {"cores"});
    Cluster cluster;
    const json& cores = Reader::array(Reader::required(node, path, "cores"), path + "/cores");
    for (std::size_t i = 0; i < cores.size(); ++i) {
        const std::string cpath = path + "/cores/" + std::to_string(i);
        Reader::object(cores[i], cpath, {"id", "capacity", "blocking"});
        Core core;
        core.id = Reader::string(Reader::required(cores[i], cpath, "id"), cpath + "/id");
        if (cores[i].contains("capacity"))
            core.capacity = Reader::rational(cores[i].at("capacity"), cpath + "/capacity");
        if (cores[i].contains("blocking"))
            core.platform_blocking = Reader::duration(cores[i].at("blocking"), cpath + "/blocking");
        cluster.cores.push_back(std::move(core));
    }
    return cluster;
}

SimOptions read_sim(const json& node, const std::string& path)
{
    Reader::object(node, path, {"horizon", "seed", "blocking_policy", "release_policy"});
    SimOptions sim;
    if (node.contains("horizon"))
        sim.horizon = Reader::duration(node.at("horizon"), path + "/horizon");
    if (node.contains("seed")) {
        const json& seed = node.at("seed");
        if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0))
            throw ParseError(path + "/seed", "expected a non-negative integer");
        sim.seed = seed.get<std::uint64_t>();
    }
    if (node.contains("blocking_policy")) {
        const std::string p = path + "/blocking_policy";
        sim.blocking_policy = blocking_policy_from_string(Reader::string(node.at("blocking_policy"), p));
        if (!sim.blocking_policy)
            throw ParseError(p, "expected \"adversarial\" or \"uniform\"");
    }
    if (node.contains("release_policy")) {
        const std::string p = path + "/release_policy";
        sim.release_policy = release_policy_from_string(Reader::string(node.at("release_policy"), p));
        if (!sim.release_policy)
            throw ParseError(p, "expected \"synchronous\" or \"jittered\"");
    }
    return sim;
}

AnalysisOptions read_options(const json& node, const std::string& path)
{
    Reader::object(node, path, {"u_max", "freqs", "factors", "input_frequency", "aggregator", "k_max", "sim"});
    AnalysisOptions o;
    if (node.contains("u_max"))
        o.u_max = Reader::rational(node.at("u_max"), path + "/u_max");
    if (node.contains("freqs")) {
        const json& list = Reader::array(node.at("freqs"), path + "/freqs");
        for (std::size_t i = 0; i < list.size(); ++i)
            o.freqs.push_back(Reader::rational(list[i], path + "/freqs/" + std::to_string(i)));
    }
    if (node.contains("factors")) {
        const json& list = Reader::array(node.at("factors"), path + "/factors");
        for (std::size_t i = 0; i < list.size(); ++i)
            o.factors.push_back(Reader::integer(list[i], path + "/factors/" + std::to_string(i)));
    }
    if (node.contains("input_frequency"))
        o.input_frequency = Reader::rational(node.at("input_frequency"), path + "/input_frequency");
    if (node.contains("aggregator"))
        o.aggregator = Reader::string(node.at("aggregator"), path + "/aggregator");
    if (node.contains("k_max"))
        o.k_max = Reader::integer(node.at("k_max"), path + "/k_max");
    if (node.contains("sim"))
        o.sim = read_sim(node.at("sim"), path + "/sim");
    return o;
}

std::string rational_text(const Rational& q) { return format_rational_exact(q); }

} // namespace

std::string_view to_string(BlockingPolicy policy)
{
    return policy == BlockingPolicy::adversarial ? "adversarial" : "uniform";
}

std::string_view to_string(ReleasePolicy policy)
{
    return policy == ReleasePolicy::synchronous ? "synchronous" : "jittered";
}

std::optional<BlockingPolicy> blocking_policy_from_string(std::string_view text)
{
    if (text == "adversarial")
        return BlockingPolicy::adversarial;
    if (text == "uniform")
        return BlockingPolicy::uniform;
    return std::nullopt;
}

std::optional<ReleasePolicy> release_policy_from_string(std::string_view text)
{
    if (text == "synchronous")
        return ReleasePolicy::synchronous;
    if (text == "jittered")
        return ReleasePolicy::jittered;
    return std::nullopt;
}

SystemSpec parse_system_spec(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError("", std::string("malformed JSON: ") + e.what());
    }
    Reader::object(doc, "", {"analytics", "cluster", "allocation", "priorities", "options"});

    SystemSpec spec;
    const json& analytics = Reader::array(Reader::required(doc, "", "analytics"), "/analytics");
    for (std::size_t i = 0; i < analytics.size(); ++i)
        spec.system.analytics.push_back(read_analytic(analytics[i], "/analytics/" + std::to_string(i)));
    spec.cluster = read_cluster(Reader::required(doc, "", "cluster"), "/cluster");

    if (doc.contains("priorities")) {
        const json& node = doc.at("priorities");
        if (!node.is_object())
            throw ParseError("/priorities", "expected an object");
        for (const auto& [id, value] : node.items()) {
            Stage* s = spec.system.find(id);
            if (s == nullptr)
                throw ParseError("/priorities/" + id, "unknown stage");
            s->priority = Reader::integer(value, "/priorities/" + id);
        }
    }
    if (doc.contains("allocation")) {
        const json& node = doc.at("allocation");
        if (!node.is_object())
            throw ParseError("/allocation", "expected an object");
        for (const auto& [id, value] : node.items()) {
            Stage* s = spec.system.find(id);
            if (s == nullptr)
                throw ParseError("/allocation/" + id, "unknown stage");
            s->core = Reader::string(value, "/allocation/" + id);
        }
    }
    if (doc.contains("options"))
        spec.options = read_options(doc.at("options"), "/options");
    return spec;
}

std::string emit_system_spec(const SystemSpec& spec)
{
    json doc;
    json analytics = json::array();
    json priorities = json::object();
    json allocation = json::object();
    for (const auto& a : spec.system.analytics) {
        json stages = json::array();
        for (const auto& s : a.stages) {
            json st;
            st["id"] = s.id;
            st["cost"] = format_duration(s.cost);
            st["inter_arrival"] = format_duration(s.inter_arrival);
            st["deadline"] = format_duration(s.deadline);
            st["blocking"] = format_duration(s.blocking);
            stages.push_back(std::move(st));
            if (s.priority)
                priorities[s.id] = *s.priority;
            if (s.core)
                allocation[s.id] = *s.core;
        }
        json an;
        an["id"] = a.id;
        an["deadline"] = format_duration(a.end_to_end_deadline);
        an["stages"] = std::move(stages);
        an["topology"] = write_topology(a.topology);
        analytics.push_back(std::move(an));
    }
    doc["analytics"] = std::move(analytics);

    json cores = json::array();
    for (const auto& c : spec.cluster.cores)
        cores.push_back(json{{"id", c.id},
                             {"capacity", rational_text(c.capacity)},
                             {"blocking", format_duration(c.platform_blocking)}});
    doc["cluster"] = json{{"cores", std::move(cores)}};
    if (!priorities.empty())
        doc["priorities"] = std::move(priorities);
    if (!allocation.empty())
        doc["allocation"] = std::move(allocation);

    const AnalysisOptions& o = spec.options;
    json options = json::object();
    if (o.u_max)
        options["u_max"] = rational_text(*o.u_max);
    if (!o.freqs.empty()) {
        json list = json::array();
        for (const auto& f : o.freqs)
            list.push_back(rational_text(f));
        options["freqs"] = std::move(list);
    }
    if (!o.factors.empty())
        options["factors"] = o.factors;
    if (o.input_frequency)
        options["input_frequency"] = rational_text(*o.input_frequency);
    if (o.aggregator)
        options["aggregator"] = *o.aggregator;
    if (o.k_max)
        options["k_max"] = *o.k_max;
    json sim = json::object();
    if (o.sim.horizon)
        sim["horizon"] = format_duration(*o.sim.horizon);
    if (o.sim.seed)
        sim["seed"] = *o.sim.seed;
    if (o.sim.blocking_policy)
        sim["blocking_policy"] = std::string(to_string(*o.sim.blocking_policy));
    if (o.sim.release_policy)
        sim["release_policy"] = std::string(to_string(*o.sim.release_policy));
    if (!sim.empty())
        options["sim"] = std::move(sim);
    if (!options.empty())
        doc["options"] = std::move(options);

    return doc.dump(2) + "\n";
}

} // namespace tcs
