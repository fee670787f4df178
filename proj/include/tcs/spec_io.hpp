#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tcs/model.hpp"
#include "tcs/sim.hpp"

namespace tcs {

struct SimOptions {
    std::optional<Duration> horizon;
    std::optional<std::uint64_t> seed;
    std::optional<BlockingPolicy> blocking_policy;
    std::optional<ReleasePolicy> release_policy;

    friend bool operator==(const SimOptions&, const SimOptions&) = default;
};

struct AnalysisOptions {
    std::optional<Rational> u_max;
    std::vector<Rational> freqs;
    std::vector<long long> factors;
    std::optional<Rational> input_frequency;
    std::optional<StageId> aggregator;
    std::optional<long long> k_max;
    SimOptions sim;

    friend bool operator==(const AnalysisOptions&, const AnalysisOptions&) = default;
};

/// On-disk form of a system. Explicit priorities and cores from the
/// "priorities" / "allocation" sections live on the stages.
struct SystemSpec {
    System system;
    Cluster cluster;
    AnalysisOptions options;

    friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

/// Parses the JSON spec. Throws ParseError carrying a JSON pointer to the
/// offending value; unknown keys are rejected.
SystemSpec parse_system_spec(std::string_view text);

/// Pretty-printed JSON (two-space indent, trailing newline).
std::string emit_system_spec(const SystemSpec& spec);

std::string_view to_string(BlockingPolicy policy);
std::string_view to_string(ReleasePolicy policy);
std::optional<BlockingPolicy> blocking_policy_from_string(std::string_view text);
std::optional<ReleasePolicy> release_policy_from_string(std::string_view text);

} // namespace tcs
