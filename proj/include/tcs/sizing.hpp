#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tcs/analysis.hpp"

namespace tcs {

inline constexpr long long kDefaultMaxReplicas = 4096;

struct SweepRow {
    Rational frequency;
    Rational total_utilization;
    long long min_cores = 0;
    /// Keyed by the template's stage ids; replicas are folded back in.
    std::map<StageId, Rational> per_stage_utilization;
};

struct DecimationRow {
    long long factor = 1;
    Bound end_to_end;
    Rational aggregator_utilization;
    long long cores_saved = 0;
};

struct BaselineComparison {
    long long ours = 0;
    long long baseline = 0;
};

/// Every periodic stage gets T = floor(1e9 / hz) ns; one-shot stages keep
/// their infinite inter-arrival. Deadlines are left untouched.
System retime(const System& system, const Rational& hz);

/// The stage the decimation sweep slows down: the last leaf of the first
/// analytic's topology, unless `aggregator` names one explicitly.
StageId default_aggregator(const System& system);

/// For each frequency: retime, replicate over-rate stages, set D = T + B,
/// then report utilization and minimum cores. Rows are computed in parallel.
std::vector<SweepRow> frequency_sweep(const System& topology_template, const std::vector<Rational>& frequencies,
                                      const Rational& u_max, long long k_max = kDefaultMaxReplicas);

std::vector<SweepRow> frequency_sweep_serial(const System& topology_template,
                                             const std::vector<Rational>& frequencies, const Rational& u_max,
                                             long long k_max = kDefaultMaxReplicas);

/// Factor-F decimation of the aggregator stage at a fixed input rate.
///
/// The aggregator fires once per F inputs: its inter-arrival becomes F*T_in
/// with its per-activation cost unchanged. The deployment (priorities and
/// allocation) is the one the undecimated system gets: deadline-monotonic
/// priorities unless the template carries explicit ones, and first-fit onto
/// min_cores(U, u_max) cores of capacity u_max unless it carries explicit
/// cores. The analysed end-to-end bound of the decimated system then gains
/// the F*T_in buffering latency on the aggregator.
std::vector<DecimationRow> decimation_sweep(const System& topology, const Rational& input_frequency,
                                            const std::vector<long long>& factors, const Rational& u_max,
                                            const std::optional<StageId>& aggregator = std::nullopt);

/// Core counts with blocking folded into deadlines (ours, C/T) versus an
/// analysis that charges blocking as demand (baseline, (C+B)/T).
BaselineComparison baseline_comparison(const System& system, const Rational& u_max);

} // namespace tcs
