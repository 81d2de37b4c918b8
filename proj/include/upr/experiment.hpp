#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "upr/metrics.hpp"
#include "upr/reconfiguration.hpp"

namespace upr {

enum class OptionSet : std::uint8_t { Baseline, Conformability, Compatibility, Both };

std::string_view to_string(OptionSet o);
std::optional<OptionSet> parse_option_set(std::string_view text);
ReconfigOptions make_options(OptionSet set, std::uint64_t seed, InvariantChecks checks);

using AlgorithmPair = std::pair<std::string, std::string>;

/// Ordered pairs over {xy, yx, oe, nf}; identity pairs only on request.
std::vector<AlgorithmPair> all_pairs(bool include_identity = false);

struct ExperimentConfig {
    std::uint32_t width{5};
    std::uint32_t height{5};
    std::vector<AlgorithmPair> pairs = all_pairs();
    std::vector<OptionSet> options{OptionSet::Baseline, OptionSet::Both};
    std::vector<std::uint64_t> seeds{1};
    InvariantChecks checks{InvariantChecks::Final};
    std::optional<std::filesystem::path> out_dir;
    bool write_traces{false};
    bool allow_identity{false};
    ChannelDenominator denominator{ChannelDenominator::All};

    /// Throws std::invalid_argument on unknown algorithms, empty lists,
    /// identity pairs without allow_identity, or a degenerate mesh.
    void validate() const;
};

/// JSON object with optional keys mesh ("5x5"), pairs (list of "a:b" or
/// "all"), options, seeds, check, out, traces, identity, denominator.
ExperimentConfig load_config(const std::filesystem::path& file);
/// Applies the keys of `json_text` on top of `base`.
ExperimentConfig parse_config(std::string_view json_text, ExperimentConfig base = {});

struct ScenarioResult {
    std::string initial;
    std::string final;
    OptionSet options{OptionSet::Baseline};
    std::uint64_t seed{0};
    std::set<ChannelIndex> drained_channels;
    std::set<Flow> halted_flows;
    double drained_ratio{0.0};
    double halted_ratio{0.0};
    std::size_t raw_cond2_failures{0};
    std::size_t events{0};
    std::vector<Violation> violations;
    bool completed{false};
};

/// One scenario on a fresh mesh. The trace is copied to `trace_out` when
/// given. Metrics are left at zero when the run did not complete.
ScenarioResult run_single(const ExperimentConfig& config, const AlgorithmPair& pair, OptionSet options,
                          std::uint64_t seed, Trace* trace_out = nullptr);

/// Every (pair, options, seed) cell in config order. Writes results.csv,
/// summary.csv and, when requested, per-run traces under out_dir.
std::vector<ScenarioResult> run_sweep(const ExperimentConfig& config);

/// initial,final,options,seed,drained_ratio,halted_ratio,drained_count,
/// halted_count,raw_cond2_failures,events,violations
void write_results_csv(std::ostream& os, const std::vector<ScenarioResult>& results);

/// Seed-averaged ratios per (initial, final) for the baseline and
/// both-exploit runs plus exploit/baseline relative values, one row per
/// metric and pair: metric,initial,final,baseline,exploit,relative.
void write_summary_csv(std::ostream& os, const std::vector<ScenarioResult>& results);

std::string trace_file_name(const AlgorithmPair& pair, OptionSet options, std::uint64_t seed);

}  // namespace upr
