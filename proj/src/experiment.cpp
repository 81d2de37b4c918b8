#include "upr/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "upr/routing.hpp"
#include "upr/topology.hpp"

namespace upr {

std::string_view to_string(OptionSet o) {
    switch (o) {
        case OptionSet::Baseline: return "baseline";
        case OptionSet::Conformability: return "conformability";
        case OptionSet::Compatibility: return "compatibility";
        case OptionSet::Both: return "both";
    }
    return "?";
}

std::optional<OptionSet> parse_option_set(std::string_view text) {
    for (OptionSet o : {OptionSet::Baseline, OptionSet::Conformability, OptionSet::Compatibility, OptionSet::Both})
        if (to_string(o) == text) return o;
    return std::nullopt;
}

ReconfigOptions make_options(OptionSet set, std::uint64_t seed, InvariantChecks checks) {
    ReconfigOptions o;
    o.exploit_conformability = set == OptionSet::Conformability || set == OptionSet::Both;
    o.exploit_compatibility = set == OptionSet::Compatibility || set == OptionSet::Both;
    o.scheduler_seed = seed;
    o.invariant_checks = checks;
    return o;
}

std::vector<AlgorithmPair> all_pairs(bool include_identity) {
    std::vector<AlgorithmPair> out;
    for (const auto& a : algorithm_names())
        for (const auto& b : algorithm_names())
            if (include_identity || a != b) out.emplace_back(a, b);
    return out;
}

void ExperimentConfig::validate() const {
    if (width == 0 || height == 0 || width * height < 2) throw std::invalid_argument("mesh needs at least two routers");
    if (pairs.empty()) throw std::invalid_argument("no algorithm pairs");
    if (options.empty()) throw std::invalid_argument("no option sets");
    if (seeds.empty()) throw std::invalid_argument("no seeds");
    for (const auto& [a, b] : pairs) {
        if (!is_algorithm_name(a)) throw std::invalid_argument("unknown routing algorithm '" + a + "'");
        if (!is_algorithm_name(b)) throw std::invalid_argument("unknown routing algorithm '" + b + "'");
        if (a == b && !allow_identity) throw std::invalid_argument("identity pair " + a + ":" + b + " not enabled");
    }
}

namespace {

std::pair<std::uint32_t, std::uint32_t> parse_mesh(const std::string& text) {
    const auto x = text.find('x');
    if (x == std::string::npos) throw std::invalid_argument("mesh must be WxH, got '" + text + "'");
    try {
        std::size_t used = 0;
        const unsigned long w = std::stoul(text.substr(0, x), &used);
        if (used != x) throw std::invalid_argument("");
        const std::string rest = text.substr(x + 1);
        const unsigned long h = std::stoul(rest, &used);
        if (used != rest.size()) throw std::invalid_argument("");
        return {static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(h)};
    } catch (const std::logic_error&) {
        throw std::invalid_argument("mesh must be WxH, got '" + text + "'");
    }
}

AlgorithmPair parse_pair(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("pair must be initial:final, got '" + text + "'");
    return {text.substr(0, colon), text.substr(colon + 1)};
}

std::string format_ratio(double r) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(6) << r;
    return os.str();
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text, ExperimentConfig base) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& ex) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + ex.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    try {
        if (j.contains("mesh")) std::tie(base.width, base.height) = parse_mesh(j["mesh"].get<std::string>());
        if (j.contains("identity")) base.allow_identity = j["identity"].get<bool>();
        if (j.contains("pairs")) {
            base.pairs.clear();
            const auto& p = j["pairs"];
            if (p.is_string() && p.get<std::string>() == "all") {
                base.pairs = all_pairs(base.allow_identity);
            } else {
                for (const auto& s : p) base.pairs.push_back(parse_pair(s.get<std::string>()));
            }
        }
        if (j.contains("options")) {
            base.options.clear();
            for (const auto& s : j["options"]) {
                auto o = parse_option_set(s.get<std::string>());
                if (!o) throw std::invalid_argument("unknown option set '" + s.get<std::string>() + "'");
                base.options.push_back(*o);
            }
        }
        if (j.contains("seeds")) base.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
        if (j.contains("check")) {
            auto c = parse_invariant_checks(j["check"].get<std::string>());
            if (!c) throw std::invalid_argument("unknown check level");
            base.checks = *c;
        }
        if (j.contains("out")) base.out_dir = j["out"].get<std::string>();
        if (j.contains("traces")) base.write_traces = j["traces"].get<bool>();
        if (j.contains("denominator")) {
            const auto d = j["denominator"].get<std::string>();
            if (d == "all") base.denominator = ChannelDenominator::All;
            else if (d == "network") base.denominator = ChannelDenominator::NetworkOnly;
            else throw std::invalid_argument("denominator must be 'all' or 'network'");
        }
    } catch (const nlohmann::json::exception& ex) {
        throw std::invalid_argument(std::string("config has a wrongly typed field: ") + ex.what());
    }
    return base;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("cannot open config " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ScenarioResult run_single(const ExperimentConfig& config, const AlgorithmPair& pair, OptionSet options,
                          std::uint64_t seed, Trace* trace_out) {
    const Network net = build_mesh(config.width, config.height);
    const RoutingFunction start = make_routing(net, pair.first);
    const RoutingFunction final = make_routing(net, pair.second);
    ReconfigResult run = run_reconfiguration(net, start, final, make_options(options, seed, config.checks));

    ScenarioResult r;
    r.initial = pair.first;
    r.final = pair.second;
    r.options = options;
    r.seed = seed;
    r.events = run.trace.size();
    r.violations = run.violations;
    r.completed = run.completed;
    if (run.completed) {
        auto drained = drained_channel_ratio(run.trace, net, config.denominator);
        auto halted = halted_flow_ratio(run.trace, net);
        r.drained_channels = std::move(drained.channels);
        r.drained_ratio = drained.ratio;
        r.halted_flows = std::move(halted.flows);
        r.halted_ratio = halted.ratio;
        r.raw_cond2_failures = raw_condition_failures(run.trace);
    }
    if (trace_out) *trace_out = std::move(run.trace);
    return r;
}

std::string trace_file_name(const AlgorithmPair& pair, OptionSet options, std::uint64_t seed) {
    return "trace_" + pair.first + "_" + pair.second + "_" + std::string(to_string(options)) + "_" +
           std::to_string(seed) + ".jsonl";
}

std::vector<ScenarioResult> run_sweep(const ExperimentConfig& config) {
    config.validate();
    std::optional<Network> net;
    if (config.out_dir) {
        std::filesystem::create_directories(*config.out_dir);
        net.emplace(build_mesh(config.width, config.height));
    }
    std::vector<ScenarioResult> results;
    for (const auto& pair : config.pairs) {
        for (OptionSet o : config.options) {
            for (std::uint64_t seed : config.seeds) {
                Trace trace;
                results.push_back(run_single(config, pair, o, seed, &trace));
                if (config.out_dir && config.write_traces) {
                    std::ofstream tf(*config.out_dir / trace_file_name(pair, o, seed));
                    if (!tf) throw std::runtime_error("cannot write trace file");
                    write_trace_jsonl(tf, *net, trace);
                }
            }
        }
    }
    if (config.out_dir) {
        std::ofstream csv(*config.out_dir / "results.csv");
        std::ofstream summary(*config.out_dir / "summary.csv");
        if (!csv || !summary) throw std::runtime_error("cannot write CSV output");
        write_results_csv(csv, results);
        write_summary_csv(summary, results);
    }
    return results;
}

void write_results_csv(std::ostream& os, const std::vector<ScenarioResult>& results) {
    os << "initial,final,options,seed,drained_ratio,halted_ratio,drained_count,halted_count,raw_cond2_failures,"
          "events,violations\n";
    for (const ScenarioResult& r : results)
        os << r.initial << ',' << r.final << ',' << to_string(r.options) << ',' << r.seed << ','
           << format_ratio(r.drained_ratio) << ',' << format_ratio(r.halted_ratio) << ',' << r.drained_channels.size()
           << ',' << r.halted_flows.size() << ',' << r.raw_cond2_failures << ',' << r.events << ','
           << r.violations.size() << '\n';
}

void write_summary_csv(std::ostream& os, const std::vector<ScenarioResult>& results) {
    struct Acc {
        double sum[2][2]{};  // [metric][baseline=0, exploit=1]
        int n[2]{};
    };
    std::map<AlgorithmPair, Acc> acc;
    std::vector<AlgorithmPair> order;
    for (const ScenarioResult& r : results) {
        int slot = r.options == OptionSet::Baseline ? 0 : r.options == OptionSet::Both ? 1 : -1;
        if (slot < 0) continue;
        const AlgorithmPair key{r.initial, r.final};
        if (!acc.contains(key)) order.push_back(key);
        Acc& a = acc[key];
        a.sum[0][slot] += r.drained_ratio;
        a.sum[1][slot] += r.halted_ratio;
        ++a.n[slot];
    }
    os << "metric,initial,final,baseline,exploit,relative\n";
    const char* names[2] = {"drained", "halted"};
    for (int m = 0; m < 2; ++m) {
        for (const AlgorithmPair& key : order) {
            const Acc& a = acc.at(key);
            const double base = a.n[0] ? a.sum[m][0] / a.n[0] : 0.0;
            const double expl = a.n[1] ? a.sum[m][1] / a.n[1] : 0.0;
            os << names[m] << ',' << key.first << ',' << key.second << ',';
            os << (a.n[0] ? format_ratio(base) : "") << ',' << (a.n[1] ? format_ratio(expl) : "") << ',';
            if (a.n[0] && a.n[1] && base > 0.0) os << format_ratio(expl / base);
            os << '\n';
        }
    }
}

}  // namespace upr
