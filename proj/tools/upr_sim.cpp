// upr_sim: run reconfiguration scenarios on a mesh and emit CSV and traces.
//
//   upr_sim sweep --mesh 5x5 --pairs all --options baseline,both --seeds 1-5 --out results/
//   upr_sim run --pair oe:xy --options both --seed 3 --trace oe_xy.jsonl --verbose

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "upr/experiment.hpp"
#include "upr/tcdg.hpp"

namespace {

constexpr int kExitClean = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfig = 2;

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

// "1-5", "3", "1,4,9" or a mix such as "1-3,7".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> out;
    for (const std::string& part : split(text, ',')) {
        const auto dash = part.find('-');
        try {
            if (dash == std::string::npos) {
                out.push_back(std::stoull(part));
            } else {
                const auto lo = std::stoull(part.substr(0, dash));
                const auto hi = std::stoull(part.substr(dash + 1));
                if (hi < lo) throw std::invalid_argument("");
                for (auto s = lo; s <= hi; ++s) out.push_back(s);
            }
        } catch (const std::logic_error&) {
            throw std::invalid_argument("bad seed list '" + text + "'");
        }
    }
    return out;
}

std::vector<upr::AlgorithmPair> parse_pairs(const std::string& text, bool identity) {
    if (text == "all") return upr::all_pairs(identity);
    std::vector<upr::AlgorithmPair> out;
    for (const std::string& part : split(text, ',')) {
        const auto colon = part.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("pair must be initial:final, got '" + part + "'");
        out.emplace_back(part.substr(0, colon), part.substr(colon + 1));
    }
    return out;
}

std::vector<upr::OptionSet> parse_options(const std::string& text) {
    std::vector<upr::OptionSet> out;
    for (const std::string& part : split(text, ',')) {
        auto o = upr::parse_option_set(part);
        if (!o) throw std::invalid_argument("unknown option set '" + part + "'");
        out.push_back(*o);
    }
    return out;
}

struct Flags {
    std::string config;
    std::string mesh;
    std::string pairs;
    std::string options;
    std::string seeds;
    std::string check;
    std::string out;
    bool traces{false};
    bool identity{false};
    bool network_only{false};
};

upr::ExperimentConfig build_config(const Flags& f) {
    upr::ExperimentConfig cfg;
    if (!f.config.empty()) cfg = upr::load_config(f.config);
    if (f.identity) cfg.allow_identity = true;
    if (!f.mesh.empty()) {
        std::string json = "{\"mesh\":\"" + f.mesh + "\"}";
        cfg = upr::parse_config(json, cfg);
    }
    if (!f.pairs.empty()) cfg.pairs = parse_pairs(f.pairs, cfg.allow_identity);
    if (!f.options.empty()) cfg.options = parse_options(f.options);
    if (!f.seeds.empty()) cfg.seeds = parse_seeds(f.seeds);
    if (!f.check.empty()) {
        auto c = upr::parse_invariant_checks(f.check);
        if (!c) throw std::invalid_argument("check must be off, final or every-event");
        cfg.checks = *c;
    }
    if (!f.out.empty()) cfg.out_dir = f.out;
    if (f.traces) cfg.write_traces = true;
    if (f.network_only) cfg.denominator = upr::ChannelDenominator::NetworkOnly;
    cfg.validate();
    return cfg;
}

void report_violations(const upr::ScenarioResult& r) {
    for (const auto& v : r.violations)
        std::cerr << r.initial << "->" << r.final << " " << upr::to_string(r.options) << " seed " << r.seed
                  << ": condition " << v.condition << " at t=" << v.timestamp << ": " << v.message << '\n';
}

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "JSON experiment config; flags override it");
    cmd->add_option("--mesh", f.mesh, "mesh size WxH (default 5x5)");
    cmd->add_option("--options", f.options, "comma list of baseline,conformability,compatibility,both");
    cmd->add_option("--check", f.check, "invariant checks: off, final, every-event");
    cmd->add_flag("--identity", f.identity, "allow identity pairs such as xy:xy");
    cmd->add_flag("--network-only", f.network_only, "drained ratio over network channels only");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Upstream progressive reconfiguration simulator"};
    app.require_subcommand(1);

    Flags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "run every (pair, options, seed) cell and write CSV");
    add_common(sweep, sweep_flags);
    sweep->add_option("--pairs", sweep_flags.pairs, "'all' or comma list of initial:final");
    sweep->add_option("--seeds", sweep_flags.seeds, "seed list, e.g. 1-5 or 1,3,7");
    sweep->add_option("--out", sweep_flags.out, "output directory for results.csv and summary.csv");
    sweep->add_flag("--trace", sweep_flags.traces, "also write one JSONL trace per run");

    Flags run_flags;
    std::string pair_text;
    std::uint64_t seed = 1;
    std::string trace_path;
    bool verbose = false;
    bool dump_tcdg = false;
    auto* run = app.add_subcommand("run", "run one scenario and print its metrics");
    add_common(run, run_flags);
    run->add_option("--pair", pair_text, "initial:final")->required();
    run->add_option("--seed", seed, "scheduler seed");
    run->add_option("--trace", trace_path, "write the JSONL trace to this file");
    run->add_flag("--verbose", verbose, "print every event");
    run->add_flag("--dump-tcdg", dump_tcdg, "print the starting and final TCDG edge lists");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitClean : kExitConfig;
    }

    try {
        if (*sweep) {
            const upr::ExperimentConfig cfg = build_config(sweep_flags);
            const auto results = upr::run_sweep(cfg);
            if (!cfg.out_dir) upr::write_results_csv(std::cout, results);
            bool clean = true;
            for (const auto& r : results) {
                if (!r.violations.empty() || !r.completed) clean = false;
                report_violations(r);
            }
            return clean ? kExitClean : kExitViolation;
        }

        run_flags.pairs = pair_text;
        upr::ExperimentConfig cfg = build_config(run_flags);
        if (cfg.pairs.size() != 1) throw std::invalid_argument("run takes exactly one pair");
        const upr::OptionSet options = cfg.options.size() == 1 ? cfg.options.front() : upr::OptionSet::Both;
        upr::Trace trace;
        const upr::ScenarioResult r = upr::run_single(cfg, cfg.pairs.front(), options, seed, &trace);
        const upr::Network net = upr::build_mesh(cfg.width, cfg.height);
        if (verbose)
            for (const auto& e : trace) std::cout << upr::event_to_json(net, e) << '\n';
        if (dump_tcdg) {
            std::cout << "# starting TCDG\n";
            upr::write_edge_list(std::cout, net, upr::build_tcdg(net, upr::make_routing(net, r.initial)));
            std::cout << "# final TCDG\n";
            upr::write_edge_list(std::cout, net, upr::build_tcdg(net, upr::make_routing(net, r.final)));
        }
        if (!trace_path.empty()) {
            std::ofstream tf(trace_path);
            if (!tf) throw std::runtime_error("cannot write " + trace_path);
            upr::write_trace_jsonl(tf, net, trace);
        }
        upr::write_results_csv(std::cout, {r});
        report_violations(r);
        return r.violations.empty() && r.completed ? kExitClean : kExitViolation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "upr_sim: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "upr_sim: " << e.what() << '\n';
        return kExitConfig;
    }
}
