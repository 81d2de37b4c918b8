#include "upr/trace.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace upr {

namespace {

using nlohmann::ordered_json;

constexpr std::string_view kEventNames[] = {"ConditionCheck",  "Upgrade",          "RemovalRequested",
                                            "DependencyRemoved", "DependencyAdded", "InjectionHalted",
                                            "InjectionResumed", "RiRestored",       "GhostRemoved"};
constexpr std::string_view kGraphNames[] = {"none", "P", "I"};
constexpr std::string_view kCauseNames[] = {"none",     "conformability", "compatibility",
                                            "drainage", "halting",        "order-release"};
constexpr std::string_view kOutcomeNames[] = {"satisfied", "sink-exception", "offending"};

template <typename E, std::size_t N>
E parse_enum(const std::string& text, const std::string_view (&names)[N], const char* what) {
    for (std::size_t i = 0; i < N; ++i)
        if (names[i] == text) return static_cast<E>(i);
    throw std::invalid_argument(std::string("unknown ") + what + " '" + text + "'");
}

NodeId parse_node(const std::string& text) {
    if (text.size() < 2 || (text[0] != 'P' && text[0] != 'R'))
        throw std::invalid_argument("malformed node name '" + text + "'");
    std::uint32_t index = 0;
    auto [ptr, ec] = std::from_chars(text.data() + 1, text.data() + text.size(), index);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw std::invalid_argument("malformed node name '" + text + "'");
    return text[0] == 'P' ? processing_node(index) : router_node(index);
}

ChannelIndex parse_channel_name(const Network& net, const std::string& text) {
    auto c = net.parse_channel(text);
    if (!c) throw std::invalid_argument("unknown channel '" + text + "'");
    return *c;
}

ordered_json to_json(const Network& net, const ReconfigEvent& e) {
    ordered_json j;
    j["t"] = e.timestamp;
    j["kind"] = to_string(e.kind);
    if (e.channel) j["channel"] = net.name(*e.channel);
    if (e.dep)
        j["dep"] = {{"src", net.name(e.dep->src)}, {"dst", net.name(e.dep->dst)}, {"target", net.name(e.dep->target)}};
    if (e.graph != GraphTag::None) j["graph"] = to_string(e.graph);
    if (e.cause != Cause::None) j["cause"] = to_string(e.cause);
    if (e.outcome) j["outcome"] = to_string(*e.outcome);
    if (!e.targets.empty()) {
        ordered_json ts = ordered_json::array();
        for (NodeId t : e.targets) ts.push_back(net.name(t));
        j["targets"] = std::move(ts);
    }
    if (e.flow) j["flow"] = {net.name(e.flow->first), net.name(e.flow->second)};
    if (e.cascade) j["cascade"] = true;
    return j;
}

}  // namespace

std::string_view to_string(EventKind k) { return kEventNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(GraphTag g) { return kGraphNames[static_cast<std::size_t>(g)]; }
std::string_view to_string(Cause c) { return kCauseNames[static_cast<std::size_t>(c)]; }
std::string_view to_string(CheckOutcome o) { return kOutcomeNames[static_cast<std::size_t>(o)]; }

std::string event_to_json(const Network& net, const ReconfigEvent& e) { return to_json(net, e).dump(); }

void write_trace_jsonl(std::ostream& os, const Network& net, const Trace& trace) {
    for (const ReconfigEvent& e : trace) os << event_to_json(net, e) << '\n';
}

Trace read_trace_jsonl(std::istream& is, const Network& net) {
    Trace trace;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& ex) {
            throw std::invalid_argument(std::string("malformed trace line: ") + ex.what());
        }
        try {
            ReconfigEvent e;
            e.timestamp = j.at("t").get<std::uint64_t>();
            e.kind = parse_enum<EventKind>(j.at("kind").get<std::string>(), kEventNames, "event kind");
            if (j.contains("channel")) e.channel = parse_channel_name(net, j["channel"].get<std::string>());
            if (j.contains("dep")) {
                const auto& d = j["dep"];
                e.dep = Dependency{parse_channel_name(net, d.at("src").get<std::string>()),
                                   parse_channel_name(net, d.at("dst").get<std::string>()),
                                   parse_node(d.at("target").get<std::string>())};
            }
            if (j.contains("graph")) e.graph = parse_enum<GraphTag>(j["graph"].get<std::string>(), kGraphNames, "graph");
            if (j.contains("cause")) e.cause = parse_enum<Cause>(j["cause"].get<std::string>(), kCauseNames, "cause");
            if (j.contains("outcome"))
                e.outcome = parse_enum<CheckOutcome>(j["outcome"].get<std::string>(), kOutcomeNames, "outcome");
            if (j.contains("targets"))
                for (const auto& t : j["targets"]) e.targets.push_back(parse_node(t.get<std::string>()));
            if (j.contains("flow"))
                e.flow = Flow{parse_node(j["flow"].at(0).get<std::string>()),
                              parse_node(j["flow"].at(1).get<std::string>())};
            if (j.contains("cascade")) e.cascade = j["cascade"].get<bool>();
            trace.push_back(std::move(e));
        } catch (const nlohmann::json::exception& ex) {
            throw std::invalid_argument(std::string("malformed trace event: ") + ex.what());
        }
    }
    return trace;
}

RoutingFunction replay_trace(const Network& net, const RoutingFunction& start, const RoutingFunction& final,
                             const Trace& trace) {
    RoutingFunction rp = start;
    RoutingFunction ri = final;
    std::vector<char> upgraded(net.channel_count(), 0);
    std::set<Dependency> table_edits;  // ghosts that created their R_I choice
    auto need_dep = [](const ReconfigEvent& e) -> const Dependency& {
        if (!e.dep) throw std::invalid_argument("trace event without dependency");
        return *e.dep;
    };
    for (const ReconfigEvent& e : trace) {
        switch (e.kind) {
            case EventKind::Upgrade:
                if (!e.channel) throw std::invalid_argument("upgrade without channel");
                upgraded[idx(*e.channel)] = 1;
                if (net.channel_class(*e.channel) != ChannelClass::Delivery) rp.assign_local(ri.local(*e.channel));
                break;
            case EventKind::DependencyAdded: {
                const Dependency& d = need_dep(e);
                if (e.graph == GraphTag::Prevailing) {
                    rp.add_choice(d.src, d.target, d.dst);
                } else if (ri.add_choice(d.src, d.target, d.dst)) {
                    table_edits.insert(d);
                }
                break;
            }
            case EventKind::DependencyRemoved: {
                const Dependency& d = need_dep(e);
                if (e.cascade || e.cause == Cause::Drainage) break;
                if (e.graph == GraphTag::Intermediate)
                    ri.remove_choice(d.src, d.target, d.dst);
                else
                    rp.remove_choice(d.src, d.target, d.dst);
                break;
            }
            case EventKind::RiRestored: {
                const Dependency& d = need_dep(e);
                ri.add_choice(d.src, d.target, d.dst);
                if (upgraded[idx(d.src)]) rp.add_choice(d.src, d.target, d.dst);
                break;
            }
            case EventKind::GhostRemoved: {
                const Dependency& d = need_dep(e);
                if (table_edits.erase(d)) {
                    ri.remove_choice(d.src, d.target, d.dst);
                    if (upgraded[idx(d.src)]) rp.remove_choice(d.src, d.target, d.dst);
                }
                break;
            }
            default:
                break;
        }
    }
    return rp;
}

}  // namespace upr
