#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "upr/routing.hpp"
#include "upr/tcdg.hpp"
#include "upr/topology.hpp"
#include "upr/trace.hpp"

namespace upr {

enum class InvariantChecks : std::uint8_t { Off, Final, EveryEvent };

struct ReconfigOptions {
    bool exploit_conformability{false};
    bool exploit_compatibility{false};
    std::uint64_t scheduler_seed{1};
    InvariantChecks invariant_checks{InvariantChecks::Final};
    /// Refuse intermediate-function extensions towards predecessors in the
    /// union of the intermediate and final graphs. Disabling it is only
    /// meant for regression harnesses.
    bool union_predecessor_check{true};
    /// Postpone a restoration that would close a cycle until the ghost arcs
    /// involved are gone.
    bool defer_cyclic_restoration{true};
    /// Hard cap on scheduled actions; exceeded means a livelock bug.
    std::uint64_t max_actions{5'000'000};

    static ReconfigOptions baseline() { return {}; }
    static ReconfigOptions both_exploits() {
        ReconfigOptions o;
        o.exploit_conformability = true;
        o.exploit_compatibility = true;
        return o;
    }
};

enum class PhaseKind : std::uint8_t { NotUpgraded, Ready, AwaitingRemovals, Upgraded };

struct ChannelPhase {
    PhaseKind kind{PhaseKind::NotUpgraded};
    std::vector<Dependency> pending;  // only for AwaitingRemovals
};

struct RemovalRequest {
    std::uint64_t id{0};
    ChannelIndex requester{};
    Dependency dep{};  // dep.dst == requester
};

struct StepCondition {
    CheckOutcome outcome{CheckOutcome::Satisfied};
    std::vector<NodeId> offending;
};

/// A broken safety condition. `condition` 1..4 numbers the four sufficient
/// conditions for deadlock-free reconfiguration (connectivity, acyclicity,
/// justified removal, provisioned upgrade); 0 is internal state corruption.
struct Violation {
    int condition{0};
    std::uint64_t timestamp{0};
    std::string message;
};

/// Live state of one reconfiguration from R_S to R_F. Every public mutator
/// is one atomic event: it appends trace events and then settles follow-up
/// bookkeeping (drain completion, acknowledgements, ghost removal, deferred
/// restorations) before returning.
class Reconfiguration {
public:
    /// Throws std::invalid_argument when either function is disconnected or
    /// has a cyclic dependency graph.
    Reconfiguration(const Network& net, const RoutingFunction& start, const RoutingFunction& final,
                    ReconfigOptions opts);

    const Network& network() const { return *net_; }
    const ReconfigOptions& options() const { return opts_; }
    const RoutingFunction& prevailing() const { return rp_; }
    const RoutingFunction& intermediate() const { return ri_; }
    const Tcdg& start_tcdg() const { return ts_; }
    const Tcdg& prevailing_tcdg() const { return tp_; }
    const Tcdg& intermediate_tcdg() const { return ti_; }
    const Tcdg& final_tcdg() const { return tf_; }
    const ChannelPhase& phase(ChannelIndex c) const { return phases_.at(idx(c)); }
    bool upgraded(ChannelIndex c) const { return phases_.at(idx(c)).kind == PhaseKind::Upgraded; }
    const BlockedInjections& halted() const { return halted_; }
    const std::set<Dependency>& ri_removed() const { return ri_removed_; }
    std::set<Dependency> ri_added() const;
    const std::vector<RemovalRequest>& pending_requests() const { return requests_; }
    bool draining(ChannelIndex c, NodeId t) const { return drains_.contains({c, t}); }
    const Trace& trace() const { return trace_; }
    const std::vector<Violation>& recorded_violations() const { return recorded_; }

    /// Every direct successor of `c` in T_I is upgraded.
    bool order_ready(ChannelIndex c) const;
    /// (c, t) carries traffic under R_P: seeded by a non-halted injection or
    /// fed by some T_P arc.
    bool live_prevailing(ChannelIndex c, NodeId t) const;
    /// All channels upgraded and no bookkeeping left.
    bool complete() const;

    /// Condition check with sink exception. Moves NotUpgraded to Ready.
    /// Throws std::logic_error when `c` is Upgraded or AwaitingRemovals.
    StepCondition check_step_condition(ChannelIndex c);

    /// Local_{R_P}{c} := Local_{R_I}{c}. Throws std::logic_error unless the
    /// condition currently holds and `c` is order-ready.
    void apply_step_operation(ChannelIndex c);

    /// Requests removal of every T_P arc bringing an offending target into c.
    void issue_removal_requests(ChannelIndex c, const std::vector<NodeId>& offending);

    /// Resolves one request: conformability, then compatibility, then
    /// drainage (halting at injection channels). A request whose dependency
    /// already left T_P is discarded.
    void process_removal_request(const RemovalRequest& req);

    /// Extends R_I at `c` for offending targets; returns the targets that
    /// could not be covered. No-op unless compatibility is exploited.
    std::vector<NodeId> try_compatibility_upgrade(ChannelIndex c, const std::vector<NodeId>& offending);

    /// Drops T_I arcs from `c` towards non-upgraded successors when an
    /// upgraded alternative serves the same target. All-or-nothing; returns
    /// true when anything was released.
    bool try_conformability_order_release(ChannelIndex c);

    /// Restores released arcs pointing at the freshly upgraded `c`.
    void restore_ri_dependencies(ChannelIndex c);

    /// Ghost-removal propagation from a dependency that just left T_P.
    void remove_ghost_dependencies(const Dependency& removed);

    /// Current-state checks of conditions 1, 2 and 0, plus every condition 3
    /// and 4 violation recorded so far.
    std::vector<Violation> verify_lysne_conditions() const;

    /// Channels whose readiness may have changed since the last call.
    std::vector<ChannelIndex> take_wakeups();

private:
    struct Drain {
        std::set<Dependency> requested;  // arcs (c_j, x, t) awaiting drainage
    };

    ReconfigEvent& emit(EventKind kind);
    void wake(ChannelIndex c);
    /// Recomputes T_P arcs for `t`; returns the arcs that vanished.
    std::vector<Dependency> refresh_target(NodeId t);
    void emit_cascade(const std::vector<Dependency>& lost, const Dependency& cause_dep, Cause cause);
    void enqueue_request(ChannelIndex requester, const Dependency& d);
    bool condemned(const Dependency& d) const;
    std::optional<ChannelIndex> conformability_alternative(const Dependency& d) const;
    std::optional<ChannelIndex> compatibility_alternative(const Dependency& d) const;
    std::optional<std::uint32_t> remaining_hops(ChannelIndex o, NodeId t) const;
    void start_drain(const Dependency& d);
    void justify_removal(const Dependency& d, ChannelIndex c, NodeId t);
    void record(int condition, std::string message);
    void settle();
    bool sweep_ghosts();
    bool ghost_removable(const Dependency& g) const;
    void erase_ghost(const Dependency& g);
    bool try_restore(const Dependency& d);

    const Network* net_;
    ReconfigOptions opts_;
    RoutingFunction rp_, ri_, rf_;
    Tcdg ts_, tp_, ti_, tf_;
    std::vector<ChannelPhase> phases_;
    BlockedInjections halted_;
    std::set<Dependency> ri_removed_;
    std::map<Dependency, bool> ri_added_;  // value: the R_I table cell was edited
    std::vector<RemovalRequest> requests_;
    std::uint64_t next_request_id_{1};
    std::map<std::pair<ChannelIndex, NodeId>, Drain> drains_;
    std::set<Dependency> rp_retired_;
    std::vector<ChannelIndex> wakeups_;
    std::vector<char> woken_;
    Trace trace_;
    std::uint64_t clock_{0};
    std::vector<Violation> recorded_;
};

/// One scheduled visit of `c`: order release when blocked, condition check,
/// compatibility extension or removal requests, then the step operation
/// when everything holds. No-op for upgraded or waiting channels.
void run_channel_check(Reconfiguration& st, ChannelIndex c);

struct ReconfigResult {
    RoutingFunction final;
    Trace trace;
    std::vector<Violation> violations;
    std::uint64_t actions{0};
    bool completed{false};
};

/// Drives a Reconfiguration to completion with a seeded scheduler. Stops at
/// the first violation when checks run at every event.
ReconfigResult run_reconfiguration(const Network& net, const RoutingFunction& start, const RoutingFunction& final,
                                   const ReconfigOptions& opts);

std::string_view to_string(InvariantChecks c);
std::optional<InvariantChecks> parse_invariant_checks(std::string_view text);

}  // namespace upr
