#include "upr/reconfiguration.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <stdexcept>
#include <tuple>

namespace upr {

namespace {

bool includes_all(const std::vector<NodeId>& have, const std::vector<NodeId>& need) {
    return std::includes(have.begin(), have.end(), need.begin(), need.end());
}

std::vector<NodeId> difference(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
    std::vector<NodeId> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace

Reconfiguration::Reconfiguration(const Network& net, const RoutingFunction& start, const RoutingFunction& final,
                                 ReconfigOptions opts)
    : net_(&net), opts_(opts), rp_(start), ri_(final), rf_(final) {
    if (!is_connected(start, net)) throw std::invalid_argument("starting routing function is not connected");
    if (!is_connected(final, net)) throw std::invalid_argument("final routing function is not connected");
    ts_ = build_tcdg(net, start);
    tf_ = build_tcdg(net, final);
    if (!projection_acyclic(ts_)) throw std::invalid_argument("starting routing function has a cyclic TCDG");
    if (!projection_acyclic(tf_)) throw std::invalid_argument("final routing function has a cyclic TCDG");
    tp_ = ts_;
    ti_ = tf_;
    phases_.resize(net.channel_count());
    woken_.assign(net.channel_count(), 0);
}

std::set<Dependency> Reconfiguration::ri_added() const {
    std::set<Dependency> s;
    for (const auto& [d, table] : ri_added_) s.insert(d);
    return s;
}

ReconfigEvent& Reconfiguration::emit(EventKind kind) {
    ReconfigEvent& e = trace_.emplace_back();
    e.timestamp = ++clock_;
    e.kind = kind;
    return e;
}

void Reconfiguration::wake(ChannelIndex c) {
    if (upgraded(c) || woken_[idx(c)]) return;
    woken_[idx(c)] = 1;
    wakeups_.push_back(c);
}

std::vector<ChannelIndex> Reconfiguration::take_wakeups() {
    std::vector<ChannelIndex> out;
    out.swap(wakeups_);
    for (ChannelIndex c : out) woken_[idx(c)] = 0;
    return out;
}

void Reconfiguration::record(int condition, std::string message) {
    recorded_.push_back({condition, clock_, std::move(message)});
}

std::vector<Dependency> Reconfiguration::refresh_target(NodeId t) {
    std::vector<Dependency> before;
    for (std::size_t i = 0; i < tp_.channel_count(); ++i)
        for (const Dependency& d : tp_.out_deps(channel_at(i)))
            if (d.target == t) before.push_back(d);
    rebuild_target(tp_, *net_, rp_, t, halted_);
    std::vector<Dependency> lost;
    for (const Dependency& d : before)
        if (!tp_.contains(d)) lost.push_back(d);
    return lost;
}

void Reconfiguration::emit_cascade(const std::vector<Dependency>& lost, const Dependency& cause_dep, Cause cause) {
    for (const Dependency& d : lost) {
        if (d == cause_dep) continue;
        ReconfigEvent& e = emit(EventKind::DependencyRemoved);
        e.channel = d.src;
        e.dep = d;
        e.graph = GraphTag::Prevailing;
        e.cause = cause;
        e.cascade = true;
    }
}

bool Reconfiguration::order_ready(ChannelIndex c) const {
    const auto deps = ti_.out_deps(c);
    return std::all_of(deps.begin(), deps.end(), [&](const Dependency& d) { return upgraded(d.dst); });
}

bool Reconfiguration::live_prevailing(ChannelIndex c, NodeId t) const {
    if (net_->channel_class(c) == ChannelClass::Injection)
        return net_->channel(c).src != t && !halted_.contains({c, t});
    return tp_.has_in_target(c, t);
}

bool Reconfiguration::complete() const {
    const bool all = std::all_of(phases_.begin(), phases_.end(),
                                 [](const ChannelPhase& p) { return p.kind == PhaseKind::Upgraded; });
    return all && requests_.empty() && drains_.empty() && ri_removed_.empty() && ri_added_.empty() &&
           halted_.empty();
}

// ---- step condition and operation ---------------------------------------

StepCondition Reconfiguration::check_step_condition(ChannelIndex c) {
    ChannelPhase& ph = phases_.at(idx(c));
    if (ph.kind == PhaseKind::Upgraded || ph.kind == PhaseKind::AwaitingRemovals)
        throw std::logic_error("condition check on " + net_->name(c) + " out of phase");
    ph.kind = PhaseKind::Ready;

    StepCondition result;
    const auto in = tp_.in_targets(c);
    const auto out = ti_.out_targets(c);
    if (includes_all(out, in)) {
        result.outcome = CheckOutcome::Satisfied;
    } else if (ti_.out_deps(c).empty() && !ti_.in_deps(c).empty()) {
        result.outcome = CheckOutcome::SinkException;
    } else {
        result.outcome = CheckOutcome::Offending;
        result.offending = difference(in, out);
    }
    ReconfigEvent& e = emit(EventKind::ConditionCheck);
    e.channel = c;
    e.outcome = result.outcome;
    e.targets = result.offending;
    return result;
}

void Reconfiguration::apply_step_operation(ChannelIndex c) {
    const ChannelPhase& ph = phases_.at(idx(c));
    if (ph.kind == PhaseKind::Upgraded || ph.kind == PhaseKind::AwaitingRemovals)
        throw std::logic_error("step operation on " + net_->name(c) + " out of phase");
    if (!order_ready(c)) throw std::logic_error("step operation on " + net_->name(c) + " violates the order");
    const auto in = tp_.in_targets(c);
    const bool sink = ti_.out_deps(c).empty() && !ti_.in_deps(c).empty();
    if (!sink && !includes_all(ti_.out_targets(c), in))
        throw std::logic_error("step operation on " + net_->name(c) + " without a satisfied condition");

    const bool routable = net_->channel_class(c) != ChannelClass::Delivery;
    if (routable) {
        for (NodeId t : net_->processing_nodes()) {
            if (!live_prevailing(c, t)) continue;
            const ChannelSet& outs = ri_.route(c, t);
            if (outs.empty())
                record(4, "upgrade of " + net_->name(c) + " leaves " + net_->name(t) + " without a route");
            for (ChannelIndex o : outs)
                if (!upgraded(o))
                    record(4, "upgrade of " + net_->name(c) + " routes " + net_->name(t) + " to non-upgraded " +
                                  net_->name(o));
        }
    }

    std::vector<NodeId> changed;
    if (routable) {
        const LocalRoutingFunction before = rp_.local(c);
        const LocalRoutingFunction after = ri_.local(c);
        for (NodeId t : net_->processing_nodes()) {
            auto b = before.choices.find(t);
            auto a = after.choices.find(t);
            const bool same = (b == before.choices.end()) == (a == after.choices.end()) &&
                              (b == before.choices.end() || b->second == a->second);
            if (!same) changed.push_back(t);
        }
        rp_.assign_local(after);
    }
    phases_[idx(c)] = {PhaseKind::Upgraded, {}};
    emit(EventKind::Upgrade).channel = c;
    for (NodeId t : changed) refresh_target(t);

    if (net_->channel_class(c) == ChannelClass::Injection) {
        std::vector<NodeId> resumed;
        for (const auto& [inj, t] : halted_)
            if (inj == c && !ri_.route(c, t).empty()) resumed.push_back(t);
        for (NodeId t : resumed) {
            halted_.erase({c, t});
            refresh_target(t);
            ReconfigEvent& e = emit(EventKind::InjectionResumed);
            e.channel = c;
            e.flow = Flow{net_->channel(c).src, t};
        }
    }

    restore_ri_dependencies(c);
    for (const Dependency& d : ti_.in_deps(c)) wake(d.src);
    settle();
}

// ---- removal requests ----------------------------------------------------

void Reconfiguration::enqueue_request(ChannelIndex requester, const Dependency& d) {
    for (const RemovalRequest& r : requests_)
        if (r.requester == requester && r.dep == d) return;
    requests_.push_back({next_request_id_++, requester, d});
    ReconfigEvent& e = emit(EventKind::RemovalRequested);
    e.channel = requester;
    e.dep = d;
    e.graph = GraphTag::Prevailing;
}

void Reconfiguration::issue_removal_requests(ChannelIndex c, const std::vector<NodeId>& offending) {
    ChannelPhase& ph = phases_.at(idx(c));
    if (ph.kind == PhaseKind::Upgraded) throw std::logic_error("removal requests from upgraded " + net_->name(c));
    std::vector<Dependency> pending;
    const std::vector<Dependency> in(tp_.in_deps(c).begin(), tp_.in_deps(c).end());
    for (const Dependency& d : in) {
        if (!std::binary_search(offending.begin(), offending.end(), d.target)) continue;
        pending.push_back(d);
        enqueue_request(c, d);
    }
    if (pending.empty()) {
        ph.kind = PhaseKind::Ready;
        wake(c);
    } else {
        ph = {PhaseKind::AwaitingRemovals, std::move(pending)};
    }
    settle();
}

bool Reconfiguration::condemned(const Dependency& d) const {
    if (drains_.contains({d.src, d.target})) return true;
    return std::any_of(requests_.begin(), requests_.end(), [&](const RemovalRequest& r) { return r.dep == d; });
}

std::optional<std::uint32_t> Reconfiguration::remaining_hops(ChannelIndex o, NodeId t) const {
    const ChannelId& ch = net_->channel(o);
    if (net_->channel_class(o) == ChannelClass::Delivery) {
        if (ch.dst != t) return std::nullopt;
        return 0;
    }
    const auto h = net_->hop_distance(ch.dst, net_->attached_router(t));
    if (!h) return std::nullopt;
    return *h + 1;
}

std::optional<ChannelIndex> Reconfiguration::conformability_alternative(const Dependency& d) const {
    std::optional<ChannelIndex> best;
    std::uint32_t best_hops = 0;
    for (const Dependency& alt : tp_.out_deps(d.src)) {
        if (alt.target != d.target || alt.dst == d.dst) continue;
        if (condemned(alt) || drains_.contains({alt.dst, d.target})) continue;
        const std::uint32_t h = remaining_hops(alt.dst, d.target).value_or(UINT32_MAX);
        if (!best || h < best_hops) {
            best = alt.dst;
            best_hops = h;
        }
    }
    return best;
}

std::optional<ChannelIndex> Reconfiguration::compatibility_alternative(const Dependency& d) const {
    const ChannelIndex cj = d.src;
    const NodeId t = d.target;
    const ChannelGraph graph(tp_);
    std::optional<ChannelIndex> best;
    std::uint32_t best_hops = 0;
    for (ChannelIndex o : net_->output_channels(net_->channel(cj).dst)) {
        if (o == d.dst || net_->channel(o).lane != net_->channel(cj).lane) continue;
        if (rp_retired_.contains({cj, o, t})) continue;
        const auto hops = remaining_hops(o, t);
        if (!hops) continue;
        if (net_->channel_class(o) != ChannelClass::Delivery) {
            if (!live_prevailing(o, t) || !tp_.has_out_target(o, t)) continue;
            if (!upgraded(o) && !ti_.has_out_target(o, t)) continue;
            if (drains_.contains({o, t})) continue;
            if (graph.reaches(o, cj)) continue;
        }
        if (!best || *hops < best_hops) {
            best = o;
            best_hops = *hops;
        }
    }
    return best;
}

void Reconfiguration::justify_removal(const Dependency& d, ChannelIndex c, NodeId t) {
    if (live_prevailing(c, t) && !tp_.has_out_target(c, t))
        record(3, "removal of " + net_->name(d.src) + "->" + net_->name(d.dst) + " [" + net_->name(t) +
                      "] left no alternative");
}

void Reconfiguration::start_drain(const Dependency& d) {
    const ChannelIndex cj = d.src;
    const NodeId t = d.target;
    drains_[{cj, t}].requested.insert(d);
    const std::vector<Dependency> feeders(tp_.in_deps(cj).begin(), tp_.in_deps(cj).end());
    for (const Dependency& f : feeders)
        if (f.target == t && !condemned(f)) enqueue_request(cj, f);
}

void Reconfiguration::process_removal_request(const RemovalRequest& req) {
    auto it = std::find_if(requests_.begin(), requests_.end(),
                           [&](const RemovalRequest& r) { return r.id == req.id; });
    if (it != requests_.end()) requests_.erase(it);

    const Dependency d = req.dep;
    if (d.dst != req.requester) throw std::invalid_argument("malformed removal request");
    if (!tp_.contains(d)) {
        settle();
        return;
    }
    const ChannelIndex cj = d.src;
    const NodeId t = d.target;
    if (upgraded(cj))
        record(0, "removal request reached upgraded " + net_->name(cj));

    if (auto drain = drains_.find({cj, t}); drain != drains_.end()) {
        drain->second.requested.insert(d);
        settle();
        return;
    }

    if (opts_.exploit_conformability && conformability_alternative(d)) {
        rp_.remove_choice(cj, t, d.dst);
        rp_retired_.insert(d);
        const auto lost = refresh_target(t);
        ReconfigEvent& e = emit(EventKind::DependencyRemoved);
        e.channel = req.requester;
        e.dep = d;
        e.graph = GraphTag::Prevailing;
        e.cause = Cause::Conformability;
        emit_cascade(lost, d, Cause::Conformability);
        justify_removal(d, cj, t);
        settle();
        return;
    }

    if (opts_.exploit_compatibility) {
        if (auto alt = compatibility_alternative(d)) {
            rp_.add_choice(cj, t, *alt);
            ReconfigEvent& add = emit(EventKind::DependencyAdded);
            add.channel = req.requester;
            add.dep = Dependency{cj, *alt, t};
            add.graph = GraphTag::Prevailing;
            add.cause = Cause::Compatibility;
            rp_.remove_choice(cj, t, d.dst);
            rp_retired_.insert(d);
            const auto lost = refresh_target(t);
            ReconfigEvent& rem = emit(EventKind::DependencyRemoved);
            rem.channel = req.requester;
            rem.dep = d;
            rem.graph = GraphTag::Prevailing;
            rem.cause = Cause::Compatibility;
            emit_cascade(lost, d, Cause::Compatibility);
            justify_removal(d, cj, t);
            settle();
            return;
        }
    }

    if (net_->channel_class(cj) == ChannelClass::Injection) {
        // Injection of t stops through this choice only; the flow is halted
        // once no choice is left at the source.
        rp_.remove_choice(cj, t, d.dst);
        const bool halt = rp_.route(cj, t).empty();
        if (halt) halted_.insert({cj, t});
        const auto lost = refresh_target(t);
        if (halt) {
            ReconfigEvent& h = emit(EventKind::InjectionHalted);
            h.channel = cj;
            h.flow = Flow{net_->channel(cj).src, t};
        }
        ReconfigEvent& rem = emit(EventKind::DependencyRemoved);
        rem.channel = req.requester;
        rem.dep = d;
        rem.graph = GraphTag::Prevailing;
        rem.cause = Cause::Halting;
        emit_cascade(lost, d, Cause::Halting);
        settle();
        return;
    }

    start_drain(d);
    settle();
}

// ---- intermediate function edits ----------------------------------------

std::vector<NodeId> Reconfiguration::try_compatibility_upgrade(ChannelIndex c, const std::vector<NodeId>& offending) {
    if (!opts_.exploit_compatibility || net_->channel_class(c) == ChannelClass::Delivery) return offending;
    ChannelGraph graph = opts_.union_predecessor_check ? ChannelGraph(ti_, tf_) : ChannelGraph(ti_);
    auto provides = [&](ChannelIndex o, NodeId t) {
        if (net_->channel_class(o) == ChannelClass::Delivery) return net_->channel(o).dst == t;
        return ti_.has_out_target(o, t) && !graph.reaches(o, c);
    };
    auto add_ghost = [&](const Dependency& d, bool table_edit) {
        if (table_edit) ri_.add_choice(d.src, d.target, d.dst);
        ti_.add(d);
        ri_added_[d] = table_edit;
        graph.add_arc(d.src, d.dst);
        ReconfigEvent& e = emit(EventKind::DependencyAdded);
        e.channel = c;
        e.dep = d;
        e.graph = GraphTag::Intermediate;
        e.cause = Cause::Compatibility;
    };

    std::vector<NodeId> uncovered;
    for (NodeId t : offending) {
        const ChannelSet existing = ri_.route(c, t);
        if (!existing.empty()) {
            // A dormant table cell becomes live as a whole, so every choice
            // already in it must qualify.
            if (std::all_of(existing.begin(), existing.end(), [&](ChannelIndex o) { return provides(o, t); })) {
                for (ChannelIndex o : existing) add_ghost({c, o, t}, false);
            } else {
                uncovered.push_back(t);
            }
            continue;
        }
        std::optional<ChannelIndex> best;
        std::tuple<bool, std::uint32_t> best_key{};
        for (ChannelIndex o : net_->output_channels(net_->channel(c).dst)) {
            if (net_->channel(o).lane != net_->channel(c).lane) continue;
            const auto hops = remaining_hops(o, t);
            if (!hops || !provides(o, t)) continue;
            const std::tuple<bool, std::uint32_t> key{!upgraded(o), *hops};
            if (!best || key < best_key) {
                best = o;
                best_key = key;
            }
        }
        if (best)
            add_ghost({c, *best, t}, true);
        else
            uncovered.push_back(t);
    }
    return uncovered;
}

bool Reconfiguration::try_conformability_order_release(ChannelIndex c) {
    if (!opts_.exploit_conformability || upgraded(c)) return false;
    if (phases_.at(idx(c)).kind == PhaseKind::AwaitingRemovals) return false;
    std::vector<Dependency> release;
    const auto out = ti_.out_deps(c);
    for (const Dependency& d : out) {
        if (upgraded(d.dst)) continue;
        if (ri_added_.contains(d)) return false;
        const bool alternative = std::any_of(out.begin(), out.end(), [&](const Dependency& a) {
            return a.target == d.target && upgraded(a.dst) && !ri_added_.contains(a);
        });
        if (!alternative) return false;
        release.push_back(d);
    }
    if (release.empty()) return false;
    for (const Dependency& d : release) {
        ri_.remove_choice(d.src, d.target, d.dst);
        ti_.remove(d);
        ri_removed_.insert(d);
        ReconfigEvent& e = emit(EventKind::DependencyRemoved);
        e.channel = c;
        e.dep = d;
        e.graph = GraphTag::Intermediate;
        e.cause = Cause::OrderRelease;
    }
    wake(c);
    settle();
    return true;
}

bool Reconfiguration::try_restore(const Dependency& d) {
    if (!upgraded(d.dst) || !ri_removed_.contains(d)) return false;
    if (opts_.defer_cyclic_restoration && ChannelGraph(ti_).reaches(d.dst, d.src)) return false;
    ri_removed_.erase(d);
    ri_.add_choice(d.src, d.target, d.dst);
    ti_.add(d);
    ReconfigEvent& e = emit(EventKind::RiRestored);
    e.channel = d.src;
    e.dep = d;
    e.graph = GraphTag::Intermediate;
    if (upgraded(d.src)) {
        rp_.add_choice(d.src, d.target, d.dst);
        refresh_target(d.target);
    }
    return true;
}

void Reconfiguration::restore_ri_dependencies(ChannelIndex c) {
    std::vector<Dependency> todo;
    for (const Dependency& d : ri_removed_)
        if (d.dst == c) todo.push_back(d);
    for (const Dependency& d : todo) try_restore(d);
}

bool Reconfiguration::ghost_removable(const Dependency& g) const {
    return !live_prevailing(g.src, g.target) && !ti_.has_in_target(g.src, g.target);
}

void Reconfiguration::erase_ghost(const Dependency& g) {
    const bool table_edit = ri_added_.at(g);
    ri_added_.erase(g);
    ti_.remove(g);
    if (table_edit) {
        ri_.remove_choice(g.src, g.target, g.dst);
        if (upgraded(g.src)) {
            rp_.remove_choice(g.src, g.target, g.dst);
            refresh_target(g.target);
        }
    }
    ReconfigEvent& e = emit(EventKind::GhostRemoved);
    e.channel = g.src;
    e.dep = g;
    e.graph = GraphTag::Intermediate;
    wake(g.src);
}

void Reconfiguration::remove_ghost_dependencies(const Dependency& removed) {
    const ChannelIndex c = removed.dst;
    const NodeId t = removed.target;
    std::vector<Dependency> ghosts;
    for (const auto& [g, table] : ri_added_)
        if (g.src == c && g.target == t) ghosts.push_back(g);
    if (ghosts.empty() || !ghost_removable(ghosts.front())) return;
    for (const Dependency& g : ghosts) erase_ghost(g);
    for (const Dependency& g : ghosts) remove_ghost_dependencies(g);
}

bool Reconfiguration::sweep_ghosts() {
    bool any = false;
    for (bool again = true; again;) {
        again = false;
        std::vector<Dependency> doomed;
        for (const auto& [g, table] : ri_added_)
            if (ghost_removable(g)) doomed.push_back(g);
        for (const Dependency& g : doomed) erase_ghost(g);
        again = !doomed.empty();
        any = any || again;
    }
    return any;
}

// ---- settlement ------------------------------------------------------------

void Reconfiguration::settle() {
    for (bool again = true; again;) {
        again = false;

        for (auto it = drains_.begin(); it != drains_.end();) {
            const auto [cj, t] = it->first;
            if (!live_prevailing(cj, t)) {
                for (const Dependency& r : it->second.requested) {
                    ReconfigEvent& e = emit(EventKind::DependencyRemoved);
                    e.channel = r.dst;
                    e.dep = r;
                    e.graph = GraphTag::Prevailing;
                    e.cause = Cause::Drainage;
                    if (tp_.contains(r)) record(3, "drained dependency still present");
                }
                it = drains_.erase(it);
                again = true;
                continue;
            }
            const std::vector<Dependency> feeders(tp_.in_deps(cj).begin(), tp_.in_deps(cj).end());
            for (const Dependency& f : feeders)
                if (f.target == t && !condemned(f)) enqueue_request(cj, f);
            ++it;
        }

        for (std::size_t i = 0; i < phases_.size(); ++i) {
            ChannelPhase& ph = phases_[i];
            if (ph.kind != PhaseKind::AwaitingRemovals) continue;
            if (std::none_of(ph.pending.begin(), ph.pending.end(), [&](const Dependency& d) { return tp_.contains(d); })) {
                ph = {PhaseKind::Ready, {}};
                wake(channel_at(i));
            }
        }

        if (sweep_ghosts()) again = true;

        std::vector<Dependency> deferred;
        for (const Dependency& d : ri_removed_)
            if (upgraded(d.dst)) deferred.push_back(d);
        for (const Dependency& d : deferred)
            if (try_restore(d)) again = true;
    }
}

// ---- monitor -------------------------------------------------------------

std::vector<Violation> Reconfiguration::verify_lysne_conditions() const {
    std::vector<Violation> v;
    auto add = [&](int cond, std::string msg) { v.push_back({cond, clock_, std::move(msg)}); };
    const Network& net = *net_;
    const auto pes = net.processing_nodes();

    for (std::size_t i = 0; i < net.channel_count(); ++i) {
        const ChannelIndex c = channel_at(i);
        if (net.channel_class(c) == ChannelClass::Delivery) {
            for (NodeId t : tp_.in_targets(c))
                if (t != net.channel(c).dst) add(1, "packets for " + net.name(t) + " delivered at " + net.name(c));
            continue;
        }
        for (NodeId t : pes)
            if (live_prevailing(c, t) && !tp_.has_out_target(c, t))
                add(1, "dead end for " + net.name(t) + " at " + net.name(c));
    }

    if (auto cyc = ChannelGraph(tp_).find_cycle(); !cyc.empty())
        add(2, "prevailing dependency cycle through " + net.name(cyc.front()));
    if (auto cyc = ChannelGraph(ti_).find_cycle(); !cyc.empty())
        add(2, "intermediate dependency cycle through " + net.name(cyc.front()));

    if (!(tp_ == build_tcdg(net, rp_, halted_))) add(0, "prevailing TCDG diverged from its routing function");
    for (const Dependency& d : ti_.deps()) {
        if (!tf_.contains(d) && !ri_added_.contains(d))
            add(0, "intermediate arc outside final and added sets at " + net.name(d.src));
        if (upgraded(d.src) && !upgraded(d.dst))
            add(0, "upgraded " + net.name(d.src) + " depends on non-upgraded " + net.name(d.dst));
    }
    for (const Dependency& d : ri_removed_)
        if (ti_.contains(d)) add(0, "released arc still in intermediate TCDG at " + net.name(d.src));
    for (std::size_t i = 0; i < net.channel_count(); ++i) {
        const ChannelIndex c = channel_at(i);
        if (!upgraded(c) || net.channel_class(c) == ChannelClass::Delivery) continue;
        if (!(rp_.local(c) == ri_.local(c))) add(0, "upgraded " + net.name(c) + " diverged from R_I");
        for (const Dependency& d : tp_.out_deps(c))
            if (!upgraded(d.dst)) add(0, "upgraded " + net.name(c) + " feeds non-upgraded " + net.name(d.dst));
    }

    v.insert(v.end(), recorded_.begin(), recorded_.end());
    return v;
}

// ---- scheduler -----------------------------------------------------------

namespace {

struct Action {
    std::uint64_t time;
    std::uint64_t tie;
    bool is_request;
    std::uint64_t key;  // channel index or request id

    bool operator>(const Action& o) const { return std::tie(time, tie) > std::tie(o.time, o.tie); }
};

}  // namespace

void run_channel_check(Reconfiguration& st, ChannelIndex c) {
    const PhaseKind k = st.phase(c).kind;
    if (k == PhaseKind::Upgraded || k == PhaseKind::AwaitingRemovals) return;
    if (!st.order_ready(c)) {
        st.try_conformability_order_release(c);
        if (!st.order_ready(c)) return;
    }
    const StepCondition cond = st.check_step_condition(c);
    if (cond.outcome == CheckOutcome::Offending) {
        const auto rest = st.try_compatibility_upgrade(c, cond.offending);
        if (!rest.empty()) {
            st.issue_removal_requests(c, rest);
            return;
        }
        if (!st.order_ready(c)) return;
    }
    st.apply_step_operation(c);
}

ReconfigResult run_reconfiguration(const Network& net, const RoutingFunction& start, const RoutingFunction& final,
                                   const ReconfigOptions& opts) {
    Reconfiguration st(net, start, final, opts);
    std::mt19937_64 rng(opts.scheduler_seed);
    std::priority_queue<Action, std::vector<Action>, std::greater<>> queue;
    std::vector<char> queued(net.channel_count(), 0);
    std::set<std::uint64_t> seen_requests;
    std::uint64_t now = 0;
    ReconfigResult result;

    auto push_check = [&](ChannelIndex c) {
        if (queued[idx(c)] || st.upgraded(c)) return;
        queued[idx(c)] = 1;
        queue.push({now, rng(), false, idx(c)});
    };
    for (std::size_t i = 0; i < net.channel_count(); ++i) push_check(channel_at(i));

    while (true) {
        for (ChannelIndex c : st.take_wakeups()) push_check(c);
        for (const RemovalRequest& r : st.pending_requests())
            if (seen_requests.insert(r.id).second) queue.push({now, rng(), true, r.id});
        if (queue.empty()) break;
        const Action a = queue.top();
        queue.pop();
        ++now;
        ++result.actions;
        if (a.is_request) {
            const auto& pending = st.pending_requests();
            auto it = std::find_if(pending.begin(), pending.end(),
                                   [&](const RemovalRequest& r) { return r.id == a.key; });
            if (it != pending.end()) st.process_removal_request(RemovalRequest(*it));
        } else {
            queued[a.key] = 0;
            run_channel_check(st, channel_at(a.key));
        }
        if (opts.invariant_checks == InvariantChecks::EveryEvent) {
            auto v = st.verify_lysne_conditions();
            if (!v.empty()) {
                result.violations = std::move(v);
                break;
            }
        }
        if (result.actions >= opts.max_actions) {
            result.violations.push_back({0, st.trace().empty() ? 0 : st.trace().back().timestamp,
                                         "action budget exhausted"});
            break;
        }
    }

    if (result.violations.empty() && opts.invariant_checks != InvariantChecks::Off) {
        result.violations = st.verify_lysne_conditions();
        if (!st.complete()) result.violations.push_back({0, 0, "reconfiguration stalled before completion"});
        else if (!(st.prevailing() == final)) result.violations.push_back({0, 0, "final table differs from R_F"});
        else if (!(st.intermediate_tcdg() == st.final_tcdg()))
            result.violations.push_back({0, 0, "intermediate TCDG differs from final TCDG"});
    }
    result.completed = st.complete() && st.prevailing() == final;
    result.final = st.prevailing();
    result.trace = st.trace();
    return result;
}

std::string_view to_string(InvariantChecks c) {
    switch (c) {
        case InvariantChecks::Off: return "off";
        case InvariantChecks::Final: return "final";
        case InvariantChecks::EveryEvent: return "every-event";
    }
    return "?";
}

std::optional<InvariantChecks> parse_invariant_checks(std::string_view text) {
    if (text == "off") return InvariantChecks::Off;
    if (text == "final") return InvariantChecks::Final;
    if (text == "every-event" || text == "every_event") return InvariantChecks::EveryEvent;
    return std::nullopt;
}

}  // namespace upr
