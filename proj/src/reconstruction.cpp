#include "sfcmr/reconstruction.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>

namespace sfcmr {

int dstar_of(const Graph& g, const VertexMask& live, const std::vector<EdgeRecord>& le, int w) {
    (void)g;
    int d = 0;
    for (const auto& e : le) {
        if (!e.touches(w)) continue;
        if (live.test(e.u) && live.test(e.v)) ++d; // self-markers count once per copy
    }
    return d;
}

int ReconState::dstar(int w) const { return dstar_of(*g, live, le, w); }

double ReconState::mu_x() const {
    if (s_initial <= 0) return 1.0;
    int removed = 0;
    for (const auto& l : lambda)
        if (l.original && !l.revoked) ++removed;
    return 1.0 - static_cast<double>(removed) / static_cast<double>(s_initial);
}

const EdgeRecord* ReconState::find_seq(int seq) const {
    for (const auto& e : le)
        if (e.seq == seq) return &e;
    return nullptr;
}

std::uint64_t ReconState::digest() const {
    std::uint64_t h = fnv64_mask(live);
    for (const auto& e : le) {
        int buf[4] = {e.u, e.v, e.synchronized ? 1 : 0, e.seq};
        h = fnv64(buf, sizeof(buf), h);
    }
    h = fnv64(p1.data(), p1.size() * sizeof(int), h);
    h = fnv64(p2.data(), p2.size() * sizeof(int), h);
    // pinned and dead_d are policy decisions, not scene state, and survive undo
    int scal[3] = {active_is_p1 ? 1 : 0, static_cast<int>(lambda.size()), state_index};
    h = fnv64(scal, sizeof(scal), h);
    for (const auto& l : lambda) {
        int buf[3] = {l.seq, l.original ? 1 : 0, l.revoked ? 1 : 0};
        h = fnv64(buf, sizeof(buf), h);
    }
    return h;
}

Reconstructor::Reconstructor(const Graph& g, std::vector<EdgeRecord> le, int v0, Mode mode,
                             PolicyConfig cfg, std::uint64_t seed, std::ostream* trace)
    : g_(g), ps_(cfg, seed), mode_(mode), trace_(trace) {
    rs_.g = &g;
    rs_.mode = mode;
    rs_.v0 = v0;
    rs_.initial_le = std::move(le);
    rs_.s_initial = static_cast<int>(rs_.initial_le.size());
    rs_.live = VertexMask(g.n());
    int max_seq = 0;
    for (const auto& e : rs_.initial_le) max_seq = std::max(max_seq, e.seq + 1);
    rs_.next_seq = max_seq;
    if (ps_.connect_budget <= 0) ps_.connect_budget = std::max(4, g.n() / 2);
    if (ps_.config.max_states_per_expansion <= 0)
        ps_.config.max_states_per_expansion = 100 * g.n() + 1000;
}

bool Reconstructor::seed_expansion(int x1_hint) {
    const EdgeRecord* phi = nullptr;
    int x1 = -1, x2 = -1;
    if (x1_hint < 0) {
        for (const auto& e : rs_.initial_le)
            if (e.touches(rs_.v0) && (!phi || e.seq < phi->seq)) phi = &e;
        if (phi) {
            x2 = rs_.v0;
            x1 = phi->other(rs_.v0);
        } else if (!rs_.initial_le.empty()) {
            phi = &rs_.initial_le.front(); // no record touches v0: fall back
            x1 = phi->v;
            x2 = phi->u;
        } else {
            return false;
        }
    } else {
        for (const auto& e : rs_.initial_le)
            if (e.touches(x1_hint) && (!phi || e.seq < phi->seq)) phi = &e;
        if (!phi) return false;
        x1 = x1_hint;
        x2 = phi->other(x1_hint);
    }
    if (x1 == x2) return false;
    for (int used : rs_.expansions_x1)
        if (used == x1) return false; // strategy 3: never expand the same x1 twice

    rs_.live = VertexMask::full(g_.n());
    rs_.le = rs_.initial_le;
    rs_.p1 = {x1};
    rs_.p2 = {x2};
    rs_.active_is_p1 = true;
    rs_.pinned = 0;
    rs_.dead_d = 0;
    rs_.lambda.clear();
    rs_.frames.clear();
    rs_.state_index = 0;
    rs_.marker_junction_streak = 0;
    rs_.states_begun = 0;
    rs_.max_coverage = 2;
    rs_.pending = {};
    for (auto& e : rs_.le)
        if (e.seq == phi->seq) e.synchronized = true; // phi is the junction pair
    rs_.expansions_x1.push_back(x1);
    ps_.had_attach_success = false;
    ps_.swap_tried = false;
    ps_.delta_gamma = 0.0;
    ps_.k = ps_.config.k_init;
    ps_.last_fail_key = 0;
    ps_.same_key_failures = 0;
    ps_.ring_false_streak = 0;
    if (rs_.expansions_x1.size() > 1) ps_.grant_expansion_headroom();
    trace_state("expansion", x1, phi->seq);
    return true;
}

UndoFrame& Reconstructor::begin_frame() {
    open_frame_ = UndoFrame{};
    UndoFrame& f = *open_frame_;
    f.active_before = rs_.active_is_p1;
    f.lambda_size_before = rs_.lambda.size();
    f.marker_streak_before = rs_.marker_junction_streak;
    f.pending_before_active = rs_.pending.active;
    f.tip_vertex = rs_.active_tip();
    ++rs_.states_begun;
    return f;
}

void Reconstructor::commit_frame() {
    rs_.frames.push_back(std::move(*open_frame_));
    open_frame_.reset();
    ++rs_.state_index;
}

void Reconstructor::rollback_frame() {
    undo_frame(*open_frame_);
    open_frame_.reset();
}

void Reconstructor::undo_frame(const UndoFrame& f) {
    for (auto it = f.le_ops.rbegin(); it != f.le_ops.rend(); ++it) {
        switch (it->kind) {
            case LeOp::kInsert:
                rs_.le.erase(rs_.le.begin() + it->index);
                break;
            case LeOp::kRemove:
                rs_.le.insert(rs_.le.begin() + it->index, it->rec);
                break;
            case LeOp::kFlip:
                for (auto& e : rs_.le)
                    if (e.seq == it->rec.seq) e.synchronized = !e.synchronized;
                break;
        }
    }
    for (auto it = f.masked.rbegin(); it != f.masked.rend(); ++it) rs_.live.set(*it);
    for (int i = 0; i < f.p1_pushed; ++i) rs_.p1.pop_back();
    for (int i = 0; i < f.p2_pushed; ++i) rs_.p2.pop_back();
    rs_.active_is_p1 = f.active_before;
    for (auto idx : f.lambda_revoked) rs_.lambda[idx].revoked = false;
    rs_.lambda.resize(f.lambda_size_before);
    rs_.marker_junction_streak = f.marker_streak_before;
    rs_.pending.active = f.pending_before_active;
    // Rates are policy pressure and stay monotone through undo: gamma keeps
    // its peaks while states are rolled back, which is what lets the ring
    // disintegrate and the process abort.
}

void Reconstructor::undo_states(int k) {
    while (k-- > 0 && !rs_.frames.empty()) {
        undo_frame(rs_.frames.back());
        rs_.frames.pop_back();
        --rs_.state_index;
    }
}

void Reconstructor::mask_vertex(UndoFrame& f, int v) {
    rs_.live.reset(v);
    f.masked.push_back(v);
}

void Reconstructor::flip_sync(UndoFrame& f, int seq) {
    for (auto& e : rs_.le)
        if (e.seq == seq) {
            e.synchronized = !e.synchronized;
            LeOp op;
            op.kind = LeOp::kFlip;
            op.rec = e;
            f.le_ops.push_back(op);
            return;
        }
}

void Reconstructor::insert_record(UndoFrame& f, EdgeRecord rec, int index) {
    if (index < 0 || index > static_cast<int>(rs_.le.size())) index = static_cast<int>(rs_.le.size());
    rs_.le.insert(rs_.le.begin() + index, rec);
    LeOp op;
    op.kind = LeOp::kInsert;
    op.index = index;
    op.rec = rec;
    f.le_ops.push_back(op);
}

void Reconstructor::remove_record(UndoFrame& f, int seq, bool log_lambda) {
    for (std::size_t i = 0; i < rs_.le.size(); ++i) {
        if (rs_.le[i].seq != seq) continue;
        LeOp op;
        op.kind = LeOp::kRemove;
        op.index = static_cast<int>(i);
        op.rec = rs_.le[i];
        const bool original = rs_.le[i].origin == RecordOrigin::kMapped;
        rs_.le.erase(rs_.le.begin() + i);
        f.le_ops.push_back(op);
        if (log_lambda && original)
            rs_.lambda.push_back(LambdaEntry{rs_.state_index, seq, true, false});
        return;
    }
}

void Reconstructor::push_active(UndoFrame& f, int w) {
    if (rs_.active_is_p1) {
        rs_.p1.push_back(w);
        ++f.p1_pushed;
    } else {
        rs_.p2.push_back(w);
        ++f.p2_pushed;
    }
}

// Constraints 1-2 in H[V - v] with the other tip as v0. Path mode tolerates
// up to 2-d creatable hn=1 components (strategy 21's Delta(H) allowance).
bool Reconstructor::constraints_hold(int v) const {
    const int anchor = (v == rs_.active_tip()) ? rs_.other_tip() : rs_.active_tip();
    VertexMask reduced = rs_.live.minus(v);
    if (!reduced.any()) return true;
    if (articulations(g_, reduced).none()) return true;

    VertexMask forbidden(g_.n());
    forbidden.set(v);
    forbidden.set(anchor);
    for (int u : g_.neighbors(v)) forbidden.set(u);
    for (int u : g_.neighbors(anchor)) forbidden.set(u);

    Scene probe(g_, rs_.live, anchor);
    VertexMask removed(g_.n());
    removed.set(v);
    int c1_violations = 0;
    bool c2_violation = false;
    for (const auto& comp : probe.creatable_components(removed)) {
        bool touches = false;
        comp.vertices.for_each([&](int w) {
            if (forbidden.test(w)) touches = true;
        });
        if (comp.creatable && comp.hn == 1 && !touches) ++c1_violations;
        if (!comp.creatable && comp.hn == 0 && comp.vertices.test(anchor)) c2_violation = true;
    }
    if (mode_ == Mode::kPath && ps_.config.strategy(21)) {
        const int allowance = 2 - rs_.dead_d;
        return c1_violations <= allowance && (!c2_violation || rs_.dead_d < 2);
    }
    return c1_violations == 0 && !c2_violation;
}

// P_v(u): follow the chain of live non-synchronized records from the tip,
// converting and masking as it goes; stops at the first vertex with no
// onward record. Never steps onto the other tip or across a self-marker.
int Reconstructor::walk(UndoFrame& f, int v) {
    while (true) {
        const EdgeRecord* next = nullptr;
        for (const auto& e : rs_.le) {
            if (e.synchronized || e.self_marker() || !e.touches(v)) continue;
            const int w = e.other(v);
            if (!rs_.live.test(w) || !rs_.live.test(v)) continue;
            if (w == rs_.other_tip()) continue;
            next = &e;
            break;
        }
        if (!next) return v;
        if (!constraints_hold(v)) {
            last_error_ = ReconErrorInfo{};
            last_error_.kind = ReconErrorInfo::kConstraint;
            last_error_.tip = v;
            throw ReconError{last_error_};
        }
        const int w = next->other(v);
        if (f.primary_record < 0) f.primary_record = next->seq;
        flip_sync(f, next->seq);
        mask_vertex(f, v);
        push_active(f, w);
        trace_state("walk", w, next->seq);
        v = w;
    }
}

Reconstructor::Partition Reconstructor::partition(UndoFrame& f, int v) {
    Partition part;
    for (const auto& e : rs_.le) {
        if (e.synchronized) continue;
        if (!rs_.live.test(e.u) || !rs_.live.test(e.v)) continue;
        for (int w : {e.u, e.v}) {
            if (!g_.has_edge(v, w) || rs_.visited(w)) continue;
            const int d = rs_.dstar(w);
            if (d == 1) part.s1.push_back(e.seq);
            else if (d == 2) part.s2.push_back(e.seq);
            break;
        }
    }
    // Unmapped neighbors get a doubled temporary self-marker so the ordinary
    // conventions can route through them.
    for (int w : g_.neighbors(v)) {
        if (!rs_.live.test(w) || rs_.visited(w)) continue;
        if (rs_.dstar(w) != 0) continue;
        for (int copy = 0; copy < 2; ++copy) {
            EdgeRecord marker{w, w, false, rs_.next_seq++, RecordOrigin::kMarker};
            insert_record(f, marker);
            part.s0.push_back(marker.seq);
        }
    }
    for (int seq : part.s0) part.s2.push_back(seq); // S2 <- S2 u S0
    return part;
}

namespace {
int qualifying_endpoint(const Graph& g, const ReconState& rs, const EdgeRecord& e, int v) {
    for (int w : {e.u, e.v})
        if (g.has_edge(v, w) && !rs.visited(w)) return w;
    return -1;
}
} // namespace

int Reconstructor::choose_successor(UndoFrame& f, int v, Partition& part) {
    int u = -1;
    bool via_marker = false;
    if (!part.s1.empty()) {
        const EdgeRecord* rec = rs_.find_seq(part.s1.front());
        u = qualifying_endpoint(g_, rs_, *rec, v);
    } else {
        const EdgeRecord y = *rs_.find_seq(part.s2.front());
        const int w = qualifying_endpoint(g_, rs_, y, v);
        int y_index = -1;
        for (std::size_t i = 0; i < rs_.le.size(); ++i)
            if (rs_.le[i].seq == y.seq) y_index = static_cast<int>(i);
        remove_record(f, y.seq, true);
        const EdgeRecord* z = nullptr;
        for (const auto& e : rs_.le)
            if (!e.synchronized && e.touches(w) && rs_.live.test(e.u) && rs_.live.test(e.v)) {
                z = &e;
                break;
            }
        u = w;
        via_marker = y.self_marker();
        if (z && !y.self_marker() && !z->self_marker()) {
            rs_.pending = ReconState::PendingPair{true, y, y_index, z->seq, rs_.state_index + 1};
        }
    }
    if (u < 0) {
        last_error_ = ReconErrorInfo{};
        last_error_.kind = ReconErrorInfo::kDeadEnd;
        last_error_.tip = v;
        throw ReconError{last_error_};
    }

    // Junction [v,u]: convert the direct record when one exists, otherwise
    // append a synchronized record (trimming u's incidence first).
    const EdgeRecord* direct = nullptr;
    for (const auto& e : rs_.le)
        if (!e.synchronized && e.touches(v) && e.touches(u) && !e.self_marker()) {
            direct = &e;
            break;
        }
    int junction_seq;
    if (direct) {
        junction_seq = direct->seq;
        flip_sync(f, direct->seq);
    } else {
        int live_incident = 0;
        for (const auto& e : rs_.le)
            if (e.touches(u) && rs_.live.test(e.u) && rs_.live.test(e.v)) ++live_incident;
        if (live_incident > 2) {
            for (const auto& e : rs_.le)
                if (!e.synchronized && e.touches(u) && !e.self_marker()) {
                    remove_record(f, e.seq, true);
                    break;
                }
        }
        EdgeRecord junction{v, u, true, rs_.next_seq++, RecordOrigin::kJunction};
        insert_record(f, junction);
        junction_seq = junction.seq;
    }
    f.primary_record = junction_seq;

    // Leftover self-markers are dropped (both copies when u came through one).
    for (int seq : part.s0)
        if (rs_.find_seq(seq)) remove_record(f, seq, false);

    if (!constraints_hold(v)) {
        last_error_ = ReconErrorInfo{};
        last_error_.kind = ReconErrorInfo::kConstraint;
        last_error_.tip = v;
        throw ReconError{last_error_};
    }
    mask_vertex(f, v);
    push_active(f, u);
    trace_state("junction", u, junction_seq);

    if (via_marker) {
        ++rs_.marker_junction_streak;
        if (rs_.marker_junction_streak >= 2) {
            // Strategy 6: successive junctions into unmapped territory raise
            // the rate, drastically when no inconsistency is pending repair.
            ps_.fire(6);
            bool pending_inconsistency = !net_.node_c.empty();
            ps_.delta_gamma += pending_inconsistency ? ps_.config.delta_step
                                                     : ps_.config.drastic_step;
        }
        // Strategy 7: the allowed run length shrinks as the rate grows.
        const int limit = std::max(1, ps_.connect_budget - static_cast<int>(ps_.delta_gamma));
        if (rs_.marker_junction_streak > limit) {
            ps_.fire(7);
            last_error_ = ReconErrorInfo{};
            last_error_.kind = ReconErrorInfo::kStateBudget;
            last_error_.tip = u;
            throw ReconError{last_error_};
        }
    } else {
        rs_.marker_junction_streak = 0;
    }
    return u;
}

void Reconstructor::removal_cases(UndoFrame& f, int vcur) {
    VertexMask arts = articulations(g_, rs_.live);
    const bool have_arts = arts.any();
    const bool relax = mode_ == Mode::kPath && ps_.config.strategy(21) && rs_.dead_d < 2;

    std::vector<int> to_remove;
    for (const auto& e : rs_.le) {
        if (e.synchronized || e.self_marker()) continue;
        if (!rs_.live.test(e.u) || !rs_.live.test(e.v)) continue;
        // Case III: records joining the two tips are premature until the
        // sequence covers every vertex.
        const bool joins_tips = e.touches(rs_.tip1()) && e.touches(rs_.tip2());
        if (joins_tips && rs_.coverage() < g_.n()) {
            to_remove.push_back(e.seq);
            continue;
        }
        if (!e.touches(vcur)) continue;
        const int w = e.other(vcur);
        // Case I: record into a live articulation.
        if (arts.test(w) && !relax) {
            to_remove.push_back(e.seq);
            continue;
        }
        // Case II: the pair lookahead H[V - {v,u}] breaks a constraint.
        if (have_arts && !relax) {
            VertexMask look = rs_.live.minus(vcur).minus(w);
            if (look.any() && articulations(g_, look).any()) {
                Scene probe(g_, rs_.live.minus(vcur), rs_.other_tip());
                if (!probe.check_constraints_1_2(w, rs_.other_tip())) to_remove.push_back(e.seq);
            }
        }
    }

    for (int seq : to_remove) {
        // Convention 3: when the chosen route z of a convention-2 choice gets
        // struck, the removed record y returns and z goes instead.
        if (rs_.pending.active && seq == rs_.pending.z_seq &&
            rs_.state_index <= rs_.pending.expire_state) {
            for (std::size_t i = 0; i < rs_.lambda.size(); ++i) {
                if (rs_.lambda[i].seq == rs_.pending.y.seq && !rs_.lambda[i].revoked) {
                    rs_.lambda[i].revoked = true;
                    f.lambda_revoked.push_back(i);
                    break;
                }
            }
            int idx = std::min<int>(rs_.pending.y_index, static_cast<int>(rs_.le.size()));
            insert_record(f, rs_.pending.y, idx);
            rs_.pending.active = false;
        }
        remove_record(f, seq, true);
        trace_state("remove", vcur, seq);
    }
    if (rs_.pending.active && rs_.state_index > rs_.pending.expire_state)
        rs_.pending.active = false;
}

Reconstructor::StepOutcome Reconstructor::step() {
    if (rs_.coverage() == g_.n()) {
        if (mode_ == Mode::kPath || g_.has_edge(rs_.tip1(), rs_.tip2())) return StepOutcome::kDone;
    }
    if (rs_.states_begun > ps_.config.max_states_per_expansion) {
        last_error_ = ReconErrorInfo{};
        last_error_.kind = ReconErrorInfo::kStateBudget;
        last_error_.tip = rs_.active_tip();
        return StepOutcome::kError;
    }

    UndoFrame& f = begin_frame();
    try {
        int v = rs_.active_tip();
        if (!constraints_hold(v)) {
            last_error_ = ReconErrorInfo{};
            last_error_.kind = ReconErrorInfo::kConstraint;
            last_error_.tip = v;
            throw ReconError{last_error_};
        }
        v = walk(f, v);
        if (rs_.coverage() == g_.n() &&
            (mode_ == Mode::kPath || g_.has_edge(rs_.tip1(), rs_.tip2()))) {
            commit_frame();
            ps_.push_state(true);
            return StepOutcome::kDone;
        }
        Partition part = partition(f, v);
        if (part.s1.empty() && part.s2.empty()) {
            last_error_ = ReconErrorInfo{};
            last_error_.kind = ReconErrorInfo::kDeadEnd;
            last_error_.tip = v;
            throw ReconError{last_error_};
        }
        const int u = choose_successor(f, v, part);
        removal_cases(f, u);
        commit_frame();
        rs_.max_coverage = std::max(rs_.max_coverage, rs_.coverage());
        ps_.push_state(true);
        ps_.swap_tried = false;
        if (rs_.pinned == 0) rs_.active_is_p1 = !rs_.active_is_p1;
        else rs_.active_is_p1 = (rs_.pinned == 1);
        return StepOutcome::kCommitted;
    } catch (const ReconError&) {
        diagnose(last_error_);
        rollback_frame();
        return StepOutcome::kError;
    }
}

// Fill the overlap signatures and inconsistent component keys for the policy.
void Reconstructor::diagnose(ReconErrorInfo& info) {
    VertexMask arts = articulations(g_, rs_.live);
    info.inconsistent_keys.clear();
    VertexMask inner = rs_.live;
    inner.subtract(arts);
    for (const auto& comp : components(g_, inner)) {
        if (comp.test(rs_.tip1()) || comp.test(rs_.tip2())) continue;
        const std::uint64_t key = Rspn::component_key(comp);
        info.inconsistent_keys.push_back(key);
        net_.note_component(key, comp);
    }
    info.unreachable_component = false;
    for (const auto& comp : components(g_, rs_.live))
        if (!comp.test(rs_.tip1()) && !comp.test(rs_.tip2())) info.unreachable_component = true;
    info.other_tip_articulation = mode_ == Mode::kCircuit && arts.test(rs_.other_tip());
}

bool Reconstructor::attempt_attachment(int v, int w, std::uint64_t key) {
    const double gamma_before = ps_.gamma;
    UndoFrame& f = begin_frame();
    try {
        EdgeRecord rec{v, w, true, rs_.next_seq++, RecordOrigin::kAttachment};
        insert_record(f, rec);
        f.primary_record = rec.seq;
        if (!constraints_hold(v)) {
            last_error_ = ReconErrorInfo{};
            last_error_.kind = ReconErrorInfo::kConstraint;
            last_error_.tip = v;
            throw ReconError{last_error_};
        }
        mask_vertex(f, v);
        push_active(f, w);
        removal_cases(f, w);
        commit_frame();
        rs_.max_coverage = std::max(rs_.max_coverage, rs_.coverage());
        ps_.push_state(true);
        ps_.on_attach_success(net_, key, gamma_before);
        if (rs_.pinned == 0) rs_.active_is_p1 = !rs_.active_is_p1;
        trace_state("attach", w, -1);
        return true;
    } catch (const ReconError&) {
        rollback_frame();
        ps_.on_attach_failure(net_, key);
        return false;
    }
}

bool Reconstructor::apply_actions(const std::vector<PolicyAction>& actions, bool& want_expansion,
                                  int& expansion_x1, bool& abort) {
    bool progressed = false;
    for (const auto& act : actions) {
        switch (act.kind) {
            case ActionKind::kAbort:
                abort = true;
                return false;
            case ActionKind::kNewExpansion:
                want_expansion = true;
                expansion_x1 = act.phi_vertex;
                return false;
            case ActionKind::kUndo:
                undo_states(act.k);
                progressed = true;
                break;
            case ActionKind::kPathSwap:
                rs_.active_is_p1 = !rs_.active_is_p1;
                progressed = true;
                trace_state("path_swap", rs_.active_tip(), -1);
                break;
            case ActionKind::kPinTip:
                rs_.pinned = rs_.active_is_p1 ? 1 : 2;
                progressed = true;
                break;
            case ActionKind::kSanctionDeadEnd: {
                ++rs_.dead_d;
                rs_.pinned = rs_.active_is_p1 ? 2 : 1; // continue on the other tip
                rs_.active_is_p1 = !rs_.active_is_p1;
                progressed = true;
                trace_state("dead_end", rs_.active_tip(), -1);
                break;
            }
            case ActionKind::kIncreaseRate:
                ps_.delta_gamma += act.amount;
                ps_.push_state_with_a(
                    std::min(ps_.config.a_clamp, control_sigmoid(ps_.delta_gamma) - 0.5 + act.amount * 0.1),
                    false);
                progressed = true;
                break;
            case ActionKind::kRemoveRecord: {
                UndoFrame& f = begin_frame();
                remove_record(f, act.record_seq, true);
                commit_frame();
                ps_.push_state(false);
                progressed = true;
                break;
            }
            case ActionKind::kAddSyncEdge:
                progressed = attempt_attachment(act.v, act.w, act.key);
                break;
            case ActionKind::kUndoScanAttach: {
                progressed = run_undo_scan_attach(act.k);
                break;
            }
        }
    }
    return progressed;
}

// Strategies 8/18 executor: undo one state at a time looking for a tip whose
// neighborhood can attach one of the tracked inconsistent components; on
// success replace the undone route with the attachment edge. When the scan
// fails, fall back to removing the failed route and raising the rate.
bool Reconstructor::run_undo_scan_attach(int max_k) {
    const int failed_primary = open_frame_ ? -1
                              : (rs_.frames.empty() ? -1 : rs_.frames.back().primary_record);
    const bool prefer_endpoints = ps_.config.strategy(18);

    auto try_here = [&]() -> bool {
        const int v = rs_.active_tip();
        // candidate targets: nodeC components adjacent to a free neighbor of v
        std::vector<std::uint64_t> keys(net_.node_c.begin(), net_.node_c.end());
        if (prefer_endpoints && keys.size() > 1) {
            VertexMask arts = articulations(g_, rs_.live);
            std::stable_sort(keys.begin(), keys.end(), [&](std::uint64_t a, std::uint64_t b) {
                auto chain_end = [&](std::uint64_t k) {
                    auto it = net_.comp_vertices.find(k);
                    if (it == net_.comp_vertices.end()) return 0;
                    int deg2_arts = 0;
                    it->second.for_each([&](int w) {
                        for (int x : g_.neighbors(w))
                            if (arts.test(x) && degree_in(g_, rs_.live, x) == 2) ++deg2_arts;
                    });
                    return deg2_arts;
                };
                return chain_end(a) > chain_end(b);
            });
            ps_.fire(18);
        }
        for (std::uint64_t key : keys) {
            auto it = net_.comp_vertices.find(key);
            if (it == net_.comp_vertices.end()) continue;
            for (int w : g_.neighbors(v)) {
                if (!rs_.live.test(w) || rs_.visited(w)) continue;
                bool adj_comp = it->second.test(w);
                if (!adj_comp)
                    for (int x : g_.neighbors(w))
                        if (it->second.test(x)) adj_comp = true;
                if (!adj_comp) continue;
                bool already = false;
                for (const auto& e : rs_.le)
                    if (!e.synchronized && e.touches(v) && e.touches(w)) already = true;
                if (already) continue;
                if (attempt_attachment(v, w, key)) return true;
            }
        }
        return false;
    };

    int primary_at_stop = failed_primary;
    for (int depth = 0; depth <= std::min<int>(max_k, static_cast<int>(rs_.frames.size()));
         ++depth) {
        if (depth > 0) {
            if (rs_.frames.empty()) break;
            primary_at_stop = rs_.frames.back().primary_record;
            undo_states(1);
        }
        if (try_here()) return true;
    }
    // Scan failed: drop the route that led here so the rewalk takes another
    // path, and raise the rate (S8's failure tail).
    if (primary_at_stop >= 0 && rs_.find_seq(primary_at_stop)) {
        UndoFrame& f = begin_frame();
        remove_record(f, primary_at_stop, true);
        commit_frame();
    }
    ps_.delta_gamma += ps_.config.delta_step;
    ps_.push_state(false);
    return true;
}

void Reconstructor::trace_state(const char* action, int tip, int rec_seq) {
    if (!trace_) return;
    *trace_ << "{\"state\":" << rs_.state_index << ",\"tip\":" << tip << ",\"action\":\""
            << action << "\",\"edge\":" << rec_seq << ",\"gamma\":" << ps_.gamma
            << ",\"t\":" << ps_.t << ",\"mu_x\":" << rs_.mu_x() << "}\n";
}

ReconResult Reconstructor::run() {
    ReconResult res;
    if (g_.n() == 1) {
        res.done = true;
        res.sequence = {rs_.v0};
        res.final_live = VertexMask::full(1);
        return res;
    }
    auto finalize = [&](bool done) {
        res.done = done;
        if (done) {
            res.sequence.assign(rs_.p2.rbegin(), rs_.p2.rend());
            res.sequence.insert(res.sequence.end(), rs_.p1.begin(), rs_.p1.end());
        }
        res.mu_x = rs_.mu_x();
        res.expansions = static_cast<int>(rs_.expansions_x1.size());
        res.gamma_final = ps_.gamma;
        res.t_final = ps_.t;
        res.strategy_fires = ps_.fires;
        res.final_le = rs_.le;
        res.final_live = rs_.live;
        return res;
    };

    if (!seed_expansion(-1)) return finalize(false);
    while (true) {
        const StepOutcome oc = step();
        if (oc == StepOutcome::kDone) return finalize(true);
        if (oc == StepOutcome::kCommitted) continue;

        bool abort = false, want_expansion = false;
        int expansion_x1 = -1;
        int rounds = 0;
        while (true) {
            auto actions = run_policy(ps_, net_, rs_, last_error_);
            const bool progressed = apply_actions(actions, want_expansion, expansion_x1, abort);
            if (abort || want_expansion || progressed) break;
            if (++rounds > 64) {
                abort = true;
                break;
            }
        }
        if (abort) return finalize(false);
        if (want_expansion) {
            if (static_cast<int>(rs_.expansions_x1.size()) >= g_.n() - 1) return finalize(false);
            if (!seed_expansion(expansion_x1)) {
                ps_.force_exponential = true;
                ps_.push_state(false);
                if (ps_.ring_false_streak >= ps_.config.ring_abort_patience) return finalize(false);
            }
        }
    }
}

ReconResult reconstruct(const Graph& g, const std::vector<EdgeRecord>& le, int v0, Mode mode,
                        PolicyConfig cfg, std::uint64_t seed, std::ostream* trace) {
    Reconstructor r(g, le, v0, mode, cfg, seed, trace);
    return r.run();
}

} // namespace sfcmr
