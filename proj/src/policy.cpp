#include "sfcmr/policy.hpp"

#include <algorithm>
#include <cmath>

#include "sfcmr/reconstruction.hpp"

namespace sfcmr {

namespace {
constexpr double kSqrt2Pi = 2.5066282746310002;
}

double negativity_term(double a) {
    if (a < 0.0 || a >= 1.0) throw DomainError{"negativity_term needs 0 <= a < 1"};
    return 1.0 / ((1.0 - a) * kSqrt2Pi);
}

bool ring(double gamma, double t) { return t - gamma > 0.0; }

double control_sigmoid(double delta) { return 1.0 / (1.0 + std::exp(-(delta * delta))); }

std::uint64_t Rspn::component_key(const VertexMask& comp) { return fnv64_mask(comp); }

void Rspn::note_component(std::uint64_t key, const VertexMask& comp) {
    comp_vertices.emplace(key, comp);
}

void Rspn::add_order_entry(const std::vector<int>& members, int expansion) {
    std::vector<int> accepted;
    for (int w : members) {
        bool blocked = false;
        for (auto& entry : node_j) {
            auto it = std::find(entry.members.begin(), entry.members.end(), w);
            if (it == entry.members.end()) continue;
            if (entry.frozen) {
                ++rejected_frozen_mutations; // frozen entries keep their members
                blocked = true;
            } else {
                entry.members.erase(it); // a vertex lives in one entry at a time
                if (entry.members.size() <= 1) {
                    entry.active = true;
                    entry.frozen = entry.members.size() == 1;
                }
            }
            break;
        }
        if (!blocked) accepted.push_back(w);
    }
    RspnOrderEntry e;
    e.members = std::move(accepted);
    e.expansion = expansion;
    e.active = e.members.size() <= 1;
    e.frozen = e.members.size() == 1;
    node_j.push_back(std::move(e));
}

double attach_cost(const Rspn& net, std::uint64_t key, double freq_coefficient) {
    auto it = net.node_a.find(key);
    if (it == net.node_a.end()) return 0.0;
    double c = 0.0;
    for (double d : it->second.gamma_deltas) c += d;
    return c + freq_coefficient * it->second.appearances;
}

void PolicyState::push_state(bool consistent) {
    double a = control_sigmoid(delta_gamma) - 0.5;
    a = std::clamp(a, 0.0, config.a_clamp);
    if (force_exponential) a = config.a_clamp;
    push_state_with_a(a, consistent);
}

void PolicyState::push_state_with_a(double a, bool consistent) {
    a = std::clamp(a, 0.0, config.a_clamp);
    const double f = negativity_term(a);
    a_terms.push_back(a);
    gamma += f;
    double ti = consistent ? config.t_consistent
                           : std::clamp(-f * config.t_fail_scale, config.t_floor, config.t_ceil);
    t_terms.push_back(ti);
    t = gamma;
    for (double x : t_terms) t += x;
}

void PolicyState::push_state_neutral() {
    double a = control_sigmoid(delta_gamma) - 0.5;
    a = std::clamp(a, 0.0, config.a_clamp);
    if (force_exponential) a = config.a_clamp;
    const double f = negativity_term(a);
    a_terms.push_back(a);
    gamma += f;
    t_terms.push_back(0.0);
    t = gamma;
    for (double x : t_terms) t += x;
}

void PolicyState::grant_expansion_headroom() {
    double sum_ti = 0.0;
    for (double x : t_terms) sum_ti += x;
    t_terms.push_back(config.t_consistent - sum_ti);
    t = gamma + sum_ti + t_terms.back();
}

double PolicyState::recompute_gamma() const {
    double gsum = 0.0;
    for (double a : a_terms) gsum += negativity_term(a);
    return gsum;
}

double PolicyState::recompute_t() const {
    double sum = recompute_gamma();
    for (double x : t_terms) sum += x;
    return sum;
}

void PolicyState::on_attach_success(Rspn& net, std::uint64_t key, double gamma_before) {
    delta_gamma *= config.delta_decay;
    auto& rec = net.node_a[key];
    rec.gamma_deltas.push_back(gamma - gamma_before);
    ++rec.appearances;
    had_attach_success = true;
    consecutive_new_comps = 0;
    k = config.k_init;
    fire(5); // every attachment is lazy: no lookahead into the repaired region
    // Strategy 14: with a valid attachable component found, pending
    // inconsistencies for the current vertex are dropped.
    if (config.strategy(14)) {
        net.node_c.clear();
        fire(14);
    }
}

void PolicyState::on_attach_failure(Rspn& net, std::uint64_t key) {
    delta_gamma += config.delta_step;
    ++consecutive_new_comps;
    ++same_key_failures;
    const double cost = attach_cost(net, key, config.freq_coefficient);
    if (config.strategy(10) && cost > 1.0) {
        delta_gamma += std::min(1.0, 0.1 * cost);
        fire(10);
    }
    ++net.node_a[key].appearances;
}

namespace {

// Strategy 2's one-step lookahead: how many records would the case-I rule
// strike immediately if the expansion started at vh.
int expansion_removal_score(const Graph& g, const ReconState& rs, int vh) {
    VertexMask full = VertexMask::full(g.n());
    VertexMask arts = articulations(g, full);
    int score = 0;
    for (const auto& e : rs.initial_le)
        if (e.touches(vh) && arts.test(e.other(vh))) ++score;
    return score;
}

} // namespace

std::vector<PolicyAction> run_policy(PolicyState& ps, Rspn& net, ReconState& rs,
                                     const ReconErrorInfo& err) {
    const PolicyConfig& cfg = ps.config;
    std::vector<PolicyAction> out;

    // Adjust t_s and a_gamma_s for the failed state.
    const std::uint64_t key0 = err.inconsistent_keys.empty()
                                   ? fnv64(&err.tip, sizeof(err.tip))
                                   : err.inconsistent_keys.front();
    if (key0 == ps.last_fail_key) {
        ps.delta_gamma += cfg.delta_step;
        ++ps.same_key_failures;
        if (cfg.strategy(9)) {
            const double dg = ps.a_terms.empty() ? 0.0 : negativity_term(ps.a_terms.back());
            const int scale = std::max(1, static_cast<int>(std::ceil(dg / 0.5)));
            ps.k = std::min(static_cast<int>(rs.frames.size()) + 1, std::max(2 * ps.k, ps.k * scale));
            ps.fire(9);
        }
    } else {
        ps.last_fail_key = key0;
        ps.same_key_failures = 1;
        ps.k = cfg.k_init;
    }
    ps.push_state(false);

    // Update the RSPN.
    const bool ring_ok = ring(ps.gamma, ps.t);
    if (!ring_ok) ++ps.ring_false_streak;
    else ps.ring_false_streak = 0;

    if (ring_ok) {
        int cap = cfg.cnode_cap;
        if (cfg.strategy(13)) {
            cap = std::max(1, cfg.cnode_cap - static_cast<int>(ps.gamma / 10.0));
            ps.fire(13);
        }
        const bool gate = cfg.strategy(11) && !ps.had_attach_success && !net.node_c.empty();
        if (gate) ps.fire(11);
        for (std::uint64_t key : err.inconsistent_keys) {
            if (gate) break;
            if (static_cast<int>(net.node_c.size()) >= cap) break;
            if (std::find(net.node_c.begin(), net.node_c.end(), key) == net.node_c.end())
                net.node_c.push_back(key);
        }
        if (cfg.strategy(12) && ps.consecutive_new_comps >= 2) {
            // attachment attempts keep spawning fresh inconsistencies
            ps.delta_gamma += cfg.drastic_step;
            for (auto it = err.inconsistent_keys.rbegin(); it != err.inconsistent_keys.rend(); ++it)
                if (std::find(net.node_c.begin(), net.node_c.end(), *it) == net.node_c.end())
                    net.node_c.push_front(*it);
            ps.fire(12);
            ps.consecutive_new_comps = 0;
        }
    }

    // Strategy 21: hamiltonian-path dead ends are sanctioned, not repaired.
    if (err.kind == ReconErrorInfo::kDeadEnd && rs.mode == Mode::kPath && cfg.strategy(21) &&
        rs.dead_d < 2) {
        ps.fire(21);
        PolicyAction a{ActionKind::kSanctionDeadEnd};
        a.strategy = 21;
        out.push_back(a);
        return out;
    }

    if (ring_ok) {
        // Path-overlap family, selected by signature.
        if (!ps.swap_tried) {
            int overlap_strategy = 0;
            if (cfg.strategy(15) && err.unreachable_component) overlap_strategy = 15;
            else if (cfg.strategy(16) && err.other_tip_articulation) overlap_strategy = 16;
            else if (cfg.strategy(17) && ps.same_key_failures >= 3) overlap_strategy = 17;
            if (overlap_strategy != 0) {
                ps.fire(overlap_strategy);
                ps.swap_tried = true;
                PolicyAction swap{ActionKind::kPathSwap};
                swap.strategy = overlap_strategy;
                out.push_back(swap);
                if (overlap_strategy == 16) {
                    PolicyAction pin{ActionKind::kPinTip};
                    pin.strategy = 16;
                    out.push_back(pin);
                }
                return out;
            }
        }
        // Strategy 19 (config-gated): treat C_vH generators as inconsistencies.
        if (cfg.strategy(19)) {
            const int tip = rs.active_tip();
            VertexMask arts_now = articulations(*rs.g, rs.live);
            VertexMask wo_tip = rs.live.minus(tip);
            if (wo_tip.any() && articulations(*rs.g, wo_tip).count() > arts_now.count()) {
                ps.fire(19);
                PolicyAction inc{ActionKind::kIncreaseRate};
                inc.amount = cfg.delta_step;
                inc.strategy = 19;
                out.push_back(inc);
            }
        }
        if (cfg.strategy(8)) {
            ps.fire(8);
            PolicyAction scan{ActionKind::kUndoScanAttach};
            scan.k = ps.k;
            scan.strategy = 8;
            out.push_back(scan);
            return out;
        }
    }

    // Expansion family. Reached when the ring is disintegrated, or when no
    // local strategy is enabled (strategy-1-only configurations).
    if (cfg.strategy(4) && !ps.swap_tried && ps.ring_false_streak <= cfg.ring_abort_patience) {
        // One path swap before a new expansion call gets spent.
        ps.fire(4);
        ps.swap_tried = true;
        PolicyAction swap{ActionKind::kPathSwap};
        swap.strategy = 4;
        out.push_back(swap);
        return out;
    }

    if (cfg.strategy(1) || cfg.strategy(2)) {
        // Candidate static vH points: the current articulation set first,
        // then the members stored in earlier ordering entries.
        std::vector<int> candidates = articulations(*rs.g, rs.live).to_vector();
        for (const auto& entry : net.node_j)
            for (int w : entry.members)
                if (std::find(candidates.begin(), candidates.end(), w) == candidates.end())
                    candidates.push_back(w);
        auto filter_usable = [&](const std::vector<int>& pool) {
            std::vector<int> ok;
            for (int w : pool) {
                if (std::find(rs.expansions_x1.begin(), rs.expansions_x1.end(), w) !=
                    rs.expansions_x1.end())
                    continue;
                bool has_record = false;
                for (const auto& e : rs.initial_le)
                    if (e.touches(w)) has_record = true;
                if (has_record) ok.push_back(w);
            }
            return ok;
        };
        std::vector<int> usable = filter_usable(candidates);
        if (usable.empty() && cfg.strategy(3)) {
            // No static vH to seed from; any live record-bearing vertex keeps
            // the distinct-x1 expansion budget burning instead of aborting.
            std::vector<int> pool;
            rs.live.for_each([&](int w) {
                if (w != rs.tip1() && w != rs.tip2()) pool.push_back(w);
            });
            usable = filter_usable(pool);
            if (!usable.empty()) ps.fire(3);
        }
        if (!usable.empty()) {
            int chosen = usable.front();
            if (cfg.strategy(2)) {
                int best = expansion_removal_score(*rs.g, rs, chosen);
                for (int w : usable) {
                    const int s = expansion_removal_score(*rs.g, rs, w);
                    if (s < best || (s == best && w < chosen)) {
                        best = s;
                        chosen = w;
                    }
                }
                ps.fire(2);
            }
            ps.fire(1);
            // Strategy 1's bookkeeping: the expansion's static vH set joins J.
            net.add_order_entry(articulations(*rs.g, rs.live).to_vector(),
                                static_cast<int>(rs.expansions_x1.size()));
            PolicyAction exp{ActionKind::kNewExpansion};
            exp.phi_vertex = chosen;
            exp.strategy = 1;
            out.push_back(exp);
            return out;
        }
        // No usable static vH point: retarding gamma through a local repair
        // beats aborting while the stuck state is still fresh.
        if (cfg.strategy(8) && ps.ring_false_streak <= cfg.ring_abort_patience &&
            !rs.frames.empty()) {
            ps.fire(8);
            PolicyAction scan{ActionKind::kUndoScanAttach};
            scan.k = ps.k;
            scan.strategy = 8;
            out.push_back(scan);
            return out;
        }
        // Strategy 1's abort clause: gamma is forced to grow until the ring
        // stays disintegrated.
        ps.force_exponential = true;
        ps.fire(1);
        if (ps.ring_false_streak >= cfg.ring_abort_patience) {
            PolicyAction a{ActionKind::kAbort};
            a.strategy = 1;
            out.push_back(a);
            return out;
        }
        PolicyAction inc{ActionKind::kIncreaseRate};
        inc.amount = cfg.drastic_step;
        inc.strategy = 1;
        out.push_back(inc);
        return out;
    }

    PolicyAction a{ActionKind::kAbort};
    out.push_back(a);
    return out;
}

} // namespace sfcmr
