// Tolerance policy: negativity/tolerance rate bookkeeping, the distortion
// ring predicate, the RSPN network (attachment / current / ordering / region
// nodes) and goal-oriented strategy selection.
#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "sfcmr/graph.hpp"

namespace sfcmr {

struct DomainError {
    std::string what;
};

/// f_gamma(0, a) = 1 / ((1-a) * sqrt(2*pi)), the per-state negativity kernel.
double negativity_term(double a);

/// Distortion ring: intact iff t - gamma > 0.
bool ring(double gamma, double t);

/// a_gamma control: 1 / (1 + exp(-delta^2)).
double control_sigmoid(double delta);

struct PolicyConfig {
    // Strategy enable flags, indexed 1..22. 19 and 20 default off (they
    // bypass the lazy-approach assumption), 22 defaults off in favor of 21.
    std::map<int, bool> enabled = [] {
        std::map<int, bool> e;
        for (int i = 1; i <= 22; ++i) e[i] = true;
        e[19] = false;
        e[20] = false;
        e[22] = false;
        return e;
    }();

    double freq_coefficient = 0.1;   // p(s, a) weight in A.cost
    double t_consistent = 0.05;      // tolerance gained per quiet state
    double t_fail_scale = 0.5;       // failed states add -f(a) * scale
    double t_floor = -1.0;
    double t_ceil = 0.25;
    double a_clamp = 0.99;
    double delta_step = 0.25;        // delta_gamma += per repeated failure
    double delta_decay = 0.5;        // delta_gamma *= per successful attach
    double drastic_step = 1.0;
    int k_init = 1;
    int ring_abort_patience = 3;     // ring=false streak before S1 aborts
    int connect_budget = 0;          // 0: derive max(4, n/2); run-length cap
    int cnode_cap = 8;
    int max_states_per_expansion = 0; // 0: derive 100n + 1000

    bool strategy(int id) const {
        auto it = enabled.find(id);
        return it != enabled.end() && it->second;
    }
};

struct RspnAttachment {
    std::vector<double> gamma_deltas;
    int appearances = 0;
};

struct RspnOrderEntry {
    std::vector<int> members;
    bool active = false; // singleton or emptied entries become enforceable
    bool frozen = false; // singleton entries can't be changed anymore
    int expansion = 0;
};

struct Rspn {
    std::map<std::uint64_t, RspnAttachment> node_a;
    std::deque<std::uint64_t> node_c;
    std::vector<RspnOrderEntry> node_j;
    std::map<std::uint64_t, std::vector<std::uint64_t>> node_n;
    std::map<std::uint64_t, VertexMask> comp_vertices; // key -> component snapshot
    int rejected_frozen_mutations = 0;

    /// Key = FNV hash of the sorted component vertex set.
    static std::uint64_t component_key(const VertexMask& comp);

    /// Insert an ordering entry; vertices already owned by an older entry are
    /// deduplicated there first (a vertex sits in one entry at a time).
    /// Mutation of frozen entries is rejected and counted.
    void add_order_entry(const std::vector<int>& members, int expansion);

    void note_component(std::uint64_t key, const VertexMask& comp);
};

/// A.cost(a_i) = sum of gamma deltas + freq_coefficient * appearances.
double attach_cost(const Rspn& net, std::uint64_t key, double freq_coefficient);

enum class ActionKind {
    kUndo,
    kPathSwap,
    kAddSyncEdge,
    kRemoveRecord,
    kNewExpansion,
    kIncreaseRate,
    kPinTip,
    kAbort,
    kUndoScanAttach,  // executor form of strategies 8/18: undo up to k, attach
    kSanctionDeadEnd, // strategy 21: allow one dead end in path mode
};

struct PolicyAction {
    ActionKind kind;
    int k = 0;          // undo depth / scan depth
    int v = -1, w = -1; // attachment endpoints
    int record_seq = -1;
    std::uint64_t key = 0; // component key for attachments
    double amount = 0.0;
    int phi_vertex = -1; // new expansion x1
    int strategy = 0;    // strategy id that emitted it
};

struct PolicyState {
    double gamma = 0.0;
    double t = 0.0;
    std::vector<double> a_terms;
    std::vector<double> t_terms;
    double delta_gamma = 0.0;
    int connect_budget = 0;
    int k = 1;
    PolicyConfig config;
    std::mt19937_64 rng;

    bool force_exponential = false;
    int ring_false_streak = 0;
    std::uint64_t last_fail_key = 0;
    int same_key_failures = 0;
    bool had_attach_success = false; // strategy 11 gate per expansion
    int consecutive_new_comps = 0;   // strategy 12 signal
    bool swap_tried = false;
    std::map<int, int> fires;

    explicit PolicyState(PolicyConfig cfg, std::uint64_t seed)
        : connect_budget(cfg.connect_budget), config(cfg), rng(seed) {}

    void fire(int strategy_id) { ++fires[strategy_id]; }

    /// Push one (a, t) state pair; consistent states gain t_consistent,
    /// failures lose t_fail_scale * f(a). Keeps gamma/t accumulators in sync
    /// with the term lists.
    void push_state(bool consistent);
    void push_state_with_a(double a, bool consistent);
    /// Quiet state with no new progress: gamma advances, tolerance does not.
    void push_state_neutral();

    /// A fresh expansion starts with exactly t_consistent of ring headroom;
    /// gamma keeps its accumulated pressure.
    void grant_expansion_headroom();

    /// Recompute gamma and t from the term lists (invariant check).
    double recompute_gamma() const;
    double recompute_t() const;

    void on_attach_success(Rspn& net, std::uint64_t key, double gamma_before);
    void on_attach_failure(Rspn& net, std::uint64_t key);
};

// Diagnosis handed to the policy when the reconstruction throws.
struct ReconErrorInfo {
    enum Kind { kConstraint, kDeadEnd, kStateBudget } kind = kConstraint;
    int tip = -1;
    std::vector<std::uint64_t> inconsistent_keys;
    bool unreachable_component = false; // overlap signature (a)
    bool other_tip_articulation = false; // overlap signature (b)
};

struct ReconState; // defined in reconstruction.hpp

/// One policy invocation: adjusts the rates, updates the RSPN, and emits the
/// action list the reconstruction must apply. Never throws; kAbort is an
/// action, not an error.
std::vector<PolicyAction> run_policy(PolicyState& ps, Rspn& net, ReconState& rs,
                                     const ReconErrorInfo& err);

} // namespace sfcmr
