// Reconstruction phase: expands the two paths P_x1 / P_x2 over the overlay
// graph H*, converting / removing / adding records under cases I..III and the
// successor conventions, with inconsistencies handled by the tolerance policy.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "sfcmr/mapping.hpp"
#include "sfcmr/oracle.hpp"
#include "sfcmr/policy.hpp"

namespace sfcmr {

struct ReconError {
    ReconErrorInfo info;
};

// One reversible L_e mutation; frames replay these backwards on undo, so the
// recorded indices are valid at the moment each op is reversed.
struct LeOp {
    enum Kind { kInsert, kRemove, kFlip } kind;
    int index = -1;
    EdgeRecord rec;
};

struct UndoFrame {
    std::vector<int> masked;
    std::vector<LeOp> le_ops;
    int p1_pushed = 0;
    int p2_pushed = 0;
    bool active_before = true;
    std::size_t lambda_size_before = 0;
    std::vector<std::size_t> lambda_revoked; // indices revoked this state
    int marker_streak_before = 0;
    int tip_vertex = -1;          // tip that expanded in this state
    int primary_record = -1;      // record walked or junctioned (repair target)
    bool pending_before_active = false;
};

struct LambdaEntry {
    int state = 0;
    int seq = -1;
    bool original = false;
    bool revoked = false;
};

struct ReconState {
    const Graph* g = nullptr;
    Mode mode = Mode::kCircuit;
    int v0 = 0;
    std::vector<EdgeRecord> initial_le;
    int s_initial = 0;

    VertexMask live;
    std::vector<EdgeRecord> le;
    std::vector<int> p1, p2;
    bool active_is_p1 = true;
    int pinned = 0; // 0 none, 1 = p1, 2 = p2
    int dead_d = 0;
    std::vector<LambdaEntry> lambda;
    std::vector<UndoFrame> frames;
    int state_index = 0;
    std::vector<int> expansions_x1;
    int next_seq = 0;
    int marker_junction_streak = 0;
    int states_begun = 0;   // monotone per expansion; the hard state budget
    int max_coverage = 0;   // best coverage this expansion; tolerance gates on it

    struct PendingPair {
        bool active = false;
        EdgeRecord y;
        int y_index = -1;
        int z_seq = -1;
        int expire_state = 0;
    } pending;

    int tip1() const { return p1.back(); }
    int tip2() const { return p2.back(); }
    int active_tip() const { return active_is_p1 ? tip1() : tip2(); }
    int other_tip() const { return active_is_p1 ? tip2() : tip1(); }
    int coverage() const { return static_cast<int>(p1.size() + p2.size()); }
    bool visited(int w) const { return !live.test(w) || w == tip1() || w == tip2(); }

    int dstar(int w) const;
    double mu_x() const;
    std::uint64_t digest() const;

    const EdgeRecord* find_seq(int seq) const;
};

int dstar_of(const Graph& g, const VertexMask& live, const std::vector<EdgeRecord>& le, int w);

struct ReconResult {
    bool done = false;
    std::vector<int> sequence;
    double mu_x = 1.0;
    int expansions = 0;
    double gamma_final = 0.0;
    double t_final = 0.0;
    std::map<int, int> strategy_fires;
    std::vector<EdgeRecord> final_le;
    VertexMask final_live;
};

class Reconstructor {
public:
    Reconstructor(const Graph& g, std::vector<EdgeRecord> le, int v0, Mode mode,
                  PolicyConfig cfg, std::uint64_t seed, std::ostream* trace = nullptr);

    ReconResult run();

    // Exposed for unit and property tests.
    ReconState& state() { return rs_; }
    PolicyState& policy() { return ps_; }
    Rspn& rspn() { return net_; }

    bool seed_expansion(int x1_hint); // returns false when no usable phi exists
    enum class StepOutcome { kCommitted, kDone, kError };
    StepOutcome step();
    void undo_states(int k);
    bool apply_actions(const std::vector<PolicyAction>& actions, bool& want_expansion,
                       int& expansion_x1, bool& abort);
    ReconErrorInfo last_error() const { return last_error_; }

private:
    friend std::vector<PolicyAction> run_policy(PolicyState&, Rspn&, ReconState&,
                                                const ReconErrorInfo&);

    UndoFrame& begin_frame();
    void commit_frame();
    void rollback_frame();
    void undo_frame(const UndoFrame& f);
    void diagnose(ReconErrorInfo& info);
    bool run_undo_scan_attach(int max_k);

    void mask_vertex(UndoFrame& f, int v);
    void flip_sync(UndoFrame& f, int seq);
    void insert_record(UndoFrame& f, EdgeRecord rec, int index = -1);
    void remove_record(UndoFrame& f, int seq, bool log_lambda);
    void push_active(UndoFrame& f, int w);

    bool constraints_hold(int v) const;
    int walk(UndoFrame& f, int v);
    struct Partition {
        std::vector<int> s0, s1, s2; // record seqs
    };
    Partition partition(UndoFrame& f, int v);
    int choose_successor(UndoFrame& f, int v, Partition& part);
    void removal_cases(UndoFrame& f, int vcur);
    bool attempt_attachment(int v, int w, std::uint64_t key);

    void trace_state(const char* action, int tip, int rec_seq);

    const Graph& g_;
    ReconState rs_;
    PolicyState ps_;
    Rspn net_;
    Mode mode_;
    std::ostream* trace_;
    ReconErrorInfo last_error_;
    std::optional<UndoFrame> open_frame_;
};

/// Full phase driver: expansion loop + policy, per Algorithm 9 / Theorem 3.
ReconResult reconstruct(const Graph& g, const std::vector<EdgeRecord>& le, int v0, Mode mode,
                        PolicyConfig cfg, std::uint64_t seed, std::ostream* trace = nullptr);

} // namespace sfcmr
