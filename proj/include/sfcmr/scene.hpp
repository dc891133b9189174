// Minimal scene H = (V, E, v0, L, Omega): the rooted, labeled, tiered working
// graph. Tiers come from stripping successive BFS frontiers off the root;
// labels classify vertices into breakpoints (minimal articulations / leaves),
// degeneration, intersection and neutral classes.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sfcmr/graph.hpp"

namespace sfcmr {

struct DisconnectedError {};

enum Label : std::uint8_t {
    kMinArt  = 1,  // v_A
    kMinLeaf = 2,  // v_L
    kArtN    = 4,  // v_A v_N (degree-2 tier articulation)
    kDegen   = 8,  // v_D
    kInter   = 16, // v_I
    kNeutral = 32, // v_N
};

struct LabelSet {
    std::uint8_t bits = 0;
    bool has(Label l) const { return bits & l; }
    bool breakpoint() const { return bits & (kMinArt | kMinLeaf); }
    bool empty() const { return bits == 0; }
};

struct Tier {
    VertexMask verts;
    int index = 0;
};

/// Tier list plus per-vertex labels for one live set, always computed as a
/// pair so they can never go stale relative to each other.
struct SubsceneLabels {
    std::vector<Tier> tiers;
    std::vector<LabelSet> labels;

    bool has_class(Label l) const {
        for (const auto& ls : labels)
            if (ls.has(l)) return true;
        return false;
    }
};

struct ComponentInfo {
    VertexMask vertices;
    int hn = 0;              // alpha = |boundary|
    VertexMask boundary;     // beta: articulations adjacent to the border
    bool creatable = false;  // |H^c| = F: absent from the components of H[live]
};

// Algorithm-2 tier decomposition rooted at `root`; throws DisconnectedError
// when the BFS stalls before covering live.
std::vector<Tier> maximum_induction(const Graph& g, const VertexMask& live, int root);

// Algorithm-3 labeling over the given tiers. Degrees "in H" are live degrees.
std::vector<LabelSet> lv_label(const Graph& g, const VertexMask& live,
                               const std::vector<Tier>& tiers);

SubsceneLabels label_subscene(const Graph& g, const VertexMask& live, int root);

class Scene {
public:
    Scene(const Graph& g, VertexMask live, int root);

    const Graph& graph() const { return *g_; }
    const VertexMask& live() const { return live_; }
    int root() const { return root_; }
    int current() const { return current_; }
    void set_current(int v) { current_ = v; }
    void set_root(int v) { root_ = v; }

    bool is_live(int v) const { return live_.test(v); }
    void mask(int v) { live_.reset(v); }
    void unmask(int v) { live_.set(v); }
    int live_count() const { return live_.count(); }
    int live_degree(int v) const { return degree_in(*g_, live_, v); }

    int last_of(int v) const { return last_[v]; }
    void set_last(int v, int w) { last_[v] = w; }
    bool split(int v) const { return split_[v] != 0; }
    void set_split(int v, bool b) { split_[v] = b ? 1 : 0; }

    const std::vector<Tier>& tiers() const { return tiers_; }
    const std::vector<LabelSet>& labels() const { return labels_; }
    LabelSet label(int v) const { return labels_[v]; }

    /// Eq. (1): w has at least two neighbors labeled v_D.
    bool virtual_articulation(int w) const;

    /// Components of H[live - arts(live - extra) - extra] with their alpha /
    /// beta / creatable properties, relative to the scene minus extra_removed.
    std::vector<ComponentInfo> creatable_components(const VertexMask& extra_removed) const;

    /// Constraints 1 and 2 evaluated in H[V - v] with the scene root as v0.
    /// True when both hold (vacuously when H[V - v] has no articulations).
    bool check_constraints_1_2(int v) const;
    bool check_constraints_1_2(int v, int v0) const;

    /// Algorithm 5: re-root at w, recompute tiers and labels with a temporary
    /// vw edge when w and v are not adjacent. Edge-preserving.
    void context_change(int w, int v);

    bool first_cc_done() const { return cc_done_; }

private:
    const Graph* g_;
    VertexMask live_;
    int root_;
    int current_;
    std::vector<LabelSet> labels_;
    std::vector<Tier> tiers_;
    std::vector<int> last_;
    std::vector<char> split_;
    bool cc_done_ = false;
};

} // namespace sfcmr
