// Mapping phase: recursive walk of the minimal scene that degenerates
// breakpoint components under constraints 3..11 and the label priority order,
// emitting the non-synchronized edge sequence L_e.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "sfcmr/scene.hpp"

namespace sfcmr {

enum class RecordOrigin : std::uint8_t { kMapped, kMarker, kJunction, kAttachment };

struct EdgeRecord {
    int u = -1;
    int v = -1;
    bool synchronized = false;
    int seq = 0; // unique insertion id
    RecordOrigin origin = RecordOrigin::kMapped;

    bool touches(int w) const { return u == w || v == w; }
    int other(int w) const { return u == w ? v : u; }
    bool self_marker() const { return u == v; }
};

int incidence(const std::vector<EdgeRecord>& le, int w);

// Signals of the pre-synchronization error handler.
struct MapError {};
struct DiscardScene { int ctx; };
struct AbortMapping {};

struct MappingLimits {
    int eta = 0; // local error limit, default |V|
    int m = 0;   // global error limit, default (|V|^2-|V|)/2
};

struct MappingStats {
    int kappa = 0;
    int kappa_max = 0;     // max value kappa reached (m+1 exactly on abort)
    int max_epsilon = 0;
    int selects = 0;
    bool aborted = false;
    std::vector<int> chosen_classes; // label class of every selected u
};

struct MappingResult {
    bool ok = false;
    std::vector<EdgeRecord> le;
    MappingStats stats;
};

/// One mapping attempt rooted at v0. Applies the initial context change,
/// runs Algorithm 6 and returns L_e; ok=false on phase failure (the partial
/// L_e is still returned).
MappingResult run_mapping(const Graph& g, int v0, MappingLimits limits, std::uint64_t seed);

// Exposed for unit tests.
struct MapShared;
struct MapCtx;

class MappingEngine {
public:
    MappingEngine(const Graph& g, MappingLimits limits, std::uint64_t seed);
    ~MappingEngine();

    MappingResult run(int v0);

    /// Constraint gate: may u follow v, judged in H[V-v] with labels `sub`?
    static bool successor_allowed(const Graph& g, const VertexMask& live_minus_v,
                                  const SubsceneLabels& sub, int u);
    /// Priority class for ranking: 4 = v_L .. 0 = v_I; -1 = never (v_A).
    static int priority_class(LabelSet l);

private:
    struct Impl;
    Impl* impl_;
};

/// Ranked candidate list for v: filtered by successor_allowed, ordered
/// v_L > v_D > v_Av_N > v_N > v_I with rng tie-breaks, root excluded unless
/// the final-edge condition holds.
std::vector<int> rank_successors(const Graph& g, const Scene& s, int v,
                                 const SubsceneLabels& sub, std::mt19937_64& rng);

} // namespace sfcmr
