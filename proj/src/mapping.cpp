#include "sfcmr/mapping.hpp"

#include <algorithm>
#include <cassert>
#include <optional>

namespace sfcmr {

int incidence(const std::vector<EdgeRecord>& le, int w) {
    int c = 0;
    for (const auto& e : le)
        if (e.touches(w)) ++c;
    return c;
}

namespace {

struct MapSharedState {
    const Graph* g;
    std::vector<EdgeRecord> le;
    VertexMask visited;
    std::vector<int> select_log; // every select in order; H* propagation slices it
    MappingLimits lim;
    MappingStats stats;
    std::mt19937_64 rng;
    int next_seq = 0;
    int next_ctx = 1;
};

struct Ctx {
    int id;
    Scene scene;
    int eps = 0;
};

void sync_error(MapSharedState& sh, Ctx& ctx, bool throw_error) {
    ++ctx.eps;
    ++sh.stats.kappa;
    sh.stats.max_epsilon = std::max(sh.stats.max_epsilon, ctx.eps);
    sh.stats.kappa_max = std::max(sh.stats.kappa_max, sh.stats.kappa);
    if (sh.stats.kappa > sh.lim.m) {
        sh.stats.aborted = true;
        throw AbortMapping{};
    }
    if (ctx.eps > sh.lim.eta) throw DiscardScene{ctx.id};
    if (throw_error) throw MapError{};
}

// Remove the oldest record touching w once its incidence exceeds two.
void trim_incidence(std::vector<EdgeRecord>& le, int w) {
    if (incidence(le, w) <= 2) return;
    for (auto it = le.begin(); it != le.end(); ++it) {
        if (it->touches(w)) {
            le.erase(it);
            return;
        }
    }
}

// Algorithm 7. At the base case (v == u) the terminal fragment edge is kept
// only when v carries no record yet, otherwise K3-style circuits would gain
// a spurious closing record.
void do_select(MapSharedState& sh, Scene& sc, int v, int u) {
    sc.mask(v);
    sh.visited.set(v);
    sh.select_log.push_back(v);
    ++sh.stats.selects;
    if (v == sc.root()) sc.unmask(v);
    const int last = sc.last_of(v);
    if (last >= 0 && sh.g->has_edge(last, v)) {
        const bool append = (v != u) || incidence(sh.le, v) == 0;
        if (append) {
            sh.le.push_back(EdgeRecord{last, v, false, sh.next_seq++, RecordOrigin::kMapped});
            trim_incidence(sh.le, last);
            trim_incidence(sh.le, v);
        }
    }
    sc.set_last(u, v);
}

std::optional<SubsceneLabels> relabel_safe(const Graph& g, const VertexMask& live, int root_pref) {
    if (live.none()) return std::nullopt;
    const int root = live.test(root_pref) ? root_pref : live.lowest();
    try {
        return label_subscene(g, live, root);
    } catch (const DisconnectedError&) {
        return std::nullopt;
    }
}

int count_labeled_neighbors(const Graph& g, const VertexMask& live,
                            const std::vector<LabelSet>& L, int v, Label l) {
    int c = 0;
    for (int u : g.neighbors(v))
        if (live.test(u) && L[u].has(l)) ++c;
    return c;
}

// Maximal chain w2..wk from u where every chain vertex has degree 2 in
// live-without-u (the constraint 4/5/8 "vH-path of subdivisions").
std::vector<int> forced_chain(const Graph& g, const VertexMask& live_wo_u, int u) {
    std::vector<int> tail;
    int start = -1;
    for (int w : g.neighbors(u))
        if (live_wo_u.test(w) && degree_in(g, live_wo_u, w) == 2) {
            start = w;
            break;
        }
    if (start < 0) return tail;
    VertexMask taken(live_wo_u.size());
    int cur = start, prev = -1;
    while (true) {
        tail.push_back(cur);
        taken.set(cur);
        int next = -1;
        for (int w : g.neighbors(cur)) {
            if (!live_wo_u.test(w) || w == prev || taken.test(w)) continue;
            if (degree_in(g, live_wo_u, w) == 2) {
                next = w;
                break;
            }
        }
        if (next < 0) break;
        prev = cur;
        cur = next;
    }
    return tail;
}

// Shared body of constraints 4 and 5: after removing the candidate and its
// forced chain, some currently-minimal-articulation vertex must relabel to a
// non-breakpoint (Def. 9, b-treatable).
bool c45_core(const Graph& g, const VertexMask& live_base, const std::vector<LabelSet>& base_labels,
              int target, int root_pref) {
    VertexMask live2 = live_base.minus(target);
    auto tail = forced_chain(g, live2, target);
    VertexMask live3 = live2;
    for (int w : tail) live3.reset(w);
    auto sub3 = relabel_safe(g, live3, root_pref);
    if (!sub3) return false;
    bool ok = false;
    live3.for_each([&](int w) {
        if (base_labels[w].has(kMinArt) && !sub3->labels[w].breakpoint()) ok = true;
    });
    return ok;
}

bool constraint3(const Graph& g, const VertexMask& live, const SubsceneLabels& sub, int u) {
    for (int a : g.neighbors(u)) {
        if (!live.test(a) || !sub.labels[a].has(kMinArt)) continue;
        if (count_labeled_neighbors(g, live, sub.labels, a, kMinArt) == 0) return true;
    }
    return false;
}

bool constraint6(const Graph& g, const VertexMask& live, const SubsceneLabels& sub, int u) {
    if (count_labeled_neighbors(g, live, sub.labels, u, kMinArt) != 1) return false;
    for (int a : g.neighbors(u)) {
        if (!live.test(a) || !sub.labels[a].has(kMinArt)) continue;
        for (auto it = sub.tiers.rbegin(); it != sub.tiers.rend(); ++it) {
            if (!it->verts.test(a)) continue;
            return !it->verts.test(u) && articulations(g, it->verts).test(a);
        }
    }
    return false;
}

bool constraint9(const Graph& g, const VertexMask& live, const SubsceneLabels& sub, int u,
                 int root_pref) {
    for (int a : g.neighbors(u)) {
        if (!live.test(a) || !sub.labels[a].has(kMinArt)) continue;
        if (count_labeled_neighbors(g, live, sub.labels, a, kDegen) < 2) return true;
        VertexMask live2 = live.minus(u);
        auto sub2 = relabel_safe(g, live2, root_pref);
        if (sub2 && count_labeled_neighbors(g, live2, sub2->labels, a, kDegen) < 2) return true;
    }
    return false;
}

bool constraint7(const Graph& g, const VertexMask& live, const SubsceneLabels& sub, int u,
                 int root_pref) {
    for (int w : g.neighbors(u)) {
        if (!live.test(w) || !sub.labels[w].has(kMinLeaf)) continue;
        VertexMask live2 = live.minus(u);
        if (!live2.test(w)) continue;
        auto sub2 = relabel_safe(g, live2, root_pref);
        if (sub2 && c45_core(g, live2, sub2->labels, w, root_pref)) return true;
    }
    return false;
}

bool constraint8(const Graph& g, const VertexMask& live, const SubsceneLabels& sub, int u,
                 int root_pref) {
    VertexMask live2 = live.minus(u);
    auto tail = forced_chain(g, live2, u);
    const int wk = tail.empty() ? u : tail.back();
    VertexMask live3 = live2;
    for (int w : tail) live3.reset(w);
    auto sub3 = relabel_safe(g, live3, root_pref);
    if (!sub3) return false;
    for (int z : g.neighbors(wk)) {
        if (!live3.test(z) || !sub.labels[z].has(kMinLeaf)) continue;
        if (c45_core(g, live3, sub3->labels, z, root_pref)) return true;
    }
    return false;
}

} // namespace

int MappingEngine::priority_class(LabelSet l) {
    if (l.has(kMinArt)) return -1;
    if (l.has(kMinLeaf)) return 4;
    if (l.has(kDegen)) return 3;
    if (l.has(kArtN)) return 2;
    if (l.has(kInter)) return 0;
    return 1; // v_N
}

bool MappingEngine::successor_allowed(const Graph& g, const VertexMask& live_mv,
                                      const SubsceneLabels& sub, int u) {
    const LabelSet l = sub.labels[u];
    const int root_pref = live_mv.lowest();
    if (l.has(kMinArt)) return false;
    if (l.has(kDegen)) {
        if (!sub.has_class(kMinArt)) return true; // constraint 10
        return constraint3(g, live_mv, sub, u) || constraint9(g, live_mv, sub, u, root_pref) ||
               constraint6(g, live_mv, sub, u) || c45_core(g, live_mv, sub.labels, u, root_pref) ||
               constraint7(g, live_mv, sub, u, root_pref) ||
               constraint8(g, live_mv, sub, u, root_pref);
    }
    if (l.has(kMinLeaf)) return c45_core(g, live_mv, sub.labels, u, root_pref); // constraint 5
    return true; // v_A v_N, v_I, v_N via constraint 11 (lowest priorities)
}

std::vector<int> rank_successors(const Graph& g, const Scene& s, int v,
                                 const SubsceneLabels& sub, std::mt19937_64& rng) {
    VertexMask live_mv = s.live().minus(v);
    std::vector<std::vector<int>> buckets(5);
    for (int u : g.neighbors(v)) {
        if (!s.is_live(u)) continue;
        if (u == s.root()) {
            const bool final_edge = s.live_degree(v) == 1 && s.live_degree(u) == 1 &&
                                    s.live_count() == 2 && g.has_edge(v, u);
            if (!final_edge) continue;
        }
        if (!MappingEngine::successor_allowed(g, live_mv, sub, u)) continue;
        int cls = MappingEngine::priority_class(sub.labels[u]);
        if (cls < 0) continue;
        buckets[cls].push_back(u);
    }
    std::vector<int> out;
    for (int cls = 4; cls >= 0; --cls) {
        std::shuffle(buckets[cls].begin(), buckets[cls].end(), rng);
        out.insert(out.end(), buckets[cls].begin(), buckets[cls].end());
    }
    return out;
}

namespace {

struct Snapshot {
    Scene scene;
    std::vector<EdgeRecord> le;
    VertexMask visited;
    std::size_t log_size;
    Snapshot(const MapSharedState& sh, const Scene& sc)
        : scene(sc), le(sh.le), visited(sh.visited), log_size(sh.select_log.size()) {}
    void restore(MapSharedState& sh, Scene& sc) const {
        sc = scene;
        sh.le = le;
        sh.visited = visited;
        sh.select_log.resize(log_size);
    }
};

void map_vertex(MapSharedState& sh, Ctx& ctx, int v);

// Lines 4..22 of Algorithm 6: the split branch and the H* excursion.
void hstar_branch(MapSharedState& sh, Ctx& ctx, int v) {
    Scene& H = ctx.scene;
    if (!H.check_constraints_1_2(v)) sync_error(sh, ctx, true);
    H.mask(v);

    const int old_root = H.root();
    VertexMask none(sh.g->n());
    std::optional<ComponentInfo> chosen;
    for (auto& comp : H.creatable_components(none)) {
        if (!comp.creatable || comp.hn != 1) continue;
        bool meets = comp.vertices.test(old_root);
        if (!meets)
            for (int u : sh.g->neighbors(old_root))
                if (comp.vertices.test(u)) meets = true;
        if (!meets) continue;
        if (!chosen || comp.vertices.lowest() < chosen->vertices.lowest()) chosen = comp;
    }
    if (!chosen) {
        sync_error(sh, ctx, true);
        return;
    }

    const int beta = chosen->boundary.lowest();
    VertexMask star_live = chosen->vertices;
    star_live.set(old_root);
    star_live.set(beta);
    Ctx star{sh.next_ctx++, Scene(*sh.g, star_live, beta)};
    star.scene.set_current(old_root);

    const std::size_t log_mark = sh.select_log.size();
    try {
        star.scene.context_change(beta, old_root);
        map_vertex(sh, star, old_root);

        // Every vertex a Select consumed inside the excursion leaves H too
        // (vertices dropped by the N(v)=0 cleanup are exempt).
        for (std::size_t i = log_mark; i < sh.select_log.size(); ++i)
            if (H.is_live(sh.select_log[i])) H.mask(sh.select_log[i]);
        if (H.is_live(beta)) H.set_split(v, false);
        H.unmask(v);
        H.unmask(beta);
        H.set_root(beta);
        H.context_change(beta, v);
        map_vertex(sh, ctx, v);
        if (H.is_live(v) && H.live_degree(v) == 0) H.mask(v);
    } catch (const DisconnectedError&) {
        sync_error(sh, ctx, true);
    } catch (const MapError&) {
        sync_error(sh, ctx, true);
    } catch (const DiscardScene&) {
        sync_error(sh, ctx, true);
    }
}

void map_vertex(MapSharedState& sh, Ctx& ctx, int v) {
    Scene& H = ctx.scene;
    if (H.live_count() == 1) {
        do_select(sh, H, v, v);
        return;
    }

    if (H.split(v)) {
        VertexMask live_mv = H.live().minus(v);
        if (articulations(*sh.g, live_mv).any()) {
            hstar_branch(sh, ctx, v);
            return;
        }
    }

    if (H.live_degree(v) > 0) {
        H.set_split(v, false);
        VertexMask live_mv = H.live().minus(v);
        auto sub = relabel_safe(*sh.g, live_mv, H.root());
        std::vector<int> candidates;
        if (sub) candidates = rank_successors(*sh.g, H, v, *sub, sh.rng);

        bool found = false;
        for (int u : candidates) {
            Snapshot snap(sh, H);
            try {
                do_select(sh, H, v, u);
                sh.stats.chosen_classes.push_back(MappingEngine::priority_class(sub->labels[u]));
                map_vertex(sh, ctx, u);
                found = true;
                break;
            } catch (const MapError&) {
                snap.restore(sh, H);
                sync_error(sh, ctx, false);
            } catch (const DiscardScene& d) {
                snap.restore(sh, H);
                if (d.ctx == ctx.id) throw;
                sync_error(sh, ctx, false);
            }
        }
        if (!found) sync_error(sh, ctx, true);
    } else {
        // N(v) empty: v leaves the scene silently (this removal class is
        // exempt from H* propagation).
        H.mask(v);
    }
}

} // namespace

struct MappingEngine::Impl {
    const Graph* g;
    MappingLimits lim;
    std::uint64_t seed;
};

MappingEngine::MappingEngine(const Graph& g, MappingLimits limits, std::uint64_t seed)
    : impl_(new Impl{&g, limits, seed}) {}

MappingEngine::~MappingEngine() { delete impl_; }

MappingResult MappingEngine::run(int v0) {
    MapSharedState sh{impl_->g, {}, VertexMask(impl_->g->n()), {}, impl_->lim, {},
                      std::mt19937_64(impl_->seed)};
    Ctx ctx{0, Scene(*impl_->g, VertexMask::full(impl_->g->n()), v0)};
    MappingResult res;
    try {
        ctx.scene.context_change(v0, v0);
        map_vertex(sh, ctx, v0);
        res.ok = true;
    } catch (const DisconnectedError&) {
    } catch (const MapError&) {
    } catch (const DiscardScene&) {
    } catch (const AbortMapping&) {
    }
    res.le = std::move(sh.le);
    res.stats = sh.stats;
    return res;
}

MappingResult run_mapping(const Graph& g, int v0, MappingLimits limits, std::uint64_t seed) {
    if (limits.eta <= 0) limits.eta = g.n();
    if (limits.m <= 0) limits.m = (g.n() * g.n() - g.n()) / 2;
    MappingEngine eng(g, limits, seed);
    return eng.run(v0);
}

} // namespace sfcmr
