#include "sfcmr/scene.hpp"

#include <algorithm>

namespace sfcmr {

std::vector<Tier> maximum_induction(const Graph& g, const VertexMask& live, int root) {
    std::vector<Tier> tiers;
    VertexMask absorbed(g.n());
    absorbed.set(root);
    std::vector<int> frontier{root};
    const int total = live.count();
    int covered = 1;
    while (true) {
        std::vector<int> next;
        for (int v : frontier)
            for (int u : g.neighbors(v)) {
                if (!live.test(u) || absorbed.test(u)) continue;
                absorbed.set(u);
                next.push_back(u);
            }
        if (!next.empty()) {
            covered += static_cast<int>(next.size());
            if (covered != total) {
                VertexMask rest = live;
                rest.subtract(absorbed);
                tiers.push_back(Tier{rest, static_cast<int>(tiers.size())});
            }
            frontier = std::move(next);
        } else if (covered != total) {
            throw DisconnectedError{};
        }
        if (covered == total) break;
    }
    return tiers;
}

std::vector<LabelSet> lv_label(const Graph& g, const VertexMask& live,
                               const std::vector<Tier>& tiers) {
    std::vector<LabelSet> L(g.n());

    for (const auto& tier : tiers) {
        VertexMask tier_arts = articulations(g, tier.verts);
        tier.verts.for_each([&](int w) {
            if (degree_in(g, live, w) != 2) {
                if (tier_arts.test(w)) L[w].bits |= kMinArt;
                if (degree_in(g, tier.verts, w) == 1) L[w].bits |= kMinLeaf;
            } else if (tier_arts.test(w)) {
                L[w].bits |= kArtN;
            }
        });
    }

    // {v_A, v_L} collapses to v_A.
    live.for_each([&](int w) {
        if (L[w].has(kMinArt) && L[w].has(kMinLeaf)) L[w].bits &= ~kMinLeaf;
    });

    // Neighbors of breakpoints become pure v_D (overwrites prior labels).
    VertexMask degen(g.n());
    live.for_each([&](int b) {
        if (!L[b].breakpoint()) return;
        for (int w : g.neighbors(b)) {
            if (!live.test(w)) continue;
            if (!L[w].breakpoint()) degen.set(w);
        }
    });
    degen.for_each([&](int w) { L[w].bits = kDegen; });

    live.for_each([&](int w) {
        if (!L[w].empty()) return;
        int dn = 0;
        for (int u : g.neighbors(w))
            if (live.test(u) && L[u].has(kDegen)) ++dn;
        if (dn >= 2) L[w].bits |= kInter;
    });
    live.for_each([&](int w) {
        if (L[w].empty()) L[w].bits |= kNeutral;
    });
    return L;
}

SubsceneLabels label_subscene(const Graph& g, const VertexMask& live, int root) {
    SubsceneLabels out;
    out.tiers = maximum_induction(g, live, root);
    out.labels = lv_label(g, live, out.tiers);
    return out;
}

Scene::Scene(const Graph& g, VertexMask live, int root)
    : g_(&g),
      live_(std::move(live)),
      root_(root),
      current_(root),
      labels_(g.n()),
      last_(g.n(), -1),
      split_(g.n(), 1) {}

bool Scene::virtual_articulation(int w) const {
    int dn = 0;
    for (int u : g_->neighbors(w))
        if (live_.test(u) && labels_[u].has(kDegen)) ++dn;
    return dn >= 2;
}

std::vector<ComponentInfo> Scene::creatable_components(const VertexMask& extra_removed) const {
    VertexMask base = live_;
    base.subtract(extra_removed);
    VertexMask arts = articulations(*g_, base);
    VertexMask inner = base;
    inner.subtract(arts);

    auto base_comps = components(*g_, base);
    std::vector<ComponentInfo> out;
    for (auto& comp : components(*g_, inner)) {
        ComponentInfo info;
        info.boundary = VertexMask(g_->n());
        comp.for_each([&](int w) {
            for (int a : g_->neighbors(w))
                if (arts.test(a)) info.boundary.set(a);
        });
        info.hn = info.boundary.count();
        info.creatable = std::none_of(base_comps.begin(), base_comps.end(),
                                      [&](const VertexMask& c) { return c == comp; });
        info.vertices = std::move(comp);
        out.push_back(std::move(info));
    }
    return out;
}

bool Scene::check_constraints_1_2(int v) const { return check_constraints_1_2(v, root_); }

bool Scene::check_constraints_1_2(int v, int v0) const {
    VertexMask removed(g_->n());
    removed.set(v);
    VertexMask reduced = live_;
    reduced.reset(v);
    if (articulations(*g_, reduced).none()) return true; // guard H_vH != 0

    VertexMask forbidden(g_->n());
    forbidden.set(v);
    forbidden.set(v0);
    for (int u : g_->neighbors(v)) forbidden.set(u);
    for (int u : g_->neighbors(v0)) forbidden.set(u);

    for (const auto& comp : creatable_components(removed)) {
        bool touches_forbidden = false;
        comp.vertices.for_each([&](int w) {
            if (forbidden.test(w)) touches_forbidden = true;
        });
        // Constraint 1: creatable, hn = 1, disjoint from {v} u N(v) u {v0} u N(v0).
        if (comp.creatable && comp.hn == 1 && !touches_forbidden) return false;
        // Constraint 2: existing component holding v0 with hn = 0.
        if (!comp.creatable && comp.hn == 0 && comp.vertices.test(v0)) return false;
    }
    return true;
}

void Scene::context_change(int w, int v) {
    if (!cc_done_) {
        cc_done_ = true;
        live_.for_each([&](int y) {
            last_[y] = -1;
            split_[y] = 1;
        });
    }
    root_ = w;
    const bool need_edge = (w != v) && !(g_->has_edge(v, w) && live_.test(w) && live_.test(v));
    if (need_edge) {
        Graph aug = g_->with_edge(v, w);
        auto sub = label_subscene(aug, live_, w);
        tiers_ = std::move(sub.tiers);
        labels_ = std::move(sub.labels);
    } else {
        auto sub = label_subscene(*g_, live_, w);
        tiers_ = std::move(sub.tiers);
        labels_ = std::move(sub.labels);
    }
}

} // namespace sfcmr
