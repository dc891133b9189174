#include "sfcmr/graph.hpp"

#include <algorithm>

namespace sfcmr {

Graph::Graph(int n, const std::vector<std::pair<int, int>>& edges) : n_(n), adj_(n) {
    if (n <= 0) throw std::invalid_argument("graph needs at least one vertex");
    for (auto [u, v] : edges) {
        if (u < 0 || u >= n || v < 0 || v >= n) throw std::invalid_argument("edge endpoint out of range");
        if (u == v) throw std::invalid_argument("self-loop");
        adj_[u].push_back(v);
        adj_[v].push_back(u);
    }
    for (auto& nb : adj_) {
        std::sort(nb.begin(), nb.end());
        if (std::adjacent_find(nb.begin(), nb.end()) != nb.end())
            throw std::invalid_argument("parallel edge");
    }
    edges_ = edges;
    for (auto& e : edges_)
        if (e.first > e.second) std::swap(e.first, e.second);
    std::sort(edges_.begin(), edges_.end());
    m_ = static_cast<int>(edges_.size());
}

bool Graph::has_edge(int u, int v) const {
    if (u < 0 || u >= n_ || v < 0 || v >= n_) return false;
    const auto& nb = adj_[u];
    return std::binary_search(nb.begin(), nb.end(), v);
}

Graph Graph::with_edge(int u, int v) const {
    auto es = edges_;
    es.emplace_back(std::min(u, v), std::max(u, v));
    return Graph(n_, es);
}

std::vector<VertexMask> components(const Graph& g, const VertexMask& live) {
    std::vector<VertexMask> out;
    std::vector<char> seen(g.n(), 0);
    std::vector<int> stack;
    live.for_each([&](int s) {
        if (seen[s]) return;
        VertexMask comp(g.n());
        stack.push_back(s);
        seen[s] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            comp.set(v);
            for (int u : g.neighbors(v)) {
                if (!live.test(u) || seen[u]) continue;
                seen[u] = 1;
                stack.push_back(u);
            }
        }
        out.push_back(std::move(comp));
    });
    return out;
}

VertexMask articulations(const Graph& g, const VertexMask& live) {
    const int n = g.n();
    VertexMask arts(n);
    std::vector<int> pre(n, -1), low(n, 0), parent(n, -1), child_count(n, 0);
    int counter = 0;

    // Iterative lowpoint DFS; frame = (vertex, neighbor index).
    std::vector<std::pair<int, std::size_t>> stack;
    live.for_each([&](int root) {
        if (pre[root] != -1) return;
        pre[root] = low[root] = counter++;
        stack.emplace_back(root, 0);
        while (!stack.empty()) {
            auto& [v, idx] = stack.back();
            const auto& nb = g.neighbors(v);
            if (idx < nb.size()) {
                int u = nb[idx++];
                if (!live.test(u)) continue;
                if (pre[u] == -1) {
                    parent[u] = v;
                    ++child_count[v];
                    pre[u] = low[u] = counter++;
                    stack.emplace_back(u, 0);
                } else if (u != parent[v]) {
                    low[v] = std::min(low[v], pre[u]);
                }
            } else {
                stack.pop_back();
                int p = parent[v];
                if (p != -1) {
                    low[p] = std::min(low[p], low[v]);
                    if (p != root && low[v] >= pre[p]) arts.set(p);
                }
            }
        }
        if (child_count[root] >= 2) arts.set(root);
    });
    return arts;
}

std::vector<VertexMask> bfs_layers(const Graph& g, const VertexMask& live, int root) {
    std::vector<VertexMask> layers;
    std::vector<char> seen(g.n(), 0);
    std::vector<int> frontier{root};
    seen[root] = 1;
    while (!frontier.empty()) {
        VertexMask layer(g.n());
        for (int v : frontier) layer.set(v);
        layers.push_back(layer);
        std::vector<int> next;
        for (int v : frontier)
            for (int u : g.neighbors(v)) {
                if (!live.test(u) || seen[u]) continue;
                seen[u] = 1;
                next.push_back(u);
            }
        frontier = std::move(next);
    }
    return layers;
}

int degree_in(const Graph& g, const VertexMask& live, int v) {
    int d = 0;
    for (int u : g.neighbors(v))
        if (live.test(u)) ++d;
    return d;
}

std::uint64_t fnv64(const void* data, std::size_t len, std::uint64_t seed) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t fnv64_mask(const VertexMask& m, std::uint64_t seed) {
    return fnv64(m.words().data(), m.words().size() * sizeof(std::uint64_t), seed);
}

} // namespace sfcmr
