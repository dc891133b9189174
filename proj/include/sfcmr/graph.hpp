// Undirected simple graph over dense integer vertex ids, plus the mask-based
// connectivity queries (components, articulation points, BFS layers) the
// solver runs against sub-scenes without physically deleting vertices.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sfcmr {

/// Bitset over vertex ids 0..n-1. Deleted vertices are cleared bits, so
/// undoing a deletion is a single set().
class VertexMask {
public:
    VertexMask() = default;
    explicit VertexMask(int n) : n_(n), words_((n + 63) / 64, 0) {}

    static VertexMask full(int n) {
        VertexMask m(n);
        for (int v = 0; v < n; ++v) m.set(v);
        return m;
    }

    int size() const { return n_; }
    bool test(int v) const { return (words_[v >> 6] >> (v & 63)) & 1u; }
    void set(int v) { words_[v >> 6] |= (std::uint64_t{1} << (v & 63)); }
    void reset(int v) { words_[v >> 6] &= ~(std::uint64_t{1} << (v & 63)); }

    int count() const {
        int c = 0;
        for (auto w : words_) c += __builtin_popcountll(w);
        return c;
    }
    bool any() const {
        for (auto w : words_) if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    VertexMask& operator&=(const VertexMask& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    VertexMask& operator|=(const VertexMask& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    /// this \ o
    VertexMask& subtract(const VertexMask& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }
    VertexMask minus(int v) const {
        VertexMask m(*this);
        m.reset(v);
        return m;
    }

    bool operator==(const VertexMask& o) const { return n_ == o.n_ && words_ == o.words_; }

    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            std::uint64_t w = words_[i];
            while (w) {
                int b = __builtin_ctzll(w);
                f(static_cast<int>(i * 64 + b));
                w &= w - 1;
            }
        }
    }
    int lowest() const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i]) return static_cast<int>(i * 64 + __builtin_ctzll(words_[i]));
        return -1;
    }
    std::vector<int> to_vector() const {
        std::vector<int> out;
        for_each([&](int v) { out.push_back(v); });
        return out;
    }
    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    int n_ = 0;
    std::vector<std::uint64_t> words_;
};

class Graph {
public:
    Graph(int n, const std::vector<std::pair<int, int>>& edges);

    int n() const { return n_; }
    int m() const { return m_; }
    const std::vector<int>& neighbors(int v) const { return adj_[v]; }
    bool has_edge(int u, int v) const;
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    /// Copy of this graph with one extra edge (used for the temporary
    /// root-to-current edge of a context change).
    Graph with_edge(int u, int v) const;

private:
    int n_ = 0;
    int m_ = 0;
    std::vector<std::vector<int>> adj_;
    std::vector<std::pair<int, int>> edges_;
};

// Connectivity queries restricted to the live vertex set. Vertices outside
// `live` are treated as deleted.
std::vector<VertexMask> components(const Graph& g, const VertexMask& live);

/// { v in live : w(G[live - v]) > w(G[live]) }, computed by lowpoint DFS.
VertexMask articulations(const Graph& g, const VertexMask& live);

/// Layers by exact distance from root within live; layer 0 = {root}.
/// Unreachable live vertices appear in no layer.
std::vector<VertexMask> bfs_layers(const Graph& g, const VertexMask& live, int root);

int degree_in(const Graph& g, const VertexMask& live, int v);

// FNV-1a, used for state digests in undo tests and component keys.
std::uint64_t fnv64(const void* data, std::size_t len, std::uint64_t seed = 1469598103934665603ull);
std::uint64_t fnv64_mask(const VertexMask& m, std::uint64_t seed = 1469598103934665603ull);

} // namespace sfcmr
