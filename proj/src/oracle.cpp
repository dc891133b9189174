#include "sfcmr/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#ifdef SFCMR_HAVE_OPENMP
#include <omp.h>
#endif

namespace sfcmr {

bool validate(const Graph& g, const std::vector<int>& p, Mode mode) {
    const int n = g.n();
    if (p.empty()) return false;
    if (n == 1) return p.size() == 1 && p[0] == 0;

    VertexMask live = VertexMask::full(n);
    std::size_t deleted = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const int v = p[i];
        if (v < 0 || v >= n || !live.test(v)) break;
        // adjacency walk
        if (i + 1 < p.size()) {
            const int next = p[i + 1];
            if (next < 0 || next >= n || !g.has_edge(v, next)) break;
        }
        // Algorithm 1 articulation pre-check (redundant for accepts).
        const int before = static_cast<int>(components(g, live).size());
        VertexMask after_mask = live.minus(v);
        if (after_mask.any()) {
            const int after = static_cast<int>(components(g, after_mask).size());
            if (after > before) break;
        }
        live.reset(v);
        ++deleted;
    }
    if (deleted != static_cast<std::size_t>(n) || p.size() != static_cast<std::size_t>(n))
        return false;
    if (mode == Mode::kCircuit && !g.has_edge(p.back(), p.front())) return false;
    return true;
}

namespace {

std::vector<std::uint32_t> adjacency_words(const Graph& g) {
    std::vector<std::uint32_t> adj(g.n(), 0);
    for (int v = 0; v < g.n(); ++v)
        for (int u : g.neighbors(v)) adj[v] |= (1u << u);
    return adj;
}

// dp[mask] = set of endpoints v such that some simple path covers exactly
// `mask` and ends at v. Circuit mode anchors the path at vertex 0.
bool dp_exists(const Graph& g, Mode mode, bool parallel) {
    const int n = g.n();
    if (n == 1) return true;
    if (mode == Mode::kCircuit && n == 2) return false;
    const auto adj = adjacency_words(g);
    const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
    std::vector<std::uint32_t> dp(std::size_t{1} << n, 0);

    if (mode == Mode::kCircuit) {
        dp[1u << 0] = 1u << 0;
    } else {
        for (int v = 0; v < n; ++v) dp[1u << v] = 1u << v;
    }

    if (!parallel) {
        for (std::uint32_t mask = 1; mask <= full; ++mask) {
            std::uint32_t ends = dp[mask];
            if (!ends) continue;
            while (ends) {
                const int v = __builtin_ctz(ends);
                ends &= ends - 1;
                std::uint32_t nxt = adj[v] & ~mask & full;
                while (nxt) {
                    const int u = __builtin_ctz(nxt);
                    nxt &= nxt - 1;
                    dp[mask | (1u << u)] |= (1u << u);
                }
            }
        }
    } else {
        // Layered frontier push: masks with k bits only feed masks with k+1
        // bits, so one layer is a parallel loop. The atomic fetch-or makes
        // the 0 -> nonzero transition unique, which keeps the next frontier
        // duplicate-free and the walk sparse on thin graphs.
        std::vector<std::uint32_t> frontier;
        for (std::uint32_t mask = 1; mask <= full; ++mask)
            if (dp[mask] && __builtin_popcount(mask) == 1) frontier.push_back(mask);
        while (!frontier.empty()) {
            std::vector<std::uint32_t> next;
            const auto sz = static_cast<long long>(frontier.size());
            if (sz < 4096) {
                // Small layers are not worth the atomic traffic.
                for (long long i = 0; i < sz; ++i) {
                    const std::uint32_t mask = frontier[i];
                    std::uint32_t ends = dp[mask];
                    while (ends) {
                        const int v = __builtin_ctz(ends);
                        ends &= ends - 1;
                        std::uint32_t nxt = adj[v] & ~mask & full;
                        while (nxt) {
                            const int u = __builtin_ctz(nxt);
                            nxt &= nxt - 1;
                            const std::uint32_t tgt = mask | (1u << u);
                            if (dp[tgt] == 0) next.push_back(tgt);
                            dp[tgt] |= 1u << u;
                        }
                    }
                }
                frontier = std::move(next);
                continue;
            }
#ifdef SFCMR_HAVE_OPENMP
#pragma omp parallel
#endif
            {
                std::vector<std::uint32_t> local;
#ifdef SFCMR_HAVE_OPENMP
#pragma omp for schedule(dynamic, 256) nowait
#endif
                for (long long i = 0; i < sz; ++i) {
                    const std::uint32_t mask = frontier[i];
                    std::uint32_t ends = dp[mask];
                    while (ends) {
                        const int v = __builtin_ctz(ends);
                        ends &= ends - 1;
                        std::uint32_t nxt = adj[v] & ~mask & full;
                        while (nxt) {
                            const int u = __builtin_ctz(nxt);
                            nxt &= nxt - 1;
                            const std::uint32_t tgt = mask | (1u << u);
                            const std::uint32_t prev =
                                __atomic_fetch_or(&dp[tgt], 1u << u, __ATOMIC_RELAXED);
                            if (prev == 0) local.push_back(tgt);
                        }
                    }
                }
#ifdef SFCMR_HAVE_OPENMP
#pragma omp critical
#endif
                next.insert(next.end(), local.begin(), local.end());
            }
            frontier = std::move(next);
        }
    }

    if (mode == Mode::kPath) return dp[full] != 0;
    std::uint32_t ends = dp[full] & ~1u; // circuit: end adjacent to anchor 0
    return (ends & adj[0]) != 0;
}

// Witness extraction by re-walking the serial dp table.
std::optional<std::vector<int>> dp_witness(const Graph& g, Mode mode) {
    const int n = g.n();
    if (n == 1) return std::vector<int>{0};
    if (mode == Mode::kCircuit && n == 2) return std::nullopt;
    const auto adj = adjacency_words(g);
    const std::uint32_t full = (1u << n) - 1;
    std::vector<std::uint32_t> dp(std::size_t{1} << n, 0);
    if (mode == Mode::kCircuit) dp[1u << 0] = 1u << 0;
    else
        for (int v = 0; v < n; ++v) dp[1u << v] = 1u << v;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        std::uint32_t ends = dp[mask];
        while (ends) {
            const int v = __builtin_ctz(ends);
            ends &= ends - 1;
            std::uint32_t nxt = adj[v] & ~mask & full;
            while (nxt) {
                const int u = __builtin_ctz(nxt);
                nxt &= nxt - 1;
                dp[mask | (1u << u)] |= (1u << u);
            }
        }
    }
    int end = -1;
    std::uint32_t finals = dp[full];
    if (mode == Mode::kCircuit) finals &= adj[0] & ~1u;
    if (!finals) return std::nullopt;
    end = __builtin_ctz(finals); // lowest end under the fixed order
    std::vector<int> rev{end};
    std::uint32_t mask = full;
    int cur = end;
    while (__builtin_popcount(mask) > 1) {
        const std::uint32_t prev_mask = mask ^ (1u << cur);
        std::uint32_t cands = dp[prev_mask] & adj[cur];
        const int prev = __builtin_ctz(cands);
        rev.push_back(prev);
        mask = prev_mask;
        cur = prev;
    }
    std::reverse(rev.begin(), rev.end());
    return rev;
}

struct Backtracker {
    const Graph& g;
    Mode mode;
    std::vector<int> path;
    VertexMask used;
    bool found = false;
    std::vector<int> witness;

    Backtracker(const Graph& gr, Mode m) : g(gr), mode(m), used(gr.n()) {}

    bool remaining_connected(int cur) {
        VertexMask rest = VertexMask::full(g.n());
        rest.subtract(used);
        rest.set(cur); // current endpoint must reach the rest
        if (rest.count() <= 1) return true;
        return components(g, rest).size() == 1;
    }

    void dfs(int v) {
        if (found) return;
        path.push_back(v);
        used.set(v);
        if (path.size() == static_cast<std::size_t>(g.n())) {
            if (mode == Mode::kPath || g.has_edge(v, path.front())) {
                found = true;
                witness = path;
            }
        } else if (remaining_connected(v)) {
            for (int u : g.neighbors(v)) {
                if (used.test(u)) continue;
                dfs(u);
                if (found) break;
            }
        }
        used.reset(v);
        path.pop_back();
    }
};

} // namespace

bool ham_dp_serial(const Graph& g, Mode mode) { return dp_exists(g, mode, false); }
bool ham_dp_parallel(const Graph& g, Mode mode) { return dp_exists(g, mode, true); }

std::optional<std::vector<int>> ham_backtracking(const Graph& g, Mode mode) {
    if (g.n() == 1) return std::vector<int>{0};
    if (mode == Mode::kCircuit && g.n() == 2) return std::nullopt;
    Backtracker bt(g, mode);
    if (mode == Mode::kCircuit) {
        bt.dfs(0);
    } else {
        for (int s = 0; s < g.n() && !bt.found; ++s) bt.dfs(s);
    }
    if (bt.found) return bt.witness;
    return std::nullopt;
}

std::optional<std::vector<int>> exact_solve(const Graph& g, Mode mode, int cap) {
    if (g.n() <= 20) return dp_witness(g, mode);
    if (g.n() <= cap) return ham_backtracking(g, mode);
    throw CapExceeded{g.n(), cap};
}

namespace {

Graph build_from(int n, std::vector<std::pair<int, int>> edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return Graph(n, edges);
}

void add_norm(std::vector<std::pair<int, int>>& edges, int u, int v) {
    edges.emplace_back(std::min(u, v), std::max(u, v));
}

} // namespace

Graph gen_planted_cycle(int n, double p, std::uint64_t seed) {
    if (n < 3) throw InvalidParams{"planted_cycle needs n >= 3"};
    std::mt19937_64 rng(seed);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) add_norm(edges, perm[i], perm[(i + 1) % n]);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (coin(rng) < p) add_norm(edges, u, v);
    return build_from(n, std::move(edges));
}

Graph gen_planted_path(int n, double p, std::uint64_t seed) {
    if (n < 2) throw InvalidParams{"planted_path needs n >= 2"};
    std::mt19937_64 rng(seed);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < n; ++i) add_norm(edges, perm[i], perm[i + 1]);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (coin(rng) < p) add_norm(edges, u, v);
    return build_from(n, std::move(edges));
}

Graph gen_gnp_connected(int n, double p, std::uint64_t seed) {
    if (n < 1) throw InvalidParams{"gnp_connected needs n >= 1"};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::vector<std::pair<int, int>> edges;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (coin(rng) < p) add_norm(edges, u, v);
        if (n == 1) return Graph(1, {});
        if (edges.empty()) continue;
        Graph g = build_from(n, std::move(edges));
        if (components(g, VertexMask::full(n)).size() == 1) return g;
    }
    throw InvalidParams{"gnp_connected: no connected sample after 10000 attempts"};
}

Graph gen_grid(int rows, int cols) {
    if (rows < 1 || cols < 1) throw InvalidParams{"grid needs rows, cols >= 1"};
    std::vector<std::pair<int, int>> edges;
    auto id = [&](int r, int c) { return r * cols + c; };
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) add_norm(edges, id(r, c), id(r, c + 1));
            if (r + 1 < rows) add_norm(edges, id(r, c), id(r + 1, c));
        }
    return Graph(rows * cols, edges);
}

Graph gen_named(const std::string& name) {
    if (name == "k4") {
        return Graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    }
    if (name == "bowtie") {
        return Graph(5, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {2, 4}, {3, 4}});
    }
    if (name == "star4") {
        return Graph(4, {{0, 1}, {0, 2}, {0, 3}});
    }
    if (name == "spider7") {
        return Graph(7, {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {2, 5}, {3, 6}});
    }
    if (name == "petersen") {
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < 5; ++i) {
            add_norm(edges, i, (i + 1) % 5);          // outer cycle
            add_norm(edges, 5 + i, 5 + (i + 2) % 5);  // inner pentagram
            add_norm(edges, i, 5 + i);                // spokes
        }
        return build_from(10, std::move(edges));
    }
    throw InvalidParams{"unknown named graph: " + name};
}

Graph generate(const std::string& family, int n, double p, std::uint64_t seed,
               const std::string& name, int rows, int cols) {
    if (family == "planted_cycle") return gen_planted_cycle(n, p, seed);
    if (family == "planted_path") return gen_planted_path(n, p, seed);
    if (family == "gnp_connected") return gen_gnp_connected(n, p, seed);
    if (family == "grid") return gen_grid(rows > 0 ? rows : n, cols > 0 ? cols : n);
    if (family == "named") return gen_named(name);
    throw InvalidParams{"unknown family: " + family};
}

} // namespace sfcmr
