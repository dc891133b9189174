#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "sfcmr/oracle.hpp"

using namespace sfcmr;

namespace {

Graph cycle(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    return Graph(n, e);
}

Graph path_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return Graph(n, e);
}

// plain definitional check: permutation of V with consecutive adjacency
bool adjacency_walk(const Graph& g, const std::vector<int>& p, Mode mode) {
    if (static_cast<int>(p.size()) != g.n()) return false;
    std::vector<char> seen(g.n(), 0);
    for (int v : p) {
        if (v < 0 || v >= g.n() || seen[v]) return false;
        seen[v] = 1;
    }
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        if (!g.has_edge(p[i], p[i + 1])) return false;
    if (mode == Mode::kCircuit && g.n() > 1 && !g.has_edge(p.back(), p.front())) return false;
    return true;
}

Graph random_connected(int n, double p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coin(0, 1);
    while (true) {
        std::vector<std::pair<int, int>> e;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (coin(rng) < p) e.emplace_back(u, v);
        Graph g(n, e);
        if (components(g, VertexMask::full(n)).size() == 1) return g;
    }
}

} // namespace

TEST_CASE("validator on pinned examples") {
    auto c4 = cycle(4);
    CHECK(validate(c4, {0, 1, 2, 3}, Mode::kPath));
    CHECK(validate(c4, {0, 1, 2, 3}, Mode::kCircuit));

    auto p4 = path_graph(4);
    CHECK(!validate(p4, {1, 2, 3}, Mode::kPath)); // incomplete

    Graph bowtie(5, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {2, 4}, {3, 4}});
    CHECK(validate(bowtie, {0, 1, 2, 3, 4}, Mode::kPath));
    CHECK(!validate(bowtie, {0, 1, 2, 3, 4}, Mode::kCircuit)); // 4 !~ 0

    Graph single(1, {});
    CHECK(validate(single, {0}, Mode::kPath));
    CHECK(validate(single, {0}, Mode::kCircuit));

    // non-path permutation that plain vertex-deletion would wrongly accept
    CHECK(!validate(c4, {0, 1, 3, 2}, Mode::kPath));
}

TEST_CASE("validator equals the adjacency walk over all permutations, n <= 6") {
    std::mt19937_64 rng(606);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        Graph g = random_connected(n, 0.5, rng);
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            CHECK(validate(g, perm, Mode::kPath) == adjacency_walk(g, perm, Mode::kPath));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
}

TEST_CASE("exact solver on named instances") {
    Graph petersen = gen_named("petersen");
    CHECK(petersen.n() == 10);
    CHECK(petersen.m() == 15);
    for (int v = 0; v < 10; ++v) CHECK(petersen.neighbors(v).size() == 3);
    CHECK(!exact_solve(petersen, Mode::kCircuit).has_value());
    auto pw = exact_solve(petersen, Mode::kPath);
    REQUIRE(pw.has_value());
    CHECK(validate(petersen, *pw, Mode::kPath));

    Graph k4 = gen_named("k4");
    auto cw = exact_solve(k4, Mode::kCircuit);
    REQUIRE(cw.has_value());
    CHECK(validate(k4, *cw, Mode::kCircuit));

    Graph star4 = gen_named("star4");
    CHECK(!exact_solve(star4, Mode::kPath).has_value());

    Graph bowtie = gen_named("bowtie");
    auto bw = exact_solve(bowtie, Mode::kPath);
    REQUIRE(bw.has_value());
    CHECK(validate(bowtie, *bw, Mode::kPath));
    CHECK(!exact_solve(bowtie, Mode::kCircuit).has_value());

    Graph g33 = gen_grid(3, 3);
    auto g33p = exact_solve(g33, Mode::kPath);
    REQUIRE(g33p.has_value());
    CHECK(validate(g33, *g33p, Mode::kPath));
    CHECK(!exact_solve(g33, Mode::kCircuit).has_value());

    Graph g44 = gen_grid(4, 4);
    auto g44c = exact_solve(g44, Mode::kCircuit);
    REQUIRE(g44c.has_value());
    CHECK(validate(g44, *g44c, Mode::kCircuit));
}

TEST_CASE("dp kernels and backtracking agree on random graphs") {
    std::mt19937_64 rng(313);
    std::uniform_real_distribution<double> pd(0.2, 0.7);
    for (int trial = 0; trial < 120; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 11);
        Graph g = random_connected(n, pd(rng), rng);
        for (Mode mode : {Mode::kPath, Mode::kCircuit}) {
            const bool serial = ham_dp_serial(g, mode);
            CHECK(serial == ham_dp_parallel(g, mode));
            CHECK(serial == ham_backtracking(g, mode).has_value());
            auto witness = exact_solve(g, mode);
            CHECK(serial == witness.has_value());
            if (witness) CHECK(validate(g, *witness, mode));
        }
    }
}

TEST_CASE("witnesses are deterministic") {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        Graph g = gen_planted_cycle(9, 0.3, rng());
        auto a = exact_solve(g, Mode::kCircuit);
        auto b = exact_solve(g, Mode::kCircuit);
        REQUIRE(a.has_value());
        CHECK(*a == *b);
    }
}

TEST_CASE("cap handling") {
    Graph g = gen_planted_cycle(22, 0.1, 5);
    CHECK_THROWS_AS((void)exact_solve(g, Mode::kCircuit, 20), CapExceeded);
    auto w = exact_solve(g, Mode::kCircuit, 24); // falls to pruned backtracking
    REQUIRE(w.has_value());
    CHECK(validate(g, *w, Mode::kCircuit));
}

TEST_CASE("planted generators always contain their witness") {
    std::mt19937_64 rng(808);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 12);
        Graph gc = gen_planted_cycle(std::max(3, n), 0.2, rng());
        CHECK(exact_solve(gc, Mode::kCircuit).has_value());
        Graph gp = gen_planted_path(n, 0.2, rng());
        CHECK(exact_solve(gp, Mode::kPath).has_value());
    }
}

TEST_CASE("generator structure") {
    Graph g = gen_grid(3, 3);
    CHECK(g.n() == 9);
    CHECK(g.m() == 12);
    Graph s = gen_named("spider7");
    CHECK(s.n() == 7);
    CHECK(s.m() == 6);
    Graph gnp = gen_gnp_connected(12, 0.3, 77);
    CHECK(components(gnp, VertexMask::full(12)).size() == 1);
    CHECK(gen_gnp_connected(12, 0.3, 77).m() == gnp.m()); // deterministic
    CHECK_THROWS_AS(gen_named("nope"), InvalidParams);
    CHECK_THROWS_AS(gen_planted_cycle(2, 0.1, 1), InvalidParams);
}

TEST_CASE("circuit conventions at degenerate sizes") {
    Graph k2(2, {{0, 1}});
    CHECK(!ham_dp_serial(k2, Mode::kCircuit));
    CHECK(ham_dp_serial(k2, Mode::kPath));
    CHECK(!exact_solve(k2, Mode::kCircuit).has_value());
    Graph k1(1, {});
    CHECK(exact_solve(k1, Mode::kCircuit).has_value());
    CHECK(exact_solve(k1, Mode::kPath).has_value());
}
