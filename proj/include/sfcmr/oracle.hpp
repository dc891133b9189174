// Ground truth: the sequence validator, an exact Hamiltonian path/circuit
// solver (bitmask DP with a serial reference and an OpenMP kernel, plus
// pruned backtracking as the independent second route), and the graph
// generators used to build test corpora.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfcmr/graph.hpp"

namespace sfcmr {

enum class Mode { kPath, kCircuit };

struct CapExceeded {
    int n;
    int cap;
};

/// Algorithm-1 validator plus the adjacency walk and, in circuit mode, the
/// last~first closure check. n=1 sequences are accepted in both modes.
bool validate(const Graph& g, const std::vector<int>& p, Mode mode);

// Held-Karp existence DP, endpoint sets packed into one word per subset.
// Both kernels compute the same table; the parallel one fills it by popcount
// layers. Exposed separately so tests and the benchmark can compare them.
bool ham_dp_serial(const Graph& g, Mode mode);
bool ham_dp_parallel(const Graph& g, Mode mode);

/// Pruned backtracking solver; independent of the DP route.
std::optional<std::vector<int>> ham_backtracking(const Graph& g, Mode mode);

/// Exact solve with witness: DP for n <= 20, pruned backtracking up to cap,
/// CapExceeded beyond. Deterministic for a fixed graph.
std::optional<std::vector<int>> exact_solve(const Graph& g, Mode mode, int cap = 20);

// Generators. All deterministic in (params, seed).
Graph gen_planted_cycle(int n, double p, std::uint64_t seed);
Graph gen_planted_path(int n, double p, std::uint64_t seed);
Graph gen_gnp_connected(int n, double p, std::uint64_t seed);
Graph gen_grid(int rows, int cols);
Graph gen_named(const std::string& name); // petersen, bowtie, k4, star4, spider7

struct InvalidParams {
    std::string what;
};

Graph generate(const std::string& family, int n, double p, std::uint64_t seed,
               const std::string& name = "", int rows = 0, int cols = 0);

} // namespace sfcmr
