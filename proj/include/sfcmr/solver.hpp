// Full-pipeline driver: mapping with root restarts, then reconstruction,
// plus report assembly and DOT export of the final overlay.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sfcmr/oracle.hpp"
#include "sfcmr/reconstruction.hpp"

namespace sfcmr {

struct SolveOptions {
    Mode mode = Mode::kCircuit;
    std::uint64_t seed = 0;
    std::optional<int> root;
    int max_restarts = -1; // -1: one attempt per vertex
    std::optional<int> eta_override;
    std::optional<int> m_override;
    bool split_blocks = false;
    PolicyConfig policy;
    std::ostream* trace = nullptr;
    bool timing = false;
};

struct SolveReport {
    std::string status = "mapping_failed"; // found | aborted | mapping_failed
    std::optional<std::vector<int>> sequence;
    Mode mode = Mode::kCircuit;
    int n = 0;
    int m = 0;
    double mu_x = 1.0;
    long long kappa_total = 0;
    int kappa_max_attempt = 0;
    int max_epsilon = 0;
    int expansions = 0;
    double gamma_final = 0.0;
    double t_final = 0.0;
    int restarts = 0;
    std::uint64_t seed = 0;
    int root_used = -1;
    long long elapsed_ms = 0; // emitted only when timing was requested
    bool timing = false;
    std::map<int, int> strategy_fires;
    int bound_eta = 0;
    int bound_m = 0;
    int expansion_limit = 0;
    std::vector<EdgeRecord> final_le; // for DOT export; not serialized

    std::string to_json() const;
};

SolveReport solve(const Graph& g, const SolveOptions& opts);

/// Final H* in DOT form. Red: mapped records converted to synchronized,
/// purple: junction records, green: attachment records, dashed gray:
/// surviving non-synchronized records.
std::string to_dot(const Graph& g, const std::vector<EdgeRecord>& le);

} // namespace sfcmr
