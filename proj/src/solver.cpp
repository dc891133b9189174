#include "sfcmr/solver.hpp"

#include <chrono>
#include <sstream>

#include "json.hpp"
#include "sfcmr/mapping.hpp"

namespace sfcmr {

namespace {

// One mapped+reconstructed run from a specific root.
struct AttemptOutcome {
    bool mapped = false;
    MappingResult map;
    std::optional<ReconResult> recon;
};

AttemptOutcome attempt(const Graph& g, int root, const SolveOptions& opts, std::uint64_t seed) {
    AttemptOutcome out;
    MappingLimits lim;
    lim.eta = opts.eta_override.value_or(0);
    lim.m = opts.m_override.value_or(0);
    out.map = run_mapping(g, root, lim, seed);
    if (!out.map.ok) return out;
    out.mapped = true;
    out.recon = reconstruct(g, out.map.le, root, opts.mode, opts.policy, seed ^ 0x5bd1e995u,
                            opts.trace);
    return out;
}

SolveReport solve_single(const Graph& g, const SolveOptions& opts) {
    SolveReport rep;
    rep.mode = opts.mode;
    rep.n = g.n();
    rep.m = g.m();
    rep.seed = opts.seed;
    rep.timing = opts.timing;
    rep.bound_eta = opts.eta_override.value_or(g.n());
    rep.bound_m = opts.m_override.value_or((g.n() * g.n() - g.n()) / 2);
    rep.expansion_limit = std::max(1, g.n() - 1);

    if (g.n() == 1) {
        rep.status = "found";
        rep.sequence = std::vector<int>{0};
        rep.root_used = 0;
        return rep;
    }

    const int root0 = opts.root.value_or(0);
    const int max_attempts = opts.max_restarts >= 0 ? opts.max_restarts + 1 : g.n();
    for (int i = 0; i < max_attempts; ++i) {
        const int root = (root0 + i) % g.n();
        auto res = attempt(g, root, opts, opts.seed + static_cast<std::uint64_t>(i) * 0x9e3779b9u);
        rep.kappa_total += res.map.stats.kappa;
        rep.kappa_max_attempt = std::max(rep.kappa_max_attempt, res.map.stats.kappa_max);
        rep.max_epsilon = std::max(rep.max_epsilon, res.map.stats.max_epsilon);
        rep.restarts = i;
        if (!res.mapped) continue;
        rep.root_used = root;
        const auto& rr = *res.recon;
        rep.mu_x = rr.mu_x;
        rep.expansions = rr.expansions;
        rep.gamma_final = rr.gamma_final;
        rep.t_final = rr.t_final;
        rep.strategy_fires = rr.strategy_fires;
        rep.final_le = rr.final_le;
        if (rr.done && validate(g, rr.sequence, opts.mode)) {
            rep.status = "found";
            rep.sequence = rr.sequence;
        } else {
            rep.status = "aborted";
        }
        return rep;
    }
    rep.status = "mapping_failed";
    return rep;
}

// --split-blocks: solve each biconnected block separately (path mode on cut
// vertices) and stitch fragments when their endpoints align at the cuts.
SolveReport solve_split_blocks(const Graph& g, const SolveOptions& opts) {
    VertexMask full = VertexMask::full(g.n());
    VertexMask arts = articulations(g, full);
    if (arts.none() || opts.mode != Mode::kPath) return solve_single(g, opts);

    // Blocks = components after removing the cuts, re-extended by their
    // adjacent cut vertices. Only chains of two blocks over one cut vertex
    // are stitched; anything else falls back to a single instance.
    if (arts.count() != 1) return solve_single(g, opts);
    const int cut = arts.lowest();
    VertexMask inner = full.minus(cut);
    auto comps = components(g, inner);
    if (comps.size() != 2) return solve_single(g, opts);

    SolveReport rep;
    rep.mode = opts.mode;
    rep.n = g.n();
    rep.m = g.m();
    rep.seed = opts.seed;
    rep.timing = opts.timing;
    rep.bound_eta = opts.eta_override.value_or(g.n());
    rep.bound_m = opts.m_override.value_or((g.n() * g.n() - g.n()) / 2);
    rep.expansion_limit = std::max(1, g.n() - 1);

    std::vector<std::vector<int>> fragments;
    for (auto& comp : comps) {
        VertexMask block = comp;
        block.set(cut);
        std::vector<int> ids = block.to_vector();
        std::vector<int> back(g.n(), -1);
        for (std::size_t i = 0; i < ids.size(); ++i) back[ids[i]] = static_cast<int>(i);
        std::vector<std::pair<int, int>> edges;
        for (auto [u, v] : g.edges())
            if (block.test(u) && block.test(v)) edges.emplace_back(back[u], back[v]);
        Graph sub(static_cast<int>(ids.size()), edges);
        SolveOptions sub_opts = opts;
        sub_opts.split_blocks = false;
        sub_opts.root = back[cut];
        SolveReport sub_rep = solve_single(sub, sub_opts);
        rep.kappa_total += sub_rep.kappa_total;
        rep.restarts += sub_rep.restarts;
        if (sub_rep.status != "found") {
            rep.status = sub_rep.status;
            return rep;
        }
        std::vector<int> frag;
        for (int v : *sub_rep.sequence) frag.push_back(ids[v]);
        fragments.push_back(std::move(frag));
    }
    // Each fragment must end (or start) at the cut vertex to be stitched.
    for (auto& frag : fragments) {
        if (frag.front() == cut) std::reverse(frag.begin(), frag.end());
        if (frag.back() != cut) {
            rep.status = "aborted";
            return rep;
        }
    }
    std::vector<int> seq = fragments[0];
    seq.insert(seq.end(), fragments[1].rbegin() + 1, fragments[1].rend());
    if (validate(g, seq, Mode::kPath)) {
        rep.status = "found";
        rep.sequence = seq;
        rep.root_used = cut;
    } else {
        rep.status = "aborted";
    }
    return rep;
}

} // namespace

SolveReport solve(const Graph& g, const SolveOptions& opts) {
    const auto start = std::chrono::steady_clock::now();
    SolveReport rep = opts.split_blocks ? solve_split_blocks(g, opts) : solve_single(g, opts);
    const auto end = std::chrono::steady_clock::now();
    if (opts.timing)
        rep.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(end - start).count();
    return rep;
}

std::string SolveReport::to_json() const {
    nlohmann::ordered_json j;
    j["status"] = status;
    if (sequence) j["sequence"] = *sequence;
    else j["sequence"] = nullptr;
    j["mode"] = mode == Mode::kPath ? "path" : "circuit";
    j["n"] = n;
    j["m"] = m;
    j["mu_x"] = mu_x;
    j["kappa_total"] = kappa_total;
    j["kappa_max_attempt"] = kappa_max_attempt;
    j["max_epsilon"] = max_epsilon;
    j["expansions"] = expansions;
    j["gamma_final"] = gamma_final;
    j["t_final"] = t_final;
    j["restarts"] = restarts;
    j["seed"] = seed;
    j["root_used"] = root_used;
    j["elapsed_ms"] = timing ? elapsed_ms : 0;
    nlohmann::ordered_json fires = nlohmann::ordered_json::object();
    for (const auto& [k, v] : strategy_fires) fires["s" + std::to_string(k)] = v;
    j["strategy_fires"] = fires;
    j["bound_eta"] = bound_eta;
    j["bound_m"] = bound_m;
    j["expansion_limit"] = expansion_limit;
    return j.dump(2) + "\n";
}

std::string to_dot(const Graph& g, const std::vector<EdgeRecord>& le) {
    std::ostringstream out;
    out << "graph hstar {\n";
    for (int v = 0; v < g.n(); ++v) out << "  " << v << ";\n";
    for (const auto& e : le) {
        if (e.self_marker()) continue;
        const char* color = "gray";
        const char* style = "dashed";
        if (e.synchronized) {
            style = "solid";
            switch (e.origin) {
                case RecordOrigin::kMapped: color = "red"; break;
                case RecordOrigin::kJunction: color = "purple"; break;
                case RecordOrigin::kAttachment: color = "green"; break;
                default: color = "gray"; break;
            }
        }
        out << "  " << e.u << " -- " << e.v << " [color=" << color << ", style=" << style
            << "];\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace sfcmr
