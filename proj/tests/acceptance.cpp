// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exits nonzero when any fails.
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sfcmr/edge_list.hpp"
#include "sfcmr/mapping.hpp"
#include "sfcmr/oracle.hpp"
#include "sfcmr/policy.hpp"
#include "sfcmr/reconstruction.hpp"
#include "sfcmr/solver.hpp"

#ifdef SFCMR_HAVE_OPENMP
#include <omp.h>
#endif

using namespace sfcmr;
namespace fs = std::filesystem;

namespace {

std::string g_cli_path;
std::string g_source_dir;

bool report(int idx, const char* name, bool ok, const std::string& detail = "") {
    std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", idx, name,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    return ok;
}

bool adjacency_walk(const Graph& g, const std::vector<int>& p) {
    if (static_cast<int>(p.size()) != g.n()) return false;
    std::vector<char> seen(g.n(), 0);
    for (int v : p) {
        if (v < 0 || v >= g.n() || seen[v]) return false;
        seen[v] = 1;
    }
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        if (!g.has_edge(p[i], p[i + 1])) return false;
    return true;
}

// 1. Validator agrees with the definitional adjacency walk on every
//    permutation of every corpus graph with n <= 6.
bool criterion1() {
    std::mt19937_64 rng(101);
    int graphs = 0;
    long long checked = 0;
    while (graphs < 60) {
        const int n = 2 + static_cast<int>(rng() % 5);
        Graph g = gen_gnp_connected(n, 0.5, rng());
        ++graphs;
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            ++checked;
            if (validate(g, perm, Mode::kPath) != adjacency_walk(g, perm)) return false;
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return checked > 0;
}

// 2. Bitmask DP and pruned backtracking agree on existence, both modes,
//    for 300 seeded random graphs with n <= 12 (the OpenMP kernel included).
bool criterion2() {
    std::mt19937_64 rng(202);
    for (int i = 0; i < 300; ++i) {
        const int n = 4 + static_cast<int>(rng() % 9);
        const double p = 0.25 + 0.4 * (static_cast<double>(rng() % 1000) / 1000.0);
        Graph g = gen_gnp_connected(n, p, rng());
        for (Mode mode : {Mode::kPath, Mode::kCircuit}) {
            const bool dp = ham_dp_serial(g, mode);
            if (dp != ham_dp_parallel(g, mode)) return false;
            if (dp != ham_backtracking(g, mode).has_value()) return false;
        }
    }
    return true;
}

// 3. Named instances, all derived through the exact solver.
bool criterion3() {
    struct Case {
        const char* name;
        Mode mode;
        bool expect_found;
    };
    const Case cases[] = {
        {"petersen", Mode::kCircuit, false}, {"petersen", Mode::kPath, true},
        {"k4", Mode::kCircuit, true},        {"star4", Mode::kPath, false},
        {"bowtie", Mode::kPath, true},       {"bowtie", Mode::kCircuit, false},
    };
    for (const auto& c : cases) {
        Graph g = gen_named(c.name);
        auto w = exact_solve(g, c.mode);
        if (w.has_value() != c.expect_found) return false;
        if (w && !validate(g, *w, c.mode)) return false;
    }
    Graph g33 = gen_grid(3, 3);
    if (!exact_solve(g33, Mode::kPath) || exact_solve(g33, Mode::kCircuit)) return false;
    Graph g44 = gen_grid(4, 4);
    if (!exact_solve(g44, Mode::kCircuit)) return false;
    return true;
}

struct CorpusStats {
    int runs = 0;
    int found = 0;
    int invalid = 0;
    int bound_violations = 0;
};

CorpusStats run_corpus() {
    struct Spec {
        std::string family;
        int n;
        double p;
        int rows, cols;
        Mode mode;
        std::uint64_t seed;
    };
    std::vector<Spec> specs;
    std::mt19937_64 rng(404);
    for (int i = 0; i < 420; ++i) {
        const int n = 5 + static_cast<int>(rng() % 36);
        specs.push_back({"planted_cycle", std::max(5, n), 0.15, 0, 0,
                         i % 2 ? Mode::kCircuit : Mode::kPath, rng()});
    }
    for (int i = 0; i < 240; ++i) {
        const int n = 5 + static_cast<int>(rng() % 36);
        specs.push_back({"planted_path", n, 0.2, 0, 0, Mode::kPath, rng()});
    }
    for (int i = 0; i < 240; ++i) {
        const int n = 5 + static_cast<int>(rng() % 14);
        specs.push_back({"gnp_connected", n, 0.4, 0, 0,
                         i % 2 ? Mode::kCircuit : Mode::kPath, rng()});
    }
    const int grids[][2] = {{3, 3}, {3, 4}, {4, 4}, {4, 5}, {5, 5}, {3, 7}, {2, 8}, {6, 6}};
    for (int i = 0; i < 120; ++i) {
        const auto& rc = grids[i % 8];
        specs.push_back({"grid", 0, 0, rc[0], rc[1], i % 2 ? Mode::kCircuit : Mode::kPath,
                         rng()});
    }

    CorpusStats st;
    st.runs = static_cast<int>(specs.size());
    const auto count = static_cast<long long>(specs.size());
    std::vector<int> invalid(specs.size(), 0), viol(specs.size(), 0), found(specs.size(), 0);
#ifdef SFCMR_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long i = 0; i < count; ++i) {
        const auto& sp = specs[i];
        Graph g = generate(sp.family, sp.n, sp.p, sp.seed, "", sp.rows, sp.cols);
        SolveOptions opts;
        opts.mode = sp.mode;
        opts.seed = sp.seed ^ 0xabcdef;
        SolveReport rep = solve(g, opts);
        if (rep.status == "found") {
            found[i] = 1;
            if (!rep.sequence || !validate(g, *rep.sequence, sp.mode)) invalid[i] = 1;
        }
        if (rep.kappa_max_attempt > rep.bound_m + 1) viol[i] = 1;
        if (rep.expansions > std::max(1, g.n() - 1)) viol[i] = 1;
    }
    for (std::size_t i = 0; i < specs.size(); ++i) {
        st.found += found[i];
        st.invalid += invalid[i];
        st.bound_violations += viol[i];
    }
    return st;
}

// 5b. Abort fires exactly at kappa = m + 1 on overflow.
bool abort_exactness() {
    Graph star = gen_named("star4");
    for (int m = 1; m <= 6; ++m) {
        MappingLimits lim;
        lim.eta = 100;
        lim.m = m;
        auto res = run_mapping(star, 0, lim, 9);
        if (res.stats.aborted != (res.stats.kappa_max == m + 1)) return false;
        if (res.stats.kappa_max > m + 1) return false;
    }
    std::mt19937_64 rng(505);
    for (int t = 0; t < 50; ++t) {
        Graph g = gen_planted_cycle(6 + static_cast<int>(rng() % 20), 0.15, rng());
        auto res = run_mapping(g, 0, {}, rng());
        const int m = (g.n() * g.n() - g.n()) / 2;
        if (res.stats.kappa_max > m + 1) return false;
        if (res.stats.kappa_max == m + 1 && !res.stats.aborted) return false;
    }
    return true;
}

// 6. Rate formulas at their pinned values plus accumulator recomputation.
bool criterion6() {
    if (std::abs(negativity_term(0.0) - 0.3989422804014327) > 1e-12) return false;
    if (std::abs(negativity_term(0.5) - 2 * 0.3989422804014327) > 1e-12) return false;
    if (control_sigmoid(0.0) != 0.5) return false;
    if (ring(1.5, 1.5)) return false;
    if (!ring(1.0, 1.5)) return false;

    std::mt19937_64 rng(606);
    for (int t = 0; t < 20; ++t) {
        Graph g = gen_planted_cycle(8 + static_cast<int>(rng() % 10), 0.25, rng());
        auto mp = run_mapping(g, 0, {}, rng());
        if (!mp.ok) continue;
        Reconstructor r(g, mp.le, 0, Mode::kCircuit, PolicyConfig{}, rng());
        if (!r.seed_expansion(-1)) continue;
        for (int s = 0; s < 25; ++s) {
            auto oc = r.step();
            const auto& ps = r.policy();
            if (std::abs(ps.gamma - ps.recompute_gamma()) > 1e-12) return false;
            if (std::abs(ps.t - ps.recompute_t()) > 1e-12) return false;
            if (oc != Reconstructor::StepOutcome::kCommitted) break;
        }
    }
    return true;
}

// 7. Byte-identical CLI reports across two process invocations.
bool criterion7(std::string& detail) {
    if (g_cli_path.empty()) {
        detail = "no --cli given";
        return false;
    }
    fs::path dir = fs::temp_directory_path() / "sfcmr_accept";
    fs::create_directories(dir);
    std::mt19937_64 rng(707);
    for (int cfg = 0; cfg < 20; ++cfg) {
        const int n = 6 + static_cast<int>(rng() % 14);
        Graph g = cfg % 3 == 0 ? gen_gnp_connected(n, 0.5, rng())
                               : gen_planted_cycle(n, 0.2, rng());
        const fs::path in = dir / ("g" + std::to_string(cfg) + ".txt");
        std::ofstream(in) << to_edge_list(g);
        const std::string mode = cfg % 2 ? "path" : "circuit";
        const std::uint64_t seed = rng();
        std::string extras;
        if (cfg % 4 == 0) extras = " --root " + std::to_string(cfg % n);
        if (cfg % 5 == 0) extras += " --max-restarts 2";
        for (int run = 0; run < 2; ++run) {
            const fs::path out = dir / ("r" + std::to_string(cfg) + "_" + std::to_string(run) + ".json");
            std::ostringstream cmd;
            cmd << g_cli_path << " solve --input " << in << " --mode " << mode << " --seed "
                << seed << extras << " --json " << out << " > /dev/null 2>&1";
            const int rc = std::system(cmd.str().c_str());
            if (rc < 0) {
                detail = "failed to launch the cli";
                return false;
            }
        }
        std::ifstream a(dir / ("r" + std::to_string(cfg) + "_0.json"));
        std::ifstream b(dir / ("r" + std::to_string(cfg) + "_1.json"));
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        if (sa.str().empty() || sa.str() != sb.str()) {
            detail = "config " + std::to_string(cfg) + " differs";
            return false;
        }
    }
    return true;
}

// 8. Completeness baseline on planted_cycle(n <= 30, p = 0.15), regression-gated.
bool criterion8(std::string& detail) {
    std::vector<std::pair<int, std::uint64_t>> instances;
    std::mt19937_64 rng(808);
    for (int i = 0; i < 200; ++i) instances.push_back({6 + static_cast<int>(rng() % 25), rng()});
    std::vector<int> ok(instances.size(), 0);
    const auto count = static_cast<long long>(instances.size());
#ifdef SFCMR_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long i = 0; i < count; ++i) {
        Graph g = gen_planted_cycle(instances[i].first, 0.15, instances[i].second);
        SolveOptions opts;
        opts.mode = Mode::kCircuit;
        opts.seed = instances[i].second;
        SolveReport rep = solve(g, opts);
        ok[i] = rep.status == "found" ? 1 : 0;
    }
    const double rate =
        std::accumulate(ok.begin(), ok.end(), 0) / static_cast<double>(instances.size());

    double baseline = 1.1; // absent baseline fails loudly
    const fs::path bl = fs::path(g_source_dir) / "tests" / "data" / "baseline_planted_cycle.json";
    if (fs::exists(bl)) {
        std::ifstream in(bl);
        nlohmann::json j;
        in >> j;
        baseline = j.at("success_rate").get<double>();
    }
    std::ostringstream os;
    os.precision(4);
    os << "rate=" << rate << " baseline=" << baseline;
    detail = os.str();
    return rate >= baseline - 0.05;
}

// 9. Randomized k-state undo restores digests exactly, 500 trials.
bool criterion9() {
    std::mt19937_64 rng(909);
    int trials = 0;
    while (trials < 500) {
        const int n = 6 + static_cast<int>(rng() % 14);
        Graph g = gen_planted_cycle(n, 0.25, rng());
        auto mp = run_mapping(g, 0, {}, rng());
        if (!mp.ok) continue;
        Reconstructor r(g, mp.le, 0, rng() % 2 ? Mode::kCircuit : Mode::kPath, PolicyConfig{},
                        rng());
        if (!r.seed_expansion(-1)) continue;
        std::vector<std::uint64_t> digests{r.state().digest()};
        for (int s = 0; s < 10; ++s) {
            const auto before = r.state().frames.size();
            const auto oc = r.step();
            if (r.state().frames.size() > before) digests.push_back(r.state().digest());
            if (oc != Reconstructor::StepOutcome::kCommitted) break;
        }
        if (digests.size() < 2) continue;
        ++trials;
        const int depth = 1 + static_cast<int>(rng() % (digests.size() - 1));
        r.undo_states(depth);
        if (r.state().digest() != digests[digests.size() - 1 - depth]) return false;
    }
    return true;
}

// CLI surface: subcommands, exit codes, and bench determinism.
bool cli_surface(std::string& detail) {
    fs::path dir = fs::temp_directory_path() / "sfcmr_accept";
    fs::create_directories(dir);
    auto sh = [&](const std::string& cmd) {
        const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
        return rc < 0 ? -1 : WEXITSTATUS(rc);
    };
    const fs::path k4 = dir / "k4.txt";
    const fs::path star = dir / "star.txt";
    if (sh(g_cli_path + " gen --family named --name k4 --out " + k4.string()) != 0) {
        detail = "gen failed";
        return false;
    }
    if (sh(g_cli_path + " gen --family named --name star4 --out " + star.string()) != 0) {
        detail = "gen star failed";
        return false;
    }
    if (sh(g_cli_path + " oracle --input " + k4.string() + " --mode circuit") != 0) {
        detail = "oracle exit";
        return false;
    }
    if (sh(g_cli_path + " validate --input " + k4.string() + " --mode circuit --path 0,1,2,3") != 0) {
        detail = "validate true exit";
        return false;
    }
    if (sh(g_cli_path + " validate --input " + k4.string() + " --mode circuit --path 0,2,1") != 4) {
        detail = "validate false exit";
        return false;
    }
    const int star_rc = sh(g_cli_path + " solve --input " + star.string() + " --mode path");
    if (star_rc != 2 && star_rc != 3) {
        detail = "star solve exit " + std::to_string(star_rc);
        return false;
    }
    if (sh(g_cli_path + " solve --input " + k4.string() + " --mode circuit --seed 1") != 0) {
        detail = "k4 solve exit";
        return false;
    }
    if (sh(g_cli_path + " dump-config") != 0) {
        detail = "dump-config exit";
        return false;
    }
    // bench: deterministic bytes and aggregate consistency across two runs
    const fs::path suite = fs::path(g_source_dir) / "bench" / "suite_default.json";
    const fs::path b1 = dir / "b1.json", b2 = dir / "b2.json";
    if (sh(g_cli_path + " bench --suite " + suite.string() + " --out " + b1.string()) != 0 ||
        sh(g_cli_path + " bench --suite " + suite.string() + " --out " + b2.string()) != 0) {
        detail = "bench failed";
        return false;
    }
    std::ifstream fa(b1), fb(b2);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    if (sa.str().empty() || sa.str() != sb.str()) {
        detail = "bench not deterministic";
        return false;
    }
    nlohmann::json j = nlohmann::json::parse(sa.str());
    int found = 0;
    for (const auto& r : j["results"])
        if (r["status"] == "found") ++found;
    if (found != j["found"].get<int>() ||
        j["found"].get<int>() + j["aborted"].get<int>() + j["mapping_failed"].get<int>() !=
            j["instances"].get<int>()) {
        detail = "bench aggregates inconsistent";
        return false;
    }
    return true;
}

} // namespace

int main(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--cli") g_cli_path = argv[i + 1];
        if (flag == "--source") g_source_dir = argv[i + 1];
    }
    if (g_source_dir.empty()) g_source_dir = ".";

    bool all = true;
    all &= report(1, "validator equals the definitional adjacency walk (n<=6, all permutations)",
                  criterion1());
    all &= report(2, "bitmask DP vs pruned backtracking agreement (300 graphs, both modes)",
                  criterion2());
    all &= report(3, "named instances match the exact solver", criterion3());

    CorpusStats corpus = run_corpus();
    {
        std::ostringstream os;
        os << corpus.found << "/" << corpus.runs << " found";
        all &= report(4, "solver soundness over the mixed corpus (every found validates)",
                      corpus.runs >= 1000 && corpus.invalid == 0, os.str());
    }
    all &= report(5, "work bounds: kappa <= m+1 with abort at overflow; expansions <= n-1",
                  corpus.bound_violations == 0 && abort_exactness());
    all &= report(6, "rate formulas at pinned values; accumulators match recomputation",
                  criterion6());
    {
        std::string detail;
        const bool ok = criterion7(detail);
        all &= report(7, "byte-identical reports across process invocations (20 configs)", ok,
                      detail);
    }
    {
        std::string detail;
        const bool ok = criterion8(detail);
        all &= report(8, "planted-cycle completeness baseline (regression gate)", ok, detail);
    }
    all &= report(9, "k-state undo restores digests exactly (500 trials)", criterion9());
    {
        std::string detail;
        const bool ok = cli_surface(detail);
        std::printf("[%s] extra: cli surface (exit codes, dump-config, bench determinism)%s%s\n",
                    ok ? "PASS" : "FAIL", detail.empty() ? "" : " -- ", detail.c_str());
        all &= ok;
    }

    return all ? 0 : 1;
}
