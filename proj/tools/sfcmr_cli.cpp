// Command-line harness: solve / oracle / validate / gen / bench / dump-config.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "sfcmr/edge_list.hpp"
#include "sfcmr/oracle.hpp"
#include "sfcmr/solver.hpp"

#ifdef SFCMR_HAVE_OPENMP
#include <omp.h>
#endif

namespace {

using nlohmann::ordered_json;

sfcmr::Graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return sfcmr::parse_edge_list(buf.str());
}

sfcmr::Mode parse_mode(const std::string& s) {
    if (s == "path") return sfcmr::Mode::kPath;
    if (s == "circuit") return sfcmr::Mode::kCircuit;
    throw std::runtime_error("mode must be path or circuit");
}

ordered_json policy_to_json(const sfcmr::PolicyConfig& pc) {
    ordered_json j;
    ordered_json strategies = ordered_json::object();
    for (int i = 1; i <= 22; ++i) strategies["s" + std::to_string(i)] = pc.strategy(i);
    j["strategies"] = strategies;
    j["freq_coefficient"] = pc.freq_coefficient;
    j["t_consistent"] = pc.t_consistent;
    j["t_fail_scale"] = pc.t_fail_scale;
    j["t_floor"] = pc.t_floor;
    j["t_ceil"] = pc.t_ceil;
    j["a_clamp"] = pc.a_clamp;
    j["delta_step"] = pc.delta_step;
    j["delta_decay"] = pc.delta_decay;
    j["drastic_step"] = pc.drastic_step;
    j["k_init"] = pc.k_init;
    j["ring_abort_patience"] = pc.ring_abort_patience;
    j["connect_budget"] = pc.connect_budget;
    j["cnode_cap"] = pc.cnode_cap;
    j["max_states_per_expansion"] = pc.max_states_per_expansion;
    return j;
}

sfcmr::PolicyConfig policy_from_json(const ordered_json& j) {
    sfcmr::PolicyConfig pc;
    if (j.contains("strategies"))
        for (int i = 1; i <= 22; ++i) {
            const std::string key = "s" + std::to_string(i);
            if (j["strategies"].contains(key)) pc.enabled[i] = j["strategies"][key].get<bool>();
        }
    auto get = [&](const char* k, auto& field) {
        if (j.contains(k)) field = j[k].get<std::decay_t<decltype(field)>>();
    };
    get("freq_coefficient", pc.freq_coefficient);
    get("t_consistent", pc.t_consistent);
    get("t_fail_scale", pc.t_fail_scale);
    get("t_floor", pc.t_floor);
    get("t_ceil", pc.t_ceil);
    get("a_clamp", pc.a_clamp);
    get("delta_step", pc.delta_step);
    get("delta_decay", pc.delta_decay);
    get("drastic_step", pc.drastic_step);
    get("k_init", pc.k_init);
    get("ring_abort_patience", pc.ring_abort_patience);
    get("connect_budget", pc.connect_budget);
    get("cnode_cap", pc.cnode_cap);
    get("max_states_per_expansion", pc.max_states_per_expansion);
    return pc;
}

ordered_json report_to_obj(const sfcmr::SolveReport& rep) {
    return ordered_json::parse(rep.to_json());
}

int cmd_solve(const std::string& input, const std::string& mode_s, std::uint64_t seed, int root,
              int max_restarts, const std::string& config_path, const std::string& json_path,
              const std::string& dot_path, const std::string& trace_path, int eta, int m_limit,
              bool split_blocks, bool timing) {
    sfcmr::Graph g = load_graph(input);
    sfcmr::SolveOptions opts;
    opts.mode = parse_mode(mode_s);
    opts.seed = seed;
    if (root >= 0) opts.root = root;
    opts.max_restarts = max_restarts;
    if (eta > 0) opts.eta_override = eta;
    if (m_limit > 0) opts.m_override = m_limit;
    opts.split_blocks = split_blocks;
    opts.timing = timing;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot open " + config_path);
        ordered_json j;
        in >> j;
        opts.policy = policy_from_json(j);
    }
    std::ofstream trace_file;
    if (!trace_path.empty()) {
        trace_file.open(trace_path);
        if (!trace_file) throw std::runtime_error("cannot open " + trace_path);
        opts.trace = &trace_file;
    }

    sfcmr::SolveReport rep = sfcmr::solve(g, opts);
    const std::string json = rep.to_json();
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        out << json;
    }
    std::cout << json;
    if (!dot_path.empty()) {
        std::ofstream out(dot_path);
        out << sfcmr::to_dot(g, rep.final_le);
    }
    if (rep.status == "found") return 0;
    if (rep.status == "aborted") return 2;
    return 3;
}

int cmd_oracle(const std::string& input, const std::string& mode_s, int cap) {
    sfcmr::Graph g = load_graph(input);
    auto mode = parse_mode(mode_s);
    auto witness = sfcmr::exact_solve(g, mode, cap);
    if (witness) {
        std::cout << "found";
        for (std::size_t i = 0; i < witness->size(); ++i)
            std::cout << (i == 0 ? " " : ",") << (*witness)[i];
        std::cout << "\n";
    } else {
        std::cout << "none\n";
    }
    return 0;
}

int cmd_validate(const std::string& input, const std::string& mode_s, const std::string& path_s) {
    sfcmr::Graph g = load_graph(input);
    std::vector<int> p;
    std::stringstream ss(path_s);
    std::string tok;
    while (std::getline(ss, tok, ',')) p.push_back(std::stoi(tok));
    const bool ok = sfcmr::validate(g, p, parse_mode(mode_s));
    std::cout << (ok ? "true" : "false") << "\n";
    return ok ? 0 : 4;
}

int cmd_gen(const std::string& family, int n, double p, std::uint64_t seed,
            const std::string& out_path, const std::string& name, int rows, int cols) {
    sfcmr::Graph g = sfcmr::generate(family, n, p, seed, name, rows, cols);
    const std::string text = sfcmr::to_edge_list(g);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open " + out_path);
        out << text;
    }
    return 0;
}

struct BenchInstance {
    std::string family, name;
    int n = 0, rows = 0, cols = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    sfcmr::Mode mode = sfcmr::Mode::kCircuit;
};

int cmd_bench(const std::string& suite_path, const std::string& out_path,
              const std::string& config_path) {
    std::ifstream in(suite_path);
    if (!in) throw std::runtime_error("cannot open " + suite_path);
    ordered_json suite;
    in >> suite;

    sfcmr::PolicyConfig pc;
    if (!config_path.empty()) {
        std::ifstream cin_(config_path);
        ordered_json cj;
        cin_ >> cj;
        pc = policy_from_json(cj);
    }

    std::vector<BenchInstance> instances;
    for (const auto& spec : suite.at("instances")) {
        BenchInstance base;
        base.family = spec.at("family").get<std::string>();
        if (spec.contains("name")) base.name = spec["name"].get<std::string>();
        if (spec.contains("n")) base.n = spec["n"].get<int>();
        if (spec.contains("rows")) base.rows = spec["rows"].get<int>();
        if (spec.contains("cols")) base.cols = spec["cols"].get<int>();
        if (spec.contains("p")) base.p = spec["p"].get<double>();
        base.mode = parse_mode(spec.value("mode", "circuit"));
        for (const auto& s : spec.at("seeds")) {
            BenchInstance inst = base;
            inst.seed = s.get<std::uint64_t>();
            instances.push_back(inst);
        }
    }

    std::vector<ordered_json> results(instances.size());
    std::vector<std::string> statuses(instances.size());
    std::vector<double> mus(instances.size(), 1.0);
    const auto count = static_cast<long long>(instances.size());
#ifdef SFCMR_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long i = 0; i < count; ++i) {
        const auto& inst = instances[i];
        sfcmr::Graph g =
            sfcmr::generate(inst.family, inst.n, inst.p, inst.seed, inst.name, inst.rows, inst.cols);
        sfcmr::SolveOptions opts;
        opts.mode = inst.mode;
        opts.seed = inst.seed;
        opts.policy = pc;
        sfcmr::SolveReport rep = sfcmr::solve(g, opts);
        results[i] = report_to_obj(rep);
        statuses[i] = rep.status;
        mus[i] = rep.mu_x;
    }

    int found = 0, aborted = 0, failed = 0;
    double mu_sum = 0.0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        if (statuses[i] == "found") ++found;
        else if (statuses[i] == "aborted") ++aborted;
        else ++failed;
        mu_sum += mus[i];
    }
    ordered_json out;
    out["instances"] = instances.size();
    out["found"] = found;
    out["aborted"] = aborted;
    out["mapping_failed"] = failed;
    out["mean_mu_x"] = instances.empty() ? 1.0 : mu_sum / static_cast<double>(instances.size());
    out["results"] = results;
    const std::string text = out.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream o(out_path);
        o << text;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SFCM-R hamiltonian sequence solver"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "run the two-phase solver");
    std::string input, mode_s = "circuit", config_path, json_path, dot_path, trace_path;
    std::uint64_t seed = 0;
    int root = -1, max_restarts = -1, eta = 0, m_limit = 0;
    bool split_blocks = false, timing = false;
    solve->add_option("--input", input)->required();
    solve->add_option("--mode", mode_s);
    solve->add_option("--seed", seed);
    solve->add_option("--root", root);
    solve->add_option("--max-restarts", max_restarts);
    solve->add_option("--config", config_path);
    solve->add_option("--json", json_path);
    solve->add_option("--dot", dot_path);
    solve->add_option("--trace", trace_path);
    solve->add_option("--eta", eta, "override the local error limit (non-canonical)");
    solve->add_option("--m", m_limit, "override the global error limit (non-canonical)");
    solve->add_flag("--split-blocks", split_blocks);
    solve->add_flag("--timing", timing, "report real elapsed_ms (breaks byte determinism)");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "exact solver");
    std::string o_input, o_mode = "circuit";
    int o_cap = 20;
    oracle->add_option("--input", o_input)->required();
    oracle->add_option("--mode", o_mode);
    oracle->add_option("--cap", o_cap);

    // validate
    auto* validate = app.add_subcommand("validate", "check a sequence");
    std::string v_input, v_mode = "path", v_path;
    validate->add_option("--input", v_input)->required();
    validate->add_option("--mode", v_mode);
    validate->add_option("--path", v_path)->required();

    // gen
    auto* gen = app.add_subcommand("gen", "generate a graph");
    std::string g_family, g_out, g_name;
    int g_n = 0, g_rows = 0, g_cols = 0;
    double g_p = 0.0;
    std::uint64_t g_seed = 0;
    gen->add_option("--family", g_family)->required();
    gen->add_option("--n", g_n);
    gen->add_option("--p", g_p);
    gen->add_option("--seed", g_seed);
    gen->add_option("--out", g_out);
    gen->add_option("--name", g_name);
    gen->add_option("--rows", g_rows);
    gen->add_option("--cols", g_cols);

    // bench
    auto* bench = app.add_subcommand("bench", "run a suite manifest");
    std::string b_suite, b_out, b_config;
    bench->add_option("--suite", b_suite)->required();
    bench->add_option("--out", b_out);
    bench->add_option("--config", b_config);

    // dump-config
    auto* dump = app.add_subcommand("dump-config", "print policy defaults");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed())
            return cmd_solve(input, mode_s, seed, root, max_restarts, config_path, json_path,
                             dot_path, trace_path, eta, m_limit, split_blocks, timing);
        if (oracle->parsed()) return cmd_oracle(o_input, o_mode, o_cap);
        if (validate->parsed()) return cmd_validate(v_input, v_mode, v_path);
        if (gen->parsed()) return cmd_gen(g_family, g_n, g_p, g_seed, g_out, g_name, g_rows, g_cols);
        if (bench->parsed()) return cmd_bench(b_suite, b_out, b_config);
        if (dump->parsed()) {
            std::cout << policy_to_json(sfcmr::PolicyConfig{}).dump(2) << "\n";
            return 0;
        }
    } catch (const sfcmr::ParseError& e) {
        std::cerr << "parse error at line " << e.line << ": " << e.message << "\n";
        return 1;
    } catch (const sfcmr::InvalidParams& e) {
        std::cerr << "invalid parameters: " << e.what << "\n";
        return 1;
    } catch (const sfcmr::CapExceeded& e) {
        std::cerr << "instance size " << e.n << " exceeds oracle cap " << e.cap << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
