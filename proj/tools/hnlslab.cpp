// hnlslab: experiment runner for the hyperbolic-NLS numerical laboratory.
//
// Usage:
//   hnlslab <command> [--seed U64] [--out DIR] [--threads INT] [--budget-min INT]
//   hnlslab --config cfg.json [overrides]
//
// Commands: kernel-scan, measure-scan, local-strichartz, global-strichartz,
// improved-l4, schur-scan, solve, picard, scatter, accept-all.
// Parameter schemas live in docs/config.schema.json; unknown keys are
// rejected. Precedence: command-line flags > HNLSLAB_* environment variables
// > config file > built-in defaults.
// Exit codes: 0 success, 1 numerical gate failure, 2 configuration error,
// 3 I/O error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <set>

#include "hnls/acceptance.hpp"
#include "hnls/experiments.hpp"

namespace {

const std::map<std::string, std::set<std::string>> ALLOWED_PARAMS = {
    {"kernel-scan", {"n_list", "t_points", "xy_samples", "t_min", "t_max"}},
    {"measure-scan", {"kind", "n_list", "tuples", "c_width", "mc"}},
    {"local-strichartz",
     {"n_list", "p_list", "families", "members", "members_2d_cap", "box_length", "time_samples", "time_samples_cap",
      "time_rel_tol"}},
    {"global-strichartz",
     {"n_list", "p_list", "families", "members", "members_2d_cap", "box_length", "time_samples", "time_samples_cap",
      "gamma", "jcheck", "jcheck_n", "n_2d_cap", "time_rel_tol"}},
    {"improved-l4",
     {"n_list", "families", "members", "members_2d_cap", "box_length", "time_samples", "time_samples_cap",
      "time_rel_tol"}},
    {"schur-scan", {"n_list", "instances"}},
    {"solve", {"k", "sign", "dt", "t_end", "box_length", "n_max", "amplitude", "u0_file", "output_stride", "checkpoints"}},
    {"picard", {"k", "sign", "n_max", "box_length", "T", "iters", "samples", "amplitude"}},
    {"scatter", {"k", "sign", "dt", "t_end", "box_length", "n_max", "amplitude", "t_tail", "output_stride"}},
    {"accept-all", {}},
};

int validate_params(const std::string& command, const nlohmann::json& params, std::string& err) {
    auto it = ALLOWED_PARAMS.find(command);
    if (it == ALLOWED_PARAMS.end()) {
        err = "unknown command: " + command;
        return 2;
    }
    if (!params.is_object()) {
        err = "parameters must be a JSON object";
        return 2;
    }
    for (const auto& [key, value] : params.items()) {
        if (!it->second.count(key)) {
            err = "unknown parameter '" + key + "' for command '" + command + "'";
            return 2;
        }
    }
    return 0;
}

std::optional<std::string> env_str(const char* name) {
    const char* v = std::getenv(name);
    if (!v) return std::nullopt;
    return std::string(v);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hnlslab: hyperbolic-NLS numerical laboratory"};
    app.require_subcommand(0, 1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON experiment config (schema: docs/config.schema.json)");
    std::optional<std::uint64_t> seed_flag;
    std::optional<std::string> out_flag;
    std::optional<int> threads_flag;
    std::optional<double> budget_flag;
    app.add_option("--seed", seed_flag, "root seed (64-bit)");
    app.add_option("--out", out_flag, "output directory");
    app.add_option("--threads", threads_flag, "worker threads");
    app.add_option("--budget-min", budget_flag, "time budget in minutes (accept-all)");

    std::vector<CLI::App*> subs;
    for (const auto& [name, _] : ALLOWED_PARAMS) {
        auto* sub = app.add_subcommand(name);
        sub->fallthrough();  // global flags may follow the command name
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    // assemble: defaults <- config <- env <- flags
    std::string command;
    nlohmann::json params = nlohmann::json::object();
    hnls::RunContext ctx;
    ctx.out_dir = "out";
    ctx.threads = std::max(1u, std::thread::hardware_concurrency());

    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "config error: cannot open " << config_path << "\n";
            return 2;
        }
        nlohmann::json cfg;
        try {
            in >> cfg;
        } catch (const std::exception& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        }
        static const std::set<std::string> top_keys{"command", "parameters", "root_seed", "output_dir", "threads",
                                                    "budget_min"};
        for (const auto& [k, v] : cfg.items())
            if (!top_keys.count(k)) {
                std::cerr << "config error: unknown top-level key '" << k << "'\n";
                return 2;
            }
        if (!cfg.contains("command")) {
            std::cerr << "config error: missing 'command'\n";
            return 2;
        }
        command = cfg.at("command").get<std::string>();
        if (cfg.contains("parameters")) params = cfg.at("parameters");
        if (cfg.contains("root_seed")) ctx.root_seed = cfg.at("root_seed").get<std::uint64_t>();
        if (cfg.contains("output_dir")) ctx.out_dir = cfg.at("output_dir").get<std::string>();
        if (cfg.contains("threads")) ctx.threads = cfg.at("threads").get<int>();
        if (cfg.contains("budget_min")) ctx.budget_min = cfg.at("budget_min").get<double>();
    }
    for (auto* sub : app.get_subcommands()) {
        if (!command.empty() && command != sub->get_name()) {
            std::cerr << "config error: config command '" << command << "' conflicts with subcommand '"
                      << sub->get_name() << "'\n";
            return 2;
        }
        command = sub->get_name();
    }
    if (command.empty()) {
        std::cerr << app.help();
        return 2;
    }

    if (auto v = env_str("HNLSLAB_SEED")) ctx.root_seed = std::strtoull(v->c_str(), nullptr, 10);
    if (auto v = env_str("HNLSLAB_OUT")) ctx.out_dir = *v;
    if (auto v = env_str("HNLSLAB_THREADS")) ctx.threads = std::atoi(v->c_str());
    if (auto v = env_str("HNLSLAB_BUDGET_MIN")) ctx.budget_min = std::atof(v->c_str());
    if (seed_flag) ctx.root_seed = *seed_flag;
    if (out_flag) ctx.out_dir = *out_flag;
    if (threads_flag) ctx.threads = *threads_flag;
    if (budget_flag) ctx.budget_min = *budget_flag;
    if (ctx.threads < 1) ctx.threads = 1;

    std::string err;
    if (int rc = validate_params(command, params, err); rc != 0) {
        std::cerr << "config error: " << err << "\n";
        return rc;
    }

    const auto t0 = std::chrono::steady_clock::now();
    hnls::RunOutcome outcome;
    nlohmann::json acceptance_json;
    try {
        if (command == "kernel-scan") outcome = hnls::run_kernel_scan(ctx, params);
        else if (command == "measure-scan") outcome = hnls::run_measure_scan(ctx, params);
        else if (command == "local-strichartz") outcome = hnls::run_local_strichartz(ctx, params);
        else if (command == "global-strichartz") outcome = hnls::run_global_strichartz(ctx, params);
        else if (command == "improved-l4") outcome = hnls::run_improved_l4(ctx, params);
        else if (command == "schur-scan") outcome = hnls::run_schur_scan(ctx, params);
        else if (command == "solve") outcome = hnls::run_solve(ctx, params);
        else if (command == "picard") outcome = hnls::run_picard(ctx, params);
        else if (command == "scatter") outcome = hnls::run_scatter(ctx, params);
        else if (command == "accept-all") {
            auto summary = hnls::run_acceptance(ctx);
            acceptance_json = summary.to_json();
            hnls::write_json_atomic((std::filesystem::path(ctx.out_dir) / "acceptance_summary.json").string(),
                                    acceptance_json);
            outcome.outputs.push_back("acceptance_summary.json");
            for (const auto& r : summary.results) outcome.gates[r.name] = r.pass;
            if (summary.reduced_scope) outcome.notes["reduced_scope"] = "budget below the full profile";
        } else {
            std::cerr << "config error: unhandled command\n";
            return 2;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "i/o or runtime error: " << e.what() << "\n";
        return 3;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    // manifest, written last as the completion marker
    try {
        nlohmann::json manifest;
        manifest["artifact_version"] = hnls::ARTIFACT_VERSION;
        manifest["command"] = command;
        manifest["parameters"] = params;
        manifest["root_seed"] = ctx.root_seed;
        manifest["output_dir"] = ctx.out_dir;
        manifest["threads"] = ctx.threads;
        manifest["wall_time_s"] = wall;
        nlohmann::json files = nlohmann::json::array();
        for (const auto& rel : outcome.outputs) {
            const auto full = (std::filesystem::path(ctx.out_dir) / rel).string();
            files.push_back({{"path", rel}, {"fnv1a64", hnls::digest_file(full)}});
        }
        manifest["outputs"] = files;
        nlohmann::json gates = nlohmann::json::object();
        bool all = true;
        for (const auto& [k, v] : outcome.gates) {
            gates[k] = v;
            all = all && v;
        }
        manifest["gates"] = gates;
        nlohmann::json notes = nlohmann::json::object();
        for (const auto& [k, v] : outcome.notes) notes[k] = v;
        manifest["notes"] = notes;
        manifest["all_gates_pass"] = all;
        hnls::write_json_atomic((std::filesystem::path(ctx.out_dir) / "manifest.json").string(), manifest);
        std::cout << "wrote " << ctx.out_dir << "/manifest.json ("
                  << (all ? "all gates pass" : "GATE FAILURES") << ", " << wall << " s)\n";
        return all ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    }
}
