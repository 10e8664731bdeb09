// Acceptance suite: runs every quantitative gate and prints one line per
// criterion. Exit status 0 only when all gates pass.

#include <CLI11.hpp>

#include "hnls/acceptance.hpp"

int main(int argc, char** argv) {
    CLI::App app{"hnlslab acceptance suite"};
    hnls::RunContext ctx;
    ctx.out_dir = "acceptance_out";
    ctx.budget_min = 30.0;
    ctx.threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--seed", ctx.root_seed, "root seed");
    app.add_option("--out", ctx.out_dir, "output directory");
    app.add_option("--threads", ctx.threads, "worker threads");
    app.add_option("--budget-min", ctx.budget_min, "time budget in minutes; scopes shrink to fit");
    CLI11_PARSE(app, argc, argv);

    auto summary = hnls::run_acceptance(ctx);
    hnls::write_json_atomic((std::filesystem::path(ctx.out_dir) / "acceptance_summary.json").string(),
                            summary.to_json());
    return summary.all_pass ? 0 : 1;
}
