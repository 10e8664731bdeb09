#pragma once

#include <chrono>
#include <cstdio>

#include "hnls/experiments.hpp"

namespace hnls {

struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    bool reduced = false;  // scope trimmed to fit the budget
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceSummary {
    std::vector<CriterionResult> results;
    bool all_pass = true;
    bool reduced_scope = false;
    double total_seconds = 0.0;

    nlohmann::json to_json() const {
        nlohmann::json out;
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : results)
            arr.push_back({{"index", r.index},
                           {"name", r.name},
                           {"pass", r.pass},
                           {"reduced", r.reduced},
                           {"detail", r.detail},
                           {"seconds", r.seconds}});
        out["criteria"] = arr;
        out["all_pass"] = all_pass;
        out["reduced_scope"] = reduced_scope;
        out["total_seconds"] = total_seconds;
        return out;
    }
};

namespace detail_acc {

// budget ladder: the scope knobs that shrink when minutes are scarce
struct Profile {
    // c1
    int oracle_tuples = 200;
    // c2, c3
    std::vector<int> law_n{4, 16, 64, 256, 1024, 4096};
    int law_tuples = 200;
    // c7
    std::vector<int> schur_n{8, 16, 32, 64, 128, 256, 512};
    int schur_instances = 50;
    // c8
    std::vector<int> local_n{4, 8, 16, 32, 64};
    int local_members = 64;
    int local_members_2d = 64;
    // c9
    std::vector<int> global_n{4, 8, 16, 32, 64};
    int global_members_sep = 8;
    int global_members_2d = 6;
    std::vector<int> jcheck_n{4, 8, 16};
    // c10
    std::vector<int> improved_n{4, 8, 16, 32, 64};
    int improved_members = 12;
    // c12
    double scatter_t_end = 40.0;
    bool reduced = false;
};

inline Profile profile_for_budget(double minutes) {
    Profile p;
    if (minutes >= 25.0) return p;
    p.reduced = true;
    if (minutes >= 8.0) {
        p.oracle_tuples = 120;
        p.local_members = 32;
        p.local_members_2d = 16;
        p.global_members_sep = 4;
        p.global_members_2d = 3;
        p.improved_members = 6;
        p.schur_instances = 50;
        return p;
    }
    p.oracle_tuples = 60;
    p.law_tuples = 120;
    p.local_n = {4, 8, 16, 32};
    p.local_members = 16;
    p.local_members_2d = 8;
    p.global_n = {4, 8, 16, 32};
    p.global_members_sep = 3;
    p.global_members_2d = 2;
    p.jcheck_n = {4, 8};
    p.improved_n = {4, 8, 16, 32};
    p.improved_members = 4;
    p.schur_instances = 25;
    p.scatter_t_end = 40.0;  // the gate window is pinned; keep it
    return p;
}

template <typename F>
CriterionResult timed(int index, const std::string& name, bool reduced, F&& body) {
    CriterionResult r;
    r.index = index;
    r.name = name;
    r.reduced = reduced;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        auto [pass, detail] = body();
        r.pass = pass;
        r.detail = detail;
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline std::string fmt2(double v) {
    char b[32];
    std::snprintf(b, sizeof(b), "%.3g", v);
    return b;
}

}  // namespace detail_acc

// Criterion 1: closed forms vs rejection Monte Carlo, 4 sigma, stderr < 1%.
inline CriterionResult criterion_oracle_consistency(const RunContext& ctx, const detail_acc::Profile& pr) {
    return detail_acc::timed(1, "oracle-consistency", pr.reduced, [&]() -> std::pair<bool, std::string> {
        int bad = 0, total = 0;
        double worst_rel = 0.0;
        const std::vector<int> ns{4, 8, 16, 32, 64};
        for (int i = 0; i < pr.oracle_tuples; ++i) {
            Rng rng(derive_seed(ctx.root_seed, 31000 + i));
            const DyadicScale N(ns[i % ns.size()]);
            const double tau = rng.uniform(-4.0, 4.0) * N.n * N.n;
            const double xi = rng.uniform(-2.0, 2.0) * N.n;
            const long long n = std::llround(rng.uniform(-2.0, 2.0) * N.n);
            const std::uint64_t ms = derive_seed(ctx.root_seed, 32000 + i);
            auto check = [&](const MeasureReport& rep) {
                ++total;
                if (!rep.mc_consistent) ++bad;
                if (rep.exact > 0.5) worst_rel = std::max(worst_rel, rep.mc_stderr / rep.exact);
            };
            check(mes_B_N(tau, n, 1.0, N, true, ms));
            check(mes_A_N_hyperbolic(tau, xi, n, 1.0, N, true, ms + 1));
            ShellSpec sh;
            sh.j = std::llround(rng.uniform(0.0, 4.0));
            sh.center_x = rng.uniform(-1.0, 1.0);
            sh.center_y = rng.uniform(-1.0, 1.0);
            sh.r_offset = rng.uniform(-6.0, 6.0);
            sh.n = N;
            check(mes_level_shell(sh, true, ms + 2));
        }
        const bool pass = bad == 0 && worst_rel < 0.01;
        return {pass, std::to_string(total - bad) + "/" + std::to_string(total) +
                          " reports within 4 sigma, worst stderr/exact " + detail_acc::fmt2(worst_rel)};
    });
}

// Criteria 2 and 3: sup of mes / log(2N) varies by less than factor 3.
inline CriterionResult criterion_measure_law(const RunContext& ctx, const detail_acc::Profile& pr, bool hyperbolic) {
    const int idx = hyperbolic ? 3 : 2;
    const char* nm = hyperbolic ? "thm1.8-measure-law" : "thm3.1-measure-law";
    return detail_acc::timed(idx, nm, pr.reduced, [&]() -> std::pair<bool, std::string> {
        double lo = 1e300, hi = 0.0;
        for (int n : pr.law_n) {
            const DyadicScale N(n);
            double worst = hyperbolic ? mes_A_N_hyperbolic(0.0, 0.0, 1, 1.0, N, false).exact
                                      : mes_B_N(0.0, 0, 1.0, N, false).exact;
            for (int i = 0; i < pr.law_tuples; ++i) {
                Rng rng(derive_seed(ctx.root_seed, 33000 + i));  // common across N
                const double tau = rng.uniform(-4.0, 4.0) * N.n * N.n;
                const double xi = rng.uniform(-2.0, 2.0) * N.n;
                const long long nn = std::llround(rng.uniform(-2.0, 2.0) * N.n);
                const double v = hyperbolic ? mes_A_N_hyperbolic(tau, xi, nn, 1.0, N, false).exact
                                            : mes_B_N(tau, nn, 1.0, N, false).exact;
                worst = std::max(worst, v);
            }
            const double r = worst / std::log(2.0 * n);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        return {hi / lo < 3.0, "sup/log(2N) in [" + detail_acc::fmt2(lo) + ", " + detail_acc::fmt2(hi) +
                                   "], spread x" + detail_acc::fmt2(hi / lo)};
    });
}

// Criterion 4: parabolic reduction identity to 1e-12 on 100 tuples.
inline CriterionResult criterion_reduction_identity(const RunContext& ctx, const detail_acc::Profile& pr) {
    return detail_acc::timed(4, "parabolic-reduction-identity", false, [&]() -> std::pair<bool, std::string> {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            Rng rng(derive_seed(ctx.root_seed, 34000 + i));
            const DyadicScale N(4 << (i % 4));
            const double tau = rng.uniform(-4.0, 4.0) * N.n * N.n;
            const double xi = rng.uniform(-2.0, 2.0) * N.n;
            const long long n = std::llround(rng.uniform(-2.0, 2.0) * N.n);
            auto r = mes_A_N_parabolic(tau, xi, n, 1.0, N, false);
            worst = std::max(worst, r.route_gap / std::max(1.0, r.exact_direct));
        }
        (void)pr;
        return {worst <= 1e-12, "worst relative route gap " + detail_acc::fmt2(worst)};
    });
}

// Criterion 5: kernel decay constants stable within factor 2 across N.
inline CriterionResult criterion_kernel_decay(const RunContext& ctx, const detail_acc::Profile& pr) {
    return detail_acc::timed(5, "kernel-decay-constants", false, [&]() -> std::pair<bool, std::string> {
        (void)pr;
        nlohmann::json params;
        params["n_list"] = {8, 16, 32, 64};
        RunContext sub = ctx;
        sub.out_dir = ctx.out_dir + "/kernel_scan";
        auto out = run_kernel_scan(sub, params);
        const bool pass = out.gates.at("kernel_c1_stable") && out.gates.at("kernel_c2_stable");
        return {pass, "C1 " + out.notes.at("c1_range") + "; C2 " + out.notes.at("c2_range")};
    });
}

// Criterion 6: the co-area identity, exactly.
inline CriterionResult criterion_coarea(const RunContext&, const detail_acc::Profile&) {
    return detail_acc::timed(6, "coarea-identity", false, []() -> std::pair<bool, std::string> {
        bool ok = true;
        for (double a : {0.0, 1.0, 10.0}) ok = ok && coarea_delta_mass(a) == PI;
        ok = ok && coarea_delta_mass(-3.0) == 0.0;
        for (double a : {0.0, 1.0, 10.0})
            for (double eps : {1e-3, 1e-6}) ok = ok && std::abs(coarea_thickened(a, eps) - PI) < 1e-9;
        return {ok, "delta mass pi for A >= 0, 0 otherwise; thickened form identical"};
    });
}

// Criterion 7: Schur shell sums against (log 2N)^2.
inline CriterionResult criterion_schur(const RunContext& ctx, const detail_acc::Profile& pr) {
    return detail_acc::timed(7, "schur-log2-law", pr.reduced, [&]() -> std::pair<bool, std::string> {
        nlohmann::json params;
        params["n_list"] = pr.schur_n;
        params["instances"] = pr.schur_instances;
        RunContext sub = ctx;
        sub.out_dir = ctx.out_dir + "/schur_scan";
        auto out = run_schur_scan(sub, params);
        return {out.gates.at("schur_log2_law"), "sup/(log 2N)^2 range " + out.notes.at("ratio_range")};
    });
}

// Criterion 8: local Strichartz scaling exponents at p = 4, 6, 8.
inline CriterionResult criterion_local_strichartz(const RunContext& ctx, const detail_acc::Profile& pr) {
    return detail_acc::timed(8, "local-strichartz-scaling", pr.reduced, [&]() -> std::pair<bool, std::string> {
        nlohmann::json params;
        params["n_list"] = pr.local_n;
        params["p_list"] = {4.0, 6.0, 8.0};
        params["members"] = pr.local_members;
        params["members_2d_cap"] = pr.local_members_2d;
        RunContext sub = ctx;
        sub.out_dir = ctx.out_dir + "/local_strichartz";
        auto out = run_local_strichartz(sub, params);
        const double e4 = std::stod(out.notes.at("exponent_p4"));
        const double e6 = std::stod(out.notes.at("exponent_p6"));
        const double e8 = std::stod(out.notes.at("exponent_p8"));
        const bool pass = e4 <= 0.10 && std::abs(e6 - 1.0 / 3.0) <= 0.10 && std::abs(e8 - 0.5) <= 0.10;
        return {pass, "exponents p4 " + detail_acc::fmt2(e4) + " (<=0.10), p6 " + detail_acc::fmt2(e6) +
                          " (1/3 +- 0.10), p8 " + detail_acc::fmt2(e8) + " (1/2 +- 0.10)"};
    });
}

// Criterion 9: global estimates and the Gaussian-window cross-check.
inline CriterionResult criterion_global_strichartz(const RunContext& ctx, const detail_acc::Profile& pr) {
    return detail_acc::timed(9, "global-strichartz", pr.reduced, [&]() -> std::pair<bool, std::string> {
        nlohmann::json params;
        params["n_list"] = pr.global_n;
        params["members"] = pr.global_members_sep;
        params["members_2d_cap"] = pr.global_members_2d;
        params["gamma"] = 8;
        params["jcheck"] = true;
        RunContext sub = ctx;
        sub.out_dir = ctx.out_dir + "/global_strichartz";
        auto out = run_global_strichartz(sub, params);
        const bool pass = out.gates.at("global_inf4_linear_rate") && out.gates.at("global_48_subpolynomial") &&
                          out.gates.at("jsum_crosscheck_factor4") && out.gates.at("capped_families_dominated");
        return {pass, "exp(inf,4) " + out.notes.at("exponent_inf4") + " in [0.85,1.15]; exp(4,8) " +
                          out.notes.at("exponent_48") + " <= 0.15; J^{1/8}/norm in " +
                          out.notes.at("jsum_ratio_range")};
    });
}

// Criterion 10: improved mixed-flow L^4 bound bounded across families and N.
inline CriterionResult criterion_improved_l4(const RunContext& ctx, const detail_acc::Profile& pr) {
    return detail_acc::timed(10, "improved-l4-bound", pr.reduced, [&]() -> std::pair<bool, std::string> {
        nlohmann::json params;
        params["n_list"] = pr.improved_n;
        params["members"] = pr.improved_members;
        params["members_2d_cap"] = std::max(2, pr.improved_members / 2);
        RunContext sub = ctx;
        sub.out_dir = ctx.out_dir + "/improved_l4";
        auto out = run_improved_l4(sub, params);
        return {out.gates.at("improved_l4_bounded"),
                "overall constant " + out.notes.at("overall_constant") + ", per-N sup range " +
                    out.notes.at("per_n_sup_range")};
    });
}

// Criterion 11: solver physics gates.
inline CriterionResult criterion_solver_physics(const RunContext& ctx, const detail_acc::Profile&) {
    return detail_acc::timed(11, "solver-physics", false, [&]() -> std::pair<bool, std::string> {
        DomainSpec d(8.0, 256, 16, 4);
        SolveConfig cfg;
        cfg.k = 2;
        cfg.sign = +1;
        cfg.dt = 1e-3;
        cfg.t_end = 1.0;
        cfg.domain = d;
        SpectralField u0 = gaussian_bump_data(d, 0.06, 1.0, 2.0, derive_seed(ctx.root_seed, 41));
        Trajectory traj = integrate(u0, cfg);
        const double m0 = traj.mass.front();
        double mdrift = 0.0, hdrift = 0.0;
        for (double m : traj.mass) mdrift = std::max(mdrift, std::abs(m - m0) / m0);
        const double h0 = traj.hamiltonians.front();
        for (double h : traj.hamiltonians) hdrift = std::max(hdrift, std::abs(h - h0));
        const double hrel = hdrift / std::abs(h0);

        // Strang order via dt halving against a dt/8 reference
        SolveConfig big = cfg;
        big.k = 1;
        big.t_end = 0.5;
        big.output_stride = 1 << 30;
        SpectralField ub = gaussian_bump_data(d, 1.0, 1.0, 2.0, derive_seed(ctx.root_seed, 42));
        auto run = [&](double dt) {
            SolveConfig c = big;
            c.dt = dt;
            return integrate(ub, c).states.back();
        };
        SpectralField ua = run(0.02), um = run(0.01), ur = run(0.0025);
        auto dist = [](const SpectralField& a, const SpectralField& b) {
            double acc = 0;
            for (std::size_t i = 0; i < a.coeffs.size(); ++i) acc += std::norm(a.coeffs[i] - b.coeffs[i]);
            return std::sqrt(acc);
        };
        const double ratio = dist(ua, ur) / dist(um, ur);

        // time reversal
        SolveConfig rev = cfg;
        rev.k = 1;
        rev.t_end = 0.25;
        rev.output_stride = 1 << 30;
        SpectralField fwd = integrate(u0, rev).states.back();
        SpectralField back = fwd;
        for (int s = 0; s < 250; ++s) back = step_strang(back, -rev.dt, rev).state;
        const double rev_err = dist(back, u0) / std::sqrt(u0.domain.x_period) / u0.l2_norm();

        const bool pass = mdrift <= 1e-8 && hrel <= 1e-6 && ratio >= 3.2 && ratio <= 4.8 && rev_err <= 1e-9;
        return {pass, "mass drift " + detail_acc::fmt2(mdrift) + " (<=1e-8); H drift " + detail_acc::fmt2(hrel) +
                          " (<=1e-6); dt-halving ratio " + detail_acc::fmt2(ratio) + " (in [3.2,4.8]); reversal " +
                          detail_acc::fmt2(rev_err) + " (<=1e-9)"};
    });
}

// Criterion 12: Picard contraction and the scattering Cauchy tail.
inline CriterionResult criterion_wellposedness(const RunContext& ctx, const detail_acc::Profile& pr) {
    return detail_acc::timed(12, "wellposedness-dynamics", false, [&]() -> std::pair<bool, std::string> {
        bool contraction_ok = true;
        std::string rates;
        for (int k : {2, 3}) {
            SolveConfig cfg;
            cfg.k = k;
            cfg.sign = +1;
            cfg.domain = DomainSpec::for_band(4, 4.0);
            SpectralField u0 = gaussian_bump_data(cfg.domain, 1.0, 1.0, 2.0, derive_seed(ctx.root_seed, 43 + k));
            u0 *= 1e-2 / sobolev_norm(u0, SobolevIndex::critical(k));
            auto trace = picard_iterate(u0, 1.0, 3, cfg, 32);
            double worst = 0.0;
            for (std::size_t j = 1; j < trace.residuals.size(); ++j)
                if (trace.residuals[j - 1] > 0) worst = std::max(worst, trace.residuals[j] / trace.residuals[j - 1]);
            contraction_ok = contraction_ok && worst <= 0.5 && !trace.diverged;
            rates += " k=" + std::to_string(k) + ":" + detail_acc::fmt2(worst);
        }

        nlohmann::json params;
        params["k"] = 2;
        params["t_end"] = pr.scatter_t_end;
        RunContext sub = ctx;
        sub.out_dir = ctx.out_dir + "/scatter";
        auto sc = run_scatter(sub, params);
        const bool pass = contraction_ok && sc.gates.at("scattering_cauchy_tail") && sc.gates.at("no_abort");
        return {pass, "contraction factors" + rates + " (<=0.5); scattering tail sup " + sc.notes.at("tail_sup") +
                          " (gate " + sc.notes.at("gate_level") + ")"};
    });
}

inline AcceptanceSummary run_acceptance(const RunContext& ctx, bool print_lines = true) {
    const auto profile = detail_acc::profile_for_budget(ctx.budget_min);
    std::filesystem::create_directories(ctx.out_dir);
    AcceptanceSummary summary;
    summary.reduced_scope = profile.reduced;
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<CriterionResult> rs;
    rs.push_back(criterion_oracle_consistency(ctx, profile));
    rs.push_back(criterion_measure_law(ctx, profile, false));
    rs.push_back(criterion_measure_law(ctx, profile, true));
    rs.push_back(criterion_reduction_identity(ctx, profile));
    rs.push_back(criterion_kernel_decay(ctx, profile));
    rs.push_back(criterion_coarea(ctx, profile));
    rs.push_back(criterion_schur(ctx, profile));
    rs.push_back(criterion_local_strichartz(ctx, profile));
    rs.push_back(criterion_global_strichartz(ctx, profile));
    rs.push_back(criterion_improved_l4(ctx, profile));
    rs.push_back(criterion_solver_physics(ctx, profile));
    rs.push_back(criterion_wellposedness(ctx, profile));

    for (const auto& r : rs) {
        summary.all_pass = summary.all_pass && r.pass;
        if (print_lines)
            std::printf("[%2d] %s  %-28s (%.1f s)%s  %s\n", r.index, r.pass ? "PASS" : "FAIL", r.name.c_str(),
                        r.seconds, r.reduced ? " [reduced]" : "", r.detail.c_str());
    }
    summary.results = std::move(rs);
    summary.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (print_lines)
        std::printf("%s: %zu criteria, %.1f s total%s\n", summary.all_pass ? "ALL PASS" : "FAILURES",
                    summary.results.size(), summary.total_seconds, summary.reduced_scope ? " (reduced scope)" : "");
    return summary;
}

}  // namespace hnls
