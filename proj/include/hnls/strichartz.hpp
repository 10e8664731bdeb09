#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hnls/spacetime.hpp"

namespace hnls {

// (p, q) with 2/q + 1/p = 1/2 and p > 4; (inf, 4) is the allowed endpoint.
struct AdmissiblePair {
    double p = 0.0;
    double q = 0.0;
    explicit AdmissiblePair(double p_) : p(p_) {
        if (std::isinf(p)) {
            q = 4.0;
            return;
        }
        if (!(p > 4.0)) throw std::invalid_argument("AdmissiblePair: p > 4 required");
        q = 4.0 * p / (p - 2.0);
    }
    bool valid() const {
        if (std::isinf(p)) return q == 4.0;
        return std::abs(2.0 / q + 1.0 / p - 0.5) < 1e-12 && q >= 4.0 && q < 8.0;
    }
};

// log-log least squares through (N, constant) pairs
struct ScalingFit {
    std::vector<std::pair<double, double>> points;
    double exponent = 0.0;
    double log_prefactor = 0.0;
    double r_squared = 1.0;
};

inline ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_scaling: at least 3 dyadic points required");
    ScalingFit fit;
    fit.points = points;
    const std::size_t n = points.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [N, c] : points) {
        if (!(N > 0.0) || !(c > 0.0)) throw std::invalid_argument("fit_scaling: positive (N, constant) required");
        const double x = std::log(N), y = std::log(c);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double det = n * sxx - sx * sx;
    fit.exponent = (n * sxy - sx * sy) / det;
    fit.log_prefactor = (sy - fit.exponent * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ymean = sy / n;
    for (const auto& [N, c] : points) {
        const double y = std::log(c);
        const double yhat = fit.log_prefactor + fit.exponent * std::log(N);
        ss_res += (y - yhat) * (y - yhat);
        ss_tot += (y - ymean) * (y - ymean);
    }
    fit.r_squared = ss_tot > 0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
    return fit;
}

inline EnsembleMember project_member(const EnsembleMember& m, const DyadicScale& N) {
    EnsembleMember out = m;
    out.field = project_leq(m.field, N);
    if (m.separable) {
        const DomainSpec& d = m.field.domain;
        const double Nd = N.as_double();
        for (int ix = 0; ix < d.n_x; ++ix) out.ax[ix] = m.ax[ix] * bump_phi(d.xi(ix) / Nd);
        for (int iy = 0; iy < d.n_y; ++iy) out.by[iy] = m.by[iy] * bump_phi(d.freq_k(iy) / Nd);
    }
    return out;
}

// -----------------------------------------------------------------------
// Ensemble-sup local constants: sup over members of
//   || e^{it .} P_{<=N} f ||_{L^p([0,1] x M)} / || P_{<=N} f ||_{L^2}.
// All requested p share one synthesis sweep per member. Constants are
// ensemble sups, i.e. lower bounds on the operator constants.
// -----------------------------------------------------------------------

struct LocalSweepResult {
    std::vector<double> constants;  // one per requested p
    std::vector<int> argmax;        // member index attaining each sup
    int skipped = 0;                // zero-norm members
    bool all_converged = true;
};

inline LocalSweepResult local_constants(const DyadicScale& N, const std::vector<double>& ps,
                                        const std::vector<EnsembleMember>& members, SymbolKind kind,
                                        const QuadOpts& opts, int threads = 1, double t0 = 0.0, double t1 = 1.0) {
    if (members.empty()) throw std::invalid_argument("local_constants: empty ensemble");
    LocalSweepResult res;
    res.constants.assign(ps.size(), 0.0);
    res.argmax.assign(ps.size(), -1);
    std::vector<std::vector<double>> per_member(members.size());
    std::vector<int> member_skipped(members.size(), 0);
    std::vector<int> member_converged(members.size(), 1);
    std::vector<bool> sup_mask(ps.size());
    for (std::size_t c = 0; c < ps.size(); ++c) sup_mask[c] = std::isinf(ps[c]);

    parallel_for(members.size(), threads, [&](std::size_t i) {
        EnsembleMember proj = project_member(members[i], N);
        const double l2 = proj.field.l2_norm();
        if (l2 < 1e-12) {
            member_skipped[i] = 1;
            return;
        }
        auto eval = make_norm_evaluator(proj, kind, opts.oversample);
        auto q = adaptive_multi_quadrature([&](double t) { return eval(t, ps); }, t0, t1,
                                           t0 == 0.0 ? GradeMode::Left : GradeMode::None, sup_mask, opts);
        if (!q.converged) member_converged[i] = 0;
        per_member[i].resize(ps.size());
        for (std::size_t c = 0; c < ps.size(); ++c) {
            const double v = sup_mask[c] ? q.values[c] : std::pow(q.values[c], 1.0 / ps[c]);
            per_member[i][c] = v / l2;
        }
    });
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (member_skipped[i]) {
            ++res.skipped;
            continue;
        }
        if (!member_converged[i]) res.all_converged = false;
        for (std::size_t c = 0; c < ps.size(); ++c) {
            if (per_member[i][c] > res.constants[c]) {
                res.constants[c] = per_member[i][c];
                res.argmax[c] = static_cast<int>(i);
            }
        }
    }
    return res;
}

inline std::pair<double, int> local_constant(const DyadicScale& N, double p, const std::vector<EnsembleMember>& members,
                                             SymbolKind kind, const QuadOpts& opts = {}, int threads = 1) {
    auto r = local_constants(N, {p}, members, kind, opts, threads);
    return {r.constants[0], r.argmax[0]};
}

// -----------------------------------------------------------------------
// Global mixed norm ( sum_{|gamma| <= Gamma} ||u||^q_{L^p([gamma,gamma+1] x M)} )^{1/q}
// for u = e^{it Box} F; p = inf uses the grid sup per window.
// -----------------------------------------------------------------------

struct GlobalNormResult {
    double value = 0.0;
    bool wrap_flagged = false;  // L < 8 N (Gamma + 1): periodization may recirculate mass
    bool converged = true;
    std::vector<double> window_norms;  // by gamma = -Gamma .. Gamma
};

// several (p, q) pairs in one synthesis sweep per window
inline std::vector<GlobalNormResult> global_mixed_norms_member(const EnsembleMember& m, const DyadicScale& N,
                                                               const std::vector<std::pair<double, double>>& pairs,
                                                               int gamma_range, SymbolKind kind,
                                                               const QuadOpts& opts = {}) {
    if (gamma_range < 0) throw std::invalid_argument("global_mixed_norm: Gamma >= 0 required");
    std::vector<GlobalNormResult> out(pairs.size());
    const bool wrap = m.field.domain.x_period < 8.0 * N.as_double() * (gamma_range + 1);
    std::vector<double> ps;
    std::vector<bool> sup_mask;
    for (const auto& [p, q] : pairs) {
        ps.push_back(p);
        sup_mask.push_back(std::isinf(p));
    }
    for (auto& o : out) o.wrap_flagged = wrap;
    auto eval = make_norm_evaluator(m, kind, opts.oversample);
    std::vector<double> acc(pairs.size(), 0.0);
    for (int g = -gamma_range; g <= gamma_range; ++g) {
        const double a = static_cast<double>(g), b = a + 1.0;
        GradeMode grade = GradeMode::None;
        if (a == 0.0) grade = GradeMode::Left;
        else if (b == 0.0) grade = GradeMode::Right;
        auto r = adaptive_multi_quadrature([&](double t) { return eval(t, ps); }, a, b, grade, sup_mask, opts);
        for (std::size_t c = 0; c < pairs.size(); ++c) {
            if (!r.converged) out[c].converged = false;
            const double w = sup_mask[c] ? r.values[c] : std::pow(r.values[c], 1.0 / pairs[c].first);
            out[c].window_norms.push_back(w);
            acc[c] += std::pow(w, pairs[c].second);
        }
    }
    for (std::size_t c = 0; c < pairs.size(); ++c) out[c].value = std::pow(acc[c], 1.0 / pairs[c].second);
    return out;
}

inline GlobalNormResult global_mixed_norm_member(const EnsembleMember& m, const DyadicScale& N, double p, double q,
                                                 int gamma_range, SymbolKind kind, const QuadOpts& opts = {}) {
    return global_mixed_norms_member(m, N, {{p, q}}, gamma_range, kind, opts)[0];
}

inline GlobalNormResult global_mixed_norm(const SpectralField& F, const DyadicScale& N, double p, double q,
                                          int gamma_range, SymbolKind kind, const QuadOpts& opts = {}) {
    EnsembleMember m;
    m.field = F;
    return global_mixed_norm_member(m, N, p, q, gamma_range, kind, opts);
}

// -----------------------------------------------------------------------
// Gaussian-window profile: J_gamma^4 = int e^{-(t-gamma)^2} ||u(t)||_4^4 dt
// truncated at |t - gamma| <= 6 (weight tail < 1e-15), and the sum J of
// J_gamma^8 over the window range.
// -----------------------------------------------------------------------

struct WindowNorm {
    int gamma = 0;
    double value = 0.0;  // J_gamma
};

struct GaussianWindowProfile {
    std::vector<WindowNorm> windows;
    double j_sum = 0.0;  // sum of J_gamma^8
    bool converged = true;
    bool wrap_flagged = false;
};

inline GaussianWindowProfile gaussian_window_profile_member(const EnsembleMember& m, const DyadicScale& N,
                                                            int gamma_range, const QuadOpts& opts = {}) {
    GaussianWindowProfile out;
    out.wrap_flagged = m.field.domain.x_period < 8.0 * N.as_double() * (gamma_range + 1);
    auto eval = make_norm_evaluator(m, SymbolKind::Hyperbolic, opts.oversample);
    std::vector<double> ps{4.0};
    std::vector<bool> sup_mask{false};
    for (int g = -gamma_range; g <= gamma_range; ++g) {
        const double gamma = static_cast<double>(g);
        auto weighted = [&](double t) {
            auto v = eval(t, ps);
            const double w = std::exp(-(t - gamma) * (t - gamma));
            v[0] *= w;
            return v;
        };
        double j4 = 0.0;
        bool conv = true;
        const double a = gamma - 6.0, b = gamma + 6.0;
        if (a < 0.0 && b > 0.0) {
            auto rl = adaptive_multi_quadrature(weighted, a, 0.0, GradeMode::Right, sup_mask, opts);
            auto rr = adaptive_multi_quadrature(weighted, 0.0, b, GradeMode::Left, sup_mask, opts);
            j4 = rl.values[0] + rr.values[0];
            conv = rl.converged && rr.converged;
        } else {
            auto r = adaptive_multi_quadrature(weighted, a, b, GradeMode::None, sup_mask, opts);
            j4 = r.values[0];
            conv = r.converged;
        }
        if (!conv) out.converged = false;
        const double jg = std::pow(std::max(j4, 0.0), 0.25);
        out.windows.push_back({g, jg});
        out.j_sum += std::pow(jg, 8.0);
    }
    return out;
}

inline GaussianWindowProfile gaussian_window_profile(const SpectralField& F, const DyadicScale& N, int gamma_range,
                                                     const QuadOpts& opts = {}) {
    EnsembleMember m;
    m.field = F;
    return gaussian_window_profile_member(m, N, gamma_range, opts);
}

// -----------------------------------------------------------------------
// Improved L^4 bound for the mixed flow:
//   || e^{it dxdy} P_{<=N} F ||_{L^4([0,1] x M)}
//   -----------------------------------------------------------
//   (log N)^{1/4} ||F||_{L^2} + N^{1/4} || Fhat ||_{l^4_n L^2_xi}
// -----------------------------------------------------------------------

inline double improved_bound_ratio_member(const EnsembleMember& m, const DyadicScale& N, const QuadOpts& opts = {}) {
    if (N.n < 2) throw std::invalid_argument("improved_bound_ratio: N >= 2 required");
    EnsembleMember proj = project_member(m, N);
    const double l2 = proj.field.l2_norm();
    const double mixed = mixed_l4n_l2xi_norm(proj.field);
    const double denom = std::pow(std::log(N.as_double()), 0.25) * l2 + std::pow(N.as_double(), 0.25) * mixed;
    if (denom <= 0.0) throw std::invalid_argument("improved_bound_ratio: zero denominator");
    auto eval = make_norm_evaluator(proj, SymbolKind::MixedDerivative, opts.oversample);
    std::vector<double> ps{4.0};
    auto q = adaptive_multi_quadrature([&](double t) { return eval(t, ps); }, 0.0, 1.0, GradeMode::Left,
                                       std::vector<bool>{false}, opts);
    return std::pow(q.values[0], 0.25) / denom;
}

inline double improved_bound_ratio(const SpectralField& F, const DyadicScale& N, const QuadOpts& opts = {}) {
    EnsembleMember m;
    m.field = F;
    return improved_bound_ratio_member(m, N, opts);
}

}  // namespace hnls
