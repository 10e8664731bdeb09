#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hnls/norms.hpp"
#include "hnls/propagator.hpp"

namespace hnls {

// Strang split-step configuration for i u_t + Box u = sign |u|^{2k} u.
struct SolveConfig {
    int k = 1;                 // nonlinearity degree, power 2k+1
    int sign = +1;             // the +/- in front of |u|^{2k} u
    double dt = 1e-3;
    double t_end = 1.0;
    int dealias_pad = 0;       // zero-padding factor; 0 means k+1
    DomainSpec domain;
    int output_stride = 0;     // monitor sampling stride; 0 means every 1/dt-ish

    int pad() const { return dealias_pad > 0 ? dealias_pad : k + 1; }

    void validate() const {
        if (k < 1) throw std::invalid_argument("SolveConfig: k >= 1 required");
        if (sign != 1 && sign != -1) throw std::invalid_argument("SolveConfig: sign must be +1 or -1");
        if (!(dt > 0.0)) throw std::invalid_argument("SolveConfig: dt > 0 required");
        if (pad() < k + 1) throw std::invalid_argument("SolveConfig: dealias_pad >= k+1 required");
    }

    // accuracy guard dt * 4 pi^2 band^2 <= 0.5 (warning only; the splitting
    // itself is unconditionally stable)
    bool accuracy_guard_ok() const {
        const double band = static_cast<double>(domain.n_max);
        return dt * 4.0 * PI * PI * band * band <= 0.5;
    }
};

// exact solution of the phase ODE i u_t = sign |u|^{2k} u: the modulus is
// conserved pointwise and the phase rotates by -sign * dt * |u|^{2k}
inline PhysicalField nonlinear_phase_step(const PhysicalField& f, double dt, int k, int sign) {
    PhysicalField g = f;
    if (dt == 0.0) return g;
    for (auto& v : g.values) {
        const double m2 = std::norm(v);
        double pw = m2;
        for (int i = 1; i < k; ++i) pw *= m2;  // |u|^{2k}
        v *= std::polar(1.0, -static_cast<double>(sign) * dt * pw);
    }
    return g;
}

namespace detail_solver {

// pad factors round up to powers of two so padded grids keep the transform
// efficiency contract; >= k+1 always holds
inline int pow2_pad(int factor) { return static_cast<int>(next_pow2(static_cast<std::size_t>(factor))); }

// nonlinear phase half-step carried out on the zero-padded grid
inline SpectralField nl_substep(const SpectralField& F, double dt, const SolveConfig& cfg) {
    const int p = pow2_pad(cfg.pad());
    SpectralField big = pad_spectrum(F, p, p);
    PhysicalField u = inverse_transform(big);
    u = nonlinear_phase_step(u, dt, cfg.k, cfg.sign);
    return truncate_spectrum(forward_transform(u), F.domain);
}

inline bool finite(const SpectralField& F) {
    for (const auto& c : F.coeffs)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

// |u|^{2k} u evaluated with dealiasing, for Duhamel sources
inline SpectralField nonlinearity(const SpectralField& F, const SolveConfig& cfg) {
    const int p = pow2_pad(cfg.pad());
    SpectralField big = pad_spectrum(F, p, p);
    PhysicalField u = inverse_transform(big);
    for (auto& v : u.values) {
        const double m2 = std::norm(v);
        double pw = m2;
        for (int i = 1; i < cfg.k; ++i) pw *= m2;
        v *= pw;
    }
    return truncate_spectrum(forward_transform(u), F.domain);
}

}  // namespace detail_solver

struct StepResult {
    SpectralField state;
    bool ok = true;
};

// Strang step: half nonlinear, full linear (hyperbolic), half nonlinear.
inline StepResult step_strang(const SpectralField& F, double dt, const SolveConfig& cfg) {
    SpectralField G = detail_solver::nl_substep(F, 0.5 * dt, cfg);
    G = evolve(G, dt, SymbolKind::Hyperbolic);
    G = detail_solver::nl_substep(G, 0.5 * dt, cfg);
    StepResult r{std::move(G), true};
    if (!detail_solver::finite(r.state)) r.ok = false;
    return r;
}

// conserved energy: int (|u_x|^2 - |u_y|^2) + sign/(k+1) int |u|^{2k+2};
// the kinetic part is a spectral sum, the potential a dealiased quadrature
inline double hamiltonian(const SpectralField& F, int k, int sign) {
    double kin = 0.0;
    const int ny = F.domain.n_y;
    for (int ix = 0; ix < F.domain.n_x; ++ix) {
        const double xi = TWO_PI * F.domain.xi(ix);
        for (int iy = 0; iy < ny; ++iy) {
            const double ky = TWO_PI * F.domain.freq_k(iy);
            kin += (xi * xi - ky * ky) * std::norm(F.coeffs[static_cast<std::size_t>(ix) * ny + iy]);
        }
    }
    kin /= F.domain.x_period;
    const int pad = detail_solver::pow2_pad(k + 1);
    SpectralField big = pad_spectrum(F, pad, pad);
    PhysicalField u = inverse_transform(big);
    const double p = 2.0 * k + 2.0;
    const double lp = spatial_lp_norm(u, p);
    return kin + static_cast<double>(sign) / (k + 1.0) * std::pow(lp, p);
}

struct Trajectory {
    std::vector<double> times;
    std::vector<SpectralField> states;
    std::vector<double> mass;         // L^2 norms
    std::vector<double> hamiltonians;
    bool aborted = false;
    std::string abort_reason;
};

inline Trajectory integrate(const SpectralField& u0, const SolveConfig& cfg) {
    cfg.validate();
    Trajectory traj;
    const long long steps = std::llround(cfg.t_end / cfg.dt);
    const long long stride = cfg.output_stride > 0
                                 ? cfg.output_stride
                                 : std::max<long long>(1, steps / 64);
    SpectralField u = u0;
    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.states.push_back(u);
        traj.mass.push_back(u.l2_norm());
        traj.hamiltonians.push_back(hamiltonian(u, cfg.k, cfg.sign));
    };
    record(0.0);
    for (long long s = 1; s <= steps; ++s) {
        StepResult r = step_strang(u, cfg.dt, cfg);
        if (!r.ok) {
            traj.aborted = true;
            traj.abort_reason = "non-finite state at step " + std::to_string(s);
            return traj;
        }
        u = std::move(r.state);
        if (s % stride == 0 || s == steps) record(cfg.dt * static_cast<double>(s));
    }
    return traj;
}

struct PicardTrace {
    std::vector<SpectralField> iterates;  // value of each iterate at t = T
    std::vector<double> residuals;        // sup over the grid of H^{s_{2,k}} differences
    bool diverged = false;
};

// Picard iteration for Gamma(u) = e^{it Box} u0 - i sign I[|u|^{2k} u]:
// u^{(0)} = linear flow on a uniform grid over [0,T]; each update feeds the
// *difference* of nonlinearities through the cumulative Duhamel quadrature so
// residuals stay meaningful far below the iterate magnitude.
inline PicardTrace picard_iterate(const SpectralField& u0, double T, int iters, const SolveConfig& cfg,
                                  int grid_samples = 64) {
    cfg.validate();
    if (!(T > 0.0 && T <= 1.0)) throw std::invalid_argument("picard_iterate: 0 < T <= 1 required");
    if (iters < 2) throw std::invalid_argument("picard_iterate: iters >= 2 required");
    const int M = grid_samples;
    const double dtau = T / M;
    const SobolevIndex s = SobolevIndex::critical(cfg.k);

    std::vector<SpectralField> u(M + 1, SpectralField(u0.domain));
    for (int j = 0; j <= M; ++j) u[j] = evolve(u0, dtau * j, SymbolKind::Hyperbolic);

    PicardTrace trace;
    trace.iterates.push_back(u.back());

    std::vector<SpectralField> prevF(M + 1, SpectralField(u0.domain));  // F(u^{-1}) := 0
    const complexd ii(0.0, 1.0);
    for (int it = 0; it < iters; ++it) {
        std::vector<SpectralField> curF(M + 1, SpectralField(u0.domain));
        for (int j = 0; j <= M; ++j) curF[j] = detail_solver::nonlinearity(u[j], cfg);
        std::vector<SpectralField> dF(M + 1, SpectralField(u0.domain));
        for (int j = 0; j <= M; ++j)
            for (std::size_t i = 0; i < dF[j].coeffs.size(); ++i)
                dF[j].coeffs[i] = curF[j].coeffs[i] - prevF[j].coeffs[i];
        std::vector<SpectralField> delta = duhamel_cumulative(dF, dtau, SymbolKind::Hyperbolic);
        double res = 0.0;
        for (int j = 0; j <= M; ++j) {
            for (std::size_t i = 0; i < delta[j].coeffs.size(); ++i) {
                const complexd d = -ii * static_cast<double>(cfg.sign) * delta[j].coeffs[i];
                delta[j].coeffs[i] = d;
                u[j].coeffs[i] += d;
            }
            res = std::max(res, sobolev_norm(delta[j], s));
        }
        trace.residuals.push_back(res);
        trace.iterates.push_back(u.back());
        prevF = std::move(curF);
        const std::size_t n = trace.residuals.size();
        if (n >= 3 && trace.residuals[n - 1] > trace.residuals[n - 2] &&
            trace.residuals[n - 2] > trace.residuals[n - 3]) {
            trace.diverged = true;
            break;
        }
    }
    return trace;
}

struct ScatterTrace {
    std::vector<double> times;
    std::vector<std::vector<double>> pullback_norm_diffs;  // symmetric, zero diagonal
    SpectralField u_plus;                                  // pullback at the last time
};

// pull the flow back by e^{-it Box} and compare: Cauchy behavior of
// v(t) = e^{-it Box} u(t) in H^s is the scattering diagnostic
inline ScatterTrace scattering_profile(const Trajectory& traj, const SobolevIndex& s) {
    ScatterTrace out;
    out.times = traj.times;
    std::vector<SpectralField> v;
    v.reserve(traj.states.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i)
        v.push_back(evolve(traj.states[i], -traj.times[i], SymbolKind::Hyperbolic));
    const std::size_t n = v.size();
    out.pullback_norm_diffs.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            SpectralField d = v[i];
            for (std::size_t c = 0; c < d.coeffs.size(); ++c) d.coeffs[c] -= v[j].coeffs[c];
            const double nd = sobolev_norm(d, s);
            out.pullback_norm_diffs[i][j] = nd;
            out.pullback_norm_diffs[j][i] = nd;
        }
    }
    if (!v.empty()) out.u_plus = v.back();
    return out;
}

}  // namespace hnls
