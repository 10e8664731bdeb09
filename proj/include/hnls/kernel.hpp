#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "hnls/bump.hpp"
#include "hnls/common.hpp"
#include "hnls/domain.hpp"

namespace hnls {

namespace glq {
// 16-point Gauss-Legendre on [-1,1]
inline constexpr double nodes[16] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
inline constexpr double weights[16] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};
}  // namespace glq

struct KernelNiResult {
    complexd value{0.0, 0.0};
    double rel_error = 0.0;   // self-reported, from refining the panel budget
    bool converged = true;    // rel_error <= tol after refinement
};

namespace detail {

// integral of phi(xi/N) e^{2pi i (xi x - t xi^2)} over [a,b] with panels sized
// so that the phase varies by at most `budget` radians per panel; on top of
// that a width cap proportional to the budget keeps the envelope resolved
// (panel edges land on the phi plateau breaks at |xi| = N). GL-16 per panel.
inline complexd kernel_ni_pass(double t, double x, double N, double budget) {
    const double lo = -2.0 * N, hi = 2.0 * N;
    complexd acc(0.0, 0.0);
    // worklist of panels
    std::vector<std::pair<double, double>> stack{{lo, hi}};
    const double min_width = 4.0 * N * 1e-12;
    const double width_cap = N * budget / (8.0 * PI);
    while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        const double max_abs_xi = std::max(std::abs(a), std::abs(b));
        const double dphase = TWO_PI * (std::abs(x) + 2.0 * std::abs(t) * max_abs_xi) * (b - a);
        if ((dphase > budget || (b - a) > width_cap) && (b - a) > min_width) {
            const double mid = 0.5 * (a + b);
            stack.push_back({a, mid});
            stack.push_back({mid, b});
            continue;
        }
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        complexd panel(0.0, 0.0);
        for (int q = 0; q < 16; ++q) {
            const double xi = mid + half * glq::nodes[q];
            const double env = bump_phi(xi / N);
            if (env == 0.0) continue;
            const double phase = TWO_PI * (xi * x - t * xi * xi);
            panel += glq::weights[q] * env * std::polar(1.0, phase);
        }
        acc += half * panel;
    }
    return acc;
}

}  // namespace detail

// K_{NI}(t,x) = int_R phi(xi/N) e^{2pi i (xi x - t xi^2)} dxi.
// Oscillation-aware composite Gauss rule; panels shrink where the local phase
// gradient 2pi|x - 2 t xi| is large (the stationary point xi = x/(2t) gets the
// widest panels automatically). The error is reported by comparing against a
// run with half the per-panel phase budget.
inline KernelNiResult kernel_ni_detail(double t, double x, const DyadicScale& N, double tol = 1e-8) {
    const double Nd = N.as_double();
    double budget = 4.0 * PI;
    complexd prev = detail::kernel_ni_pass(t, x, Nd, budget);
    KernelNiResult r;
    for (int it = 0; it < 4; ++it) {
        budget *= 0.5;
        const complexd next = detail::kernel_ni_pass(t, x, Nd, budget);
        const double scale = std::max(std::abs(next), 1e-300);
        r.rel_error = std::abs(next - prev) / scale;
        r.value = next;
        prev = next;
        if (r.rel_error <= tol) {
            r.converged = true;
            return r;
        }
    }
    r.converged = false;
    return r;
}

inline complexd kernel_ni(double t, double x, const DyadicScale& N) { return kernel_ni_detail(t, x, N).value; }

// K_{NS}(t,y) = sum_{|k| <= 2N} phi(k/N) e^{2pi i (k y + t k^2)}, an exact
// finite sum.
inline complexd kernel_ns(double t, double y, const DyadicScale& N) {
    const int K = 2 * N.n;
    complexd acc(0.0, 0.0);
    for (int k = -K; k <= K; ++k) {
        const double env = bump_phi(static_cast<double>(k) / N.n);
        if (env == 0.0) continue;
        acc += env * std::polar(1.0, TWO_PI * (k * y + t * static_cast<double>(k) * k));
    }
    return acc;
}

struct KernelSample {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    DyadicScale n;
    complexd value{0.0, 0.0};
    double bound_allt = 0.0;   // N |t|^{-1/2}
    double bound_short = 0.0;  // |t|^{-1}, meaningful only for |t| <= 1/N
};

inline KernelSample kernel(double t, double x, double y, const DyadicScale& N) {
    KernelSample s;
    s.t = t;
    s.x = x;
    s.y = y - std::floor(y);
    s.n = N;
    s.value = kernel_ni(t, x, N) * kernel_ns(t, s.y, N);
    const double at = std::abs(t);
    s.bound_allt = at > 0 ? N.as_double() / std::sqrt(at) : std::numeric_limits<double>::infinity();
    s.bound_short = at > 0 ? 1.0 / at : std::numeric_limits<double>::infinity();
    return s;
}

struct DispersiveScanReport {
    DyadicScale n;
    double c1 = 0.0;  // smallest constant with |K_N| <= C1 N |t|^{-1/2} over the scan
    double c2 = 0.0;  // smallest constant with |K_N| <= C2 |t|^{-1} on |t| <= 1/N
    bool short_window_sampled = false;
    std::vector<KernelSample> samples;
};

// Sup of |K_N|/bound over the sample set; the short-time constant is fitted
// only on the window |t| <= 1/N where the |t|^{-1} rate holds.
inline DispersiveScanReport dispersive_bound_scan(const DyadicScale& N, const std::vector<double>& t_grid,
                                                  const std::vector<std::pair<double, double>>& xy_samples) {
    DispersiveScanReport rep;
    rep.n = N;
    for (double t : t_grid) {
        if (!(t > 0.0)) throw std::invalid_argument("dispersive_bound_scan: t_grid must lie in (0,1]");
        for (auto [x, y] : xy_samples) {
            KernelSample s = kernel(t, x, y, N);
            const double mag = std::abs(s.value);
            rep.c1 = std::max(rep.c1, mag / s.bound_allt);
            if (t <= 1.0 / N.as_double()) {
                rep.c2 = std::max(rep.c2, mag / s.bound_short);
                rep.short_window_sampled = true;
            }
            rep.samples.push_back(s);
        }
    }
    return rep;
}

}  // namespace hnls
