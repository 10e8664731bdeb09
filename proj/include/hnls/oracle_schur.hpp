#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include "hnls/kernel.hpp"
#include "hnls/oracle_measures.hpp"

namespace hnls {

// Reduced Schur-test quantity: Gaussian-weighted mass of the level set
//   |(xi,k) - (0,c)|^2_- + |(xi',k') - (0,c')|^2_- = A
// summed over |xi|+|k| <= 8N, |xi'|+|k'| <= 8N, with weights
//   exp(-1/2 [ (Phi)^2 + (Phi')^2 ]),  Phi = xi^2 - (k-c)^2 - r.
struct SchurInstance {
    double a = 0.0;        // the level A
    double r = 0.0;        // |R|^2_-
    double r_prime = 0.0;  // |R'|^2_-
    double c = 0.0;        // in {0, 1/2}
    double c_prime = 0.0;  // in {0, 1/2}
    DyadicScale n;

    void validate() const {
        auto ok = [](double v) { return v == 0.0 || v == 0.5; };
        if (!ok(c) || !ok(c_prime)) throw std::invalid_argument("SchurInstance: c, c' must lie in {0, 1/2}");
    }
};

namespace detail_schur {

// On the delta-circle xi^2 + xi'^2 = B(k,k') the substitution phi = xi^2 - s_k
// (s_k = (k-c)^2 + r) turns every per-pair circle integral into a slice of a
// single 1-D integral whose integrand factorizes over k and k'. With
// S = A - r - r' the identity Phi + Phi' = S holds on every circle, so
//   sum = int e^{-[(phi)^2 + (S-phi)^2]/2} P(phi) Q(phi) dphi,
//   P(phi) = sum_k (s_k + phi)^{-1/2} over 0 <= s_k + phi <= (8N-|k|)^2,
// and Q is the primed analogue at S - phi. Inverse-sqrt breakpoints become
// panel boundaries with a square-root substitution.
struct AxisTerms {
    std::vector<double> s;        // s_k ordered by k = -kmax..kmax
    std::vector<double> clip_sq;  // (8N - |k|)^2
};

inline AxisTerms build_axis(double center, double r, double clipR) {
    AxisTerms ax;
    const long long kmax = static_cast<long long>(std::floor(clipR));
    ax.s.reserve(2 * kmax + 1);
    ax.clip_sq.reserve(2 * kmax + 1);
    for (long long k = -kmax; k <= kmax; ++k) {
        const double d = static_cast<double>(k) - center;
        ax.s.push_back(d * d + r);
        const double c = clipR - std::abs(static_cast<double>(k));
        ax.clip_sq.push_back(c * c);
    }
    return ax;
}

inline double axis_sum(const AxisTerms& ax, double u_offset) {
    // sum over k of (s_k + u_offset)^{-1/2} where the argument lies in (0, clip^2]
    double acc = 0.0;
    for (std::size_t i = 0; i < ax.s.size(); ++i) {
        const double u = ax.s[i] + u_offset;
        if (u > 0.0 && u <= ax.clip_sq[i]) acc += 1.0 / std::sqrt(u);
    }
    return acc;
}

}  // namespace detail_schur

inline double schur_shell_sum(const SchurInstance& inst) {
    inst.validate();
    const double clipR = SHELL_CLIP_FACTOR * inst.n.as_double();
    const double S = inst.a - inst.r - inst.r_prime;
    const double w0 = 0.5 * S - 6.5, w1 = 0.5 * S + 6.5;

    const auto ax = detail_schur::build_axis(inst.c, inst.r, clipR);
    const auto axp = detail_schur::build_axis(inst.c_prime, inst.r_prime, clipR);

    // integrand g(phi) = exp(-[phi^2 + (S-phi)^2]/2) P(phi) Q(phi)
    auto g = [&](double phi) {
        const double e = std::exp(-0.5 * (phi * phi + (S - phi) * (S - phi)));
        if (e == 0.0) return 0.0;
        const double P = detail_schur::axis_sum(ax, phi);
        if (P == 0.0) return 0.0;
        const double Q = detail_schur::axis_sum(axp, S - phi);
        return e * P * Q;
    };

    // breakpoints: inverse-sqrt onsets (singular) and clip jumps (plain)
    std::set<double> sing, plain;
    for (std::size_t i = 0; i < ax.s.size(); ++i) {
        const double on = -ax.s[i];
        if (on > w0 && on < w1) sing.insert(on);
        const double off = ax.clip_sq[i] - ax.s[i];
        if (off > w0 && off < w1) plain.insert(off);
    }
    for (std::size_t i = 0; i < axp.s.size(); ++i) {
        const double on = S + axp.s[i];
        if (on > w0 && on < w1) sing.insert(on);
        const double off = S + axp.s[i] - axp.clip_sq[i];
        if (off > w0 && off < w1) plain.insert(off);
    }
    std::vector<double> cuts{w0, w1};
    cuts.insert(cuts.end(), sing.begin(), sing.end());
    cuts.insert(cuts.end(), plain.begin(), plain.end());
    // keep panels at most 0.75 wide for the Gaussian factor
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> grid;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        grid.push_back(cuts[i]);
        const double len = cuts[i + 1] - cuts[i];
        const int split = std::max(1, static_cast<int>(std::ceil(len / 0.75)));
        for (int s = 1; s < split; ++s) grid.push_back(cuts[i] + len * s / split);
    }
    grid.push_back(cuts.back());

    auto is_sing = [&](double x) {
        auto it = sing.lower_bound(x - 1e-11);
        return it != sing.end() && *it < x + 1e-11;
    };

    // GL-16 panel; square-root substitution regularizes singular endpoints
    std::function<double(double, double, int)> panel = [&](double a, double b, int depth) -> double {
        if (!(b > a)) return 0.0;
        const bool sa = is_sing(a), sb = is_sing(b);
        if (sa && sb && depth < 3) {
            const double m = 0.5 * (a + b);
            return panel(a, m, depth + 1) + panel(m, b, depth + 1);
        }
        double acc = 0.0;
        if (sa) {
            const double w = std::sqrt(b - a);  // phi = a + z^2, z in [0, w]
            for (int q = 0; q < 16; ++q) {
                const double z = 0.5 * w * (glq::nodes[q] + 1.0);
                acc += 0.5 * w * glq::weights[q] * 2.0 * z * g(a + z * z);
            }
        } else if (sb) {
            const double w = std::sqrt(b - a);  // phi = b - z^2
            for (int q = 0; q < 16; ++q) {
                const double z = 0.5 * w * (glq::nodes[q] + 1.0);
                acc += 0.5 * w * glq::weights[q] * 2.0 * z * g(b - z * z);
            }
        } else {
            const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
            for (int q = 0; q < 16; ++q) acc += half * glq::weights[q] * g(mid + half * glq::nodes[q]);
        }
        return acc;
    };

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) total += panel(grid[i], grid[i + 1], 0);
    return total;
}

// Thickened-shell Monte Carlo for small instances (test oracle): replaces the
// delta by 1{|level - A| <= eps/2}/eps and samples (xi, xi') uniformly on the
// positive quadrant bounding box, exploiting the 4-fold sign symmetry.
struct SchurMcResult {
    double estimate = 0.0;
    double stderr_ = 0.0;
};

inline SchurMcResult schur_shell_sum_mc(const SchurInstance& inst, long long n_samples, double eps = 1e-3,
                                        std::uint64_t seed = 0x73636875ULL) {
    inst.validate();
    const double clipR = SHELL_CLIP_FACTOR * inst.n.as_double();
    const long long kmax = static_cast<long long>(std::floor(clipR));
    double mean = 0.0, m2 = 0.0;
    long long cnt = 0;
    Rng rng(seed);
    const double R = clipR;
    // estimator: E[f] * 4 R^2 (2kmax+1)^2 over uniform (xi, xi', k, k'),
    // the factor 4 from the xi -> -xi, xi' -> -xi' symmetry of the weight
    const double scale = 4.0 * R * R * static_cast<double>(2 * kmax + 1) * static_cast<double>(2 * kmax + 1);
    for (long long i = 0; i < n_samples; ++i) {
        const double xi = rng.uniform(0.0, R);
        const double xip = rng.uniform(0.0, R);
        const long long k = static_cast<long long>(rng.uniform_int(-kmax, kmax));
        const long long kp = static_cast<long long>(rng.uniform_int(-kmax, kmax));
        double val = 0.0;
        if (xi + std::abs(static_cast<double>(k)) <= clipR && xip + std::abs(static_cast<double>(kp)) <= clipR) {
            const double phi = xi * xi - (static_cast<double>(k) - inst.c) * (static_cast<double>(k) - inst.c) - inst.r;
            const double phip = xip * xip -
                                (static_cast<double>(kp) - inst.c_prime) * (static_cast<double>(kp) - inst.c_prime) -
                                inst.r_prime;
            const double level = (phi + inst.r) + (phip + inst.r_prime);
            if (std::abs(level - inst.a) <= 0.5 * eps)
                val = std::exp(-0.5 * (phi * phi + phip * phip)) / eps;
        }
        val *= scale;
        ++cnt;
        const double d = val - mean;
        mean += d / cnt;
        m2 += d * (val - mean);
    }
    SchurMcResult out;
    out.estimate = mean;
    out.stderr_ = cnt > 1 ? std::sqrt(m2 / (cnt - 1) / cnt) : 0.0;
    return out;
}

// Discrete Hardy-Littlewood-Sobolev ratio:
//   sum_{j != k} a_j b_k |j-k|^{-alpha} / (||a||_p ||b||_r),
// valid on the scaling line 1/p + 1/r + alpha = 2.
inline double hls_ratio(const std::vector<double>& a, const std::vector<double>& b, double alpha, double p, double r) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("hls_ratio: alpha in (0,1) required");
    if (std::abs(1.0 / p + 1.0 / r + alpha - 2.0) > 1e-9)
        throw std::invalid_argument("hls_ratio: scaling condition 1/p + 1/r + alpha = 2 violated");
    double bilinear = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] == 0.0) continue;
        for (std::size_t k = 0; k < b.size(); ++k) {
            if (j == k || b[k] == 0.0) continue;
            const double d = std::abs(static_cast<double>(j) - static_cast<double>(k));
            bilinear += a[j] * b[k] / std::pow(d, alpha);
        }
    }
    double na = 0.0, nb = 0.0;
    for (double v : a) na += std::pow(std::abs(v), p);
    for (double v : b) nb += std::pow(std::abs(v), r);
    na = std::pow(na, 1.0 / p);
    nb = std::pow(nb, 1.0 / r);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return bilinear / (na * nb);
}

}  // namespace hnls
