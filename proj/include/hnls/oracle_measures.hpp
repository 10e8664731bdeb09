#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hnls/common.hpp"
#include "hnls/domain.hpp"

namespace hnls {

// Clip window |xi| + |k| <= SHELL_CLIP_FACTOR * N for the shell and Schur
// sets (the source statements only fix the window up to a constant).
inline constexpr double SHELL_CLIP_FACTOR = 8.0;

struct Interval {
    double lo = 0.0, hi = 0.0;
    bool empty() const { return !(hi > lo); }
    double length() const { return empty() ? 0.0 : hi - lo; }
    Interval clipped(const Interval& c) const { return Interval{std::max(lo, c.lo), std::min(hi, c.hi)}; }
};

// {xi : (xi - center)^2 in [slo, shi]} as up to two symmetric intervals.
inline std::vector<Interval> sq_band_intervals(double center, double slo, double shi) {
    std::vector<Interval> out;
    if (shi < 0.0 || shi < slo) return out;
    const double r2 = std::sqrt(shi);
    const double r1 = std::sqrt(std::max(slo, 0.0));
    out.push_back(Interval{center - r2, center - r1});
    out.push_back(Interval{center + r1, center + r2});
    return out;
}

inline double intervals_measure(const std::vector<Interval>& iv, const std::optional<Interval>& clip) {
    double m = 0.0;
    for (const auto& i : iv) m += (clip ? i.clipped(*clip) : i).length();
    return m;
}

// Lebesgue measure of {xi : |xi^2 - a| <= c_width} intersected with clip:
// 0 if a + c_width < 0, else 2(sqrt(a+c) - sqrt(max(a-c,0))) before clipping.
inline double xi_square_band_measure(double a, double c_width, std::optional<Interval> clip = std::nullopt) {
    if (!(c_width > 0.0)) throw std::invalid_argument("xi_square_band_measure: c_width > 0 required");
    return intervals_measure(sq_band_intervals(0.0, a - c_width, a + c_width), clip);
}

// ---------------------------------------------------------------------------
// Monte Carlo cross-check machinery: stratified rejection sampling. Each
// stratum samples uniformly over boxes that are guaranteed to contain the
// stratum's true set (closed-form root intervals padded by 50% plus margin)
// and evaluates the defining inequality directly, never the closed form.
// ---------------------------------------------------------------------------

struct McStratum {
    std::vector<Interval> boxes;
    std::function<bool(double)> indicator;
};

struct McEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    long long n_samples = 0;
};

inline std::vector<Interval> pad_boxes(const std::vector<Interval>& iv, const std::optional<Interval>& clip,
                                       double pad_frac = 0.5, double pad_abs = 0.05) {
    std::vector<Interval> out;
    for (const auto& i : iv) {
        if (i.empty()) continue;
        const double pad = pad_frac * i.length() + pad_abs;
        Interval p{i.lo - pad, i.hi + pad};
        if (clip) p = p.clipped(*clip);
        if (!p.empty()) out.push_back(p);
    }
    // merge overlaps so sampling never double-counts
    std::sort(out.begin(), out.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> merged;
    for (const auto& i : out) {
        if (!merged.empty() && i.lo <= merged.back().hi)
            merged.back().hi = std::max(merged.back().hi, i.hi);
        else
            merged.push_back(i);
    }
    return merged;
}

inline McEstimate stratified_mc(const std::vector<McStratum>& strata, std::uint64_t seed, double exact_value,
                                double target_rel_stderr = 0.008, long long n_base = 1024, long long n_cap = 1 << 22) {
    McEstimate res;
    long long per = n_base;
    for (int pass = 0; pass < 4; ++pass) {
        double est = 0.0, var = 0.0;
        long long used = 0;
        for (std::size_t s = 0; s < strata.size(); ++s) {
            double blen = 0.0;
            for (const auto& b : strata[s].boxes) blen += b.length();
            if (blen <= 0.0) continue;
            Rng rng(derive_seed(seed, s * 16 + pass));
            long long hits = 0;
            for (long long i = 0; i < per; ++i) {
                double u = rng.uniform() * blen;
                double x = strata[s].boxes.back().hi;  // roundoff fallback
                for (const auto& b : strata[s].boxes) {
                    if (u < b.length()) { x = b.lo + u; break; }
                    u -= b.length();
                }
                if (strata[s].indicator(x)) ++hits;
            }
            const double p = static_cast<double>(hits) / per;
            est += blen * p;
            var += blen * blen * p * (1.0 - p) / per;
            used += per;
        }
        res.estimate = est;
        res.stderr_ = std::sqrt(var);
        res.n_samples = used;
        const double target = target_rel_stderr * std::max(std::abs(exact_value), 1e-12);
        if (res.stderr_ <= target || per >= n_cap) break;
        const double factor = std::min(16.0, (res.stderr_ / target) * (res.stderr_ / target) * 1.2);
        per = std::min(n_cap, static_cast<long long>(per * std::max(2.0, factor)));
    }
    return res;
}

// Exact closed-form value of a product Lebesgue x counting measure plus the
// Monte Carlo cross-check of the same set.
struct MeasureReport {
    double exact = 0.0;
    double mc_estimate = 0.0;
    double mc_stderr = 0.0;
    long long n_samples = 0;
    bool mc_consistent = true;            // |exact - mc| <= 4 stderr
    double resonant_measure = 0.0;        // hyperbolic sets: the 2n1 = n slice, kept apart
    std::vector<std::pair<std::string, double>> params;

    void attach_mc(const McEstimate& mc) {
        mc_estimate = mc.estimate;
        mc_stderr = mc.stderr_;
        n_samples = mc.n_samples;
        mc_consistent = std::abs(exact - mc_estimate) <= 4.0 * mc_stderr + 1e-12;
    }
};

// ---------------------------------------------------------------------------
// mes(B_N(tau, n)): |tau + xi1^2 - (n - n1)^2| <= C over |n1| <= 2N,
// |n - n1| <= 2N, xi1 free.
// ---------------------------------------------------------------------------
inline MeasureReport mes_B_N(double tau, long long n, double c_width, const DyadicScale& N, bool with_mc = true,
                             std::uint64_t seed = 0x6D65734221ULL) {
    if (!(c_width > 0.0)) throw std::invalid_argument("mes_B_N: c_width > 0 required");
    MeasureReport rep;
    rep.params = {{"tau", tau}, {"n", static_cast<double>(n)}, {"c_width", c_width}, {"N", N.as_double()}};
    std::vector<McStratum> strata;
    const long long B = 2LL * N.n;
    for (long long n1 = std::max(-B, n - B); n1 <= std::min(B, n + B); ++n1) {
        const double a = static_cast<double>((n - n1) * (n - n1)) - tau;
        rep.exact += xi_square_band_measure(a, c_width);
        if (with_mc) {
            McStratum st;
            st.boxes = pad_boxes(sq_band_intervals(0.0, a - c_width, a + c_width), std::nullopt);
            st.indicator = [tau, n, n1, c_width](double xi1) {
                const double v = tau + xi1 * xi1 - static_cast<double>((n - n1) * (n - n1));
                return std::abs(v) <= c_width;
            };
            strata.push_back(std::move(st));
        }
    }
    if (with_mc) rep.attach_mc(stratified_mc(strata, seed, rep.exact));
    return rep;
}

// ---------------------------------------------------------------------------
// mes(A_N(tau, xi, n)) for the parabolic phase
//   |tau + xi1^2 + (xi-xi1)^2 - n1^2 - (n-n1)^2| <= C,
// evaluated by two independent algebraic routes that must agree to 1e-12:
//   direct:   per n1, complete the square in xi1 only;
//   reduced:  complete squares in both variables, which shifts the problem to
//             a B_N-type sum over half-integers m = n1 - n/2.
// ---------------------------------------------------------------------------
struct ParabolicMeasure {
    MeasureReport report;
    double exact_direct = 0.0;
    double exact_reduced = 0.0;
    double route_gap = 0.0;
};

inline ParabolicMeasure mes_A_N_parabolic(double tau, double xi, long long n, double c_width, const DyadicScale& N,
                                          bool with_mc = true, std::uint64_t seed = 0x70617261ULL) {
    if (!(c_width > 0.0)) throw std::invalid_argument("mes_A_N_parabolic: c_width > 0 required");
    ParabolicMeasure out;
    out.report.params = {{"tau", tau}, {"xi", xi}, {"n", static_cast<double>(n)}, {"c_width", c_width}, {"N", N.as_double()}};
    const double tau_shift = tau + 0.5 * xi * xi - 0.5 * static_cast<double>(n) * n;
    std::vector<McStratum> strata;
    const long long B = 2LL * N.n;
    for (long long n1 = std::max(-B, n - B); n1 <= std::min(B, n + B); ++n1) {
        const double aA = tau + 0.5 * xi * xi - static_cast<double>(n1) * n1 - static_cast<double>((n - n1) * (n - n1));
        out.exact_direct += xi_square_band_measure(-0.5 * aA, 0.5 * c_width);
        const double m = static_cast<double>(n1) - 0.5 * static_cast<double>(n);
        out.exact_reduced += xi_square_band_measure(m * m - 0.5 * tau_shift, 0.5 * c_width);
        if (with_mc) {
            McStratum st;
            st.boxes = pad_boxes(sq_band_intervals(0.5 * xi, -0.5 * aA - 0.5 * c_width, -0.5 * aA + 0.5 * c_width),
                                 std::nullopt);
            st.indicator = [tau, xi, n, n1, c_width](double x1) {
                const double v = tau + x1 * x1 + (xi - x1) * (xi - x1) - static_cast<double>(n1) * n1 -
                                 static_cast<double>((n - n1) * (n - n1));
                return std::abs(v) <= c_width;
            };
            strata.push_back(std::move(st));
        }
    }
    out.report.exact = out.exact_direct;
    out.route_gap = std::abs(out.exact_direct - out.exact_reduced);
    if (with_mc) out.report.attach_mc(stratified_mc(strata, seed, out.report.exact));
    return out;
}

// ---------------------------------------------------------------------------
// mes(A_N(tau, xi, n)) for the hyperbolic phase
//   |tau + xi1 n1 + (xi - xi1)(n - n1)| <= C
// with |n1| <= 2N, |n - n1| <= 2N, |xi1| <= 2N, |xi - xi1| <= 2N. The form is
// linear in xi1 with slope 2n1 - n; the resonant slice 2n1 = n is excluded
// from the measure and reported in `resonant_measure`.
// ---------------------------------------------------------------------------
inline MeasureReport mes_A_N_hyperbolic(double tau, double xi, long long n, double c_width, const DyadicScale& N,
                                        bool with_mc = true, std::uint64_t seed = 0x68797065ULL) {
    if (!(c_width > 0.0)) throw std::invalid_argument("mes_A_N_hyperbolic: c_width > 0 required");
    MeasureReport rep;
    rep.params = {{"tau", tau}, {"xi", xi}, {"n", static_cast<double>(n)}, {"c_width", c_width}, {"N", N.as_double()}};
    const double B = 2.0 * N.n;
    const Interval clip{std::max(-B, xi - B), std::min(B, xi + B)};
    std::vector<McStratum> strata;
    const long long Bn = 2LL * N.n;
    for (long long n1 = std::max(-Bn, n - Bn); n1 <= std::min(Bn, n + Bn); ++n1) {
        const double slope = static_cast<double>(2 * n1 - n);
        const double offset = xi * static_cast<double>(n - n1) + tau;
        if (slope == 0.0) {
            if (std::abs(offset) <= c_width) rep.resonant_measure += clip.length();
            continue;
        }
        const double center = -offset / slope;
        const double half = c_width / std::abs(slope);
        Interval iv{center - half, center + half};
        rep.exact += iv.clipped(clip).length();
        if (with_mc) {
            McStratum st;
            st.boxes = pad_boxes({iv}, clip);
            st.indicator = [tau, xi, n, n1, c_width, B](double x1) {
                if (std::abs(x1) > B || std::abs(xi - x1) > B) return false;
                const double v = tau + x1 * static_cast<double>(n1) + (xi - x1) * static_cast<double>(n - n1);
                return std::abs(v) <= c_width;
            };
            strata.push_back(std::move(st));
        }
    }
    if (with_mc) rep.attach_mc(stratified_mc(strata, seed, rep.exact));
    return rep;
}

// #{n1 : (n - n1)^2 - tau in [L, 2L], |n1| <= 2N, |n - n1| <= 2N}
inline long long count_hyperbola_band(long long n, double tau, double L, const DyadicScale& N) {
    long long count = 0;
    const long long B = 2LL * N.n;
    for (long long n1 = std::max(-B, n - B); n1 <= std::min(B, n + B); ++n1) {
        const double v = static_cast<double>((n - n1) * (n - n1)) - tau;
        if (v >= L && v <= 2.0 * L) ++count;
    }
    return count;
}

// ---------------------------------------------------------------------------
// Level shells A_j = {(xi,k) : |Phi(xi,k)| in [j, j+1), |xi|+|k| <= 8N} with
// Phi(xi,k) = (xi - c_x)^2 - (k - c_y)^2 - r_offset.
// ---------------------------------------------------------------------------
struct ShellSpec {
    long long j = 0;
    double center_x = 0.0;
    double center_y = 0.0;
    double r_offset = 0.0;  // the |R|^2_- shift
    DyadicScale n;
};

inline MeasureReport mes_level_shell(const ShellSpec& spec, bool with_mc = true, std::uint64_t seed = 0x7368656CULL) {
    if (spec.j < 0) throw std::invalid_argument("mes_level_shell: j >= 0 required");
    MeasureReport rep;
    rep.params = {{"j", static_cast<double>(spec.j)}, {"center_x", spec.center_x}, {"center_y", spec.center_y},
                  {"r_offset", spec.r_offset}, {"N", spec.n.as_double()}};
    const double clipR = SHELL_CLIP_FACTOR * spec.n.as_double();
    const long long kmax = static_cast<long long>(std::floor(clipR));
    const double j = static_cast<double>(spec.j);
    std::vector<McStratum> strata;
    for (long long k = -kmax; k <= kmax; ++k) {
        const double xiclip = clipR - std::abs(static_cast<double>(k));
        const Interval clip{-xiclip, xiclip};
        const double v = (static_cast<double>(k) - spec.center_y) * (static_cast<double>(k) - spec.center_y) + spec.r_offset;
        std::vector<Interval> iv;
        if (spec.j == 0) {
            iv = sq_band_intervals(spec.center_x, v - 1.0, v + 1.0);
        } else {
            iv = sq_band_intervals(spec.center_x, v + j, v + j + 1.0);
            auto lower = sq_band_intervals(spec.center_x, v - j - 1.0, v - j);
            iv.insert(iv.end(), lower.begin(), lower.end());
        }
        rep.exact += intervals_measure(iv, clip);
        if (with_mc) {
            McStratum st;
            st.boxes = pad_boxes(iv, clip);
            const double cx = spec.center_x, cy = spec.center_y, r = spec.r_offset;
            const long long jj = spec.j;
            st.indicator = [cx, cy, r, jj, k](double xi) {
                const double phi = (xi - cx) * (xi - cx) - (static_cast<double>(k) - cy) * (static_cast<double>(k) - cy) - r;
                const double a = std::abs(phi);
                return a >= static_cast<double>(jj) && a < static_cast<double>(jj) + 1.0;
            };
            strata.push_back(std::move(st));
        }
    }
    if (with_mc) rep.attach_mc(stratified_mc(strata, seed, rep.exact));
    return rep;
}

// ---------------------------------------------------------------------------
// Co-area delta mass: integral of delta(zeta^2 + eta^2 - A) over R^2 is pi
// for A >= 0 and 0 otherwise. The thickened form mes{A <= r^2 <= A+eps}/eps
// (one-sided) reproduces it identically for A >= 0.
// ---------------------------------------------------------------------------
inline double coarea_delta_mass(double a_level) { return a_level >= 0.0 ? PI : 0.0; }

inline double coarea_thickened(double a_level, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("coarea_thickened: eps > 0 required");
    if (a_level >= 0.0) return PI;                      // annulus area pi*eps over eps, exactly
    if (a_level + eps <= 0.0) return 0.0;
    return PI * (a_level + eps) / eps;                  // the disk below level a+eps only
}

}  // namespace hnls
