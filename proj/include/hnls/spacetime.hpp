#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <set>

#include "hnls/ensembles.hpp"
#include "hnls/norms.hpp"
#include "hnls/propagator.hpp"

namespace hnls {

// -----------------------------------------------------------------------
// Adaptive composite trapezoid in time with mandatory doubling check.
// Meshes are nested across levels (cached evaluations are reused) and can be
// geometrically graded toward an endpoint to resolve focusing spikes.
// -----------------------------------------------------------------------

struct QuadOpts {
    int base_samples = 96;      // starting mesh density for the interval
    int max_samples = 8192;     // doubling cap
    double rel_tol = 1e-3;      // the < 0.1% doubling contract
    int oversample = 1;         // physical-grid oversampling for norms
    int grade_points = 24;      // graded points per endpoint at base level
};

enum class GradeMode { None, Left, Right };

struct MultiQuadOutcome {
    std::vector<double> values;
    bool converged = false;
    double delta_rel = 0.0;
    long long n_evals = 0;
    int samples_used = 0;
};

// eval(t) returns one entry per component; components flagged in sup_mask are
// reduced by max over the mesh instead of the trapezoid.
inline MultiQuadOutcome adaptive_multi_quadrature(const std::function<std::vector<double>(double)>& eval, double a,
                                                  double b, GradeMode grade, const std::vector<bool>& sup_mask,
                                                  const QuadOpts& opts) {
    MultiQuadOutcome out;
    if (!(b > a)) {
        out.values.assign(sup_mask.size(), 0.0);
        out.converged = true;
        return out;
    }
    std::map<double, std::vector<double>> cache;
    auto value_at = [&](double t) -> const std::vector<double>& {
        auto it = cache.find(t);
        if (it != cache.end()) return it->second;
        ++out.n_evals;
        return cache.emplace(t, eval(t)).first->second;
    };

    const double span = b - a;
    std::vector<double> prev;
    int uniform_n = std::max(8, opts.base_samples);
    int graded_n = opts.grade_points;
    for (int level = 0;; ++level) {
        std::set<double> mesh;
        for (int i = 0; i <= uniform_n; ++i) mesh.insert(a + span * i / uniform_n);
        if (grade != GradeMode::None) {
            for (int i = 1; i < graded_n; ++i) {
                const double frac = std::pow(2.0, -40.0 * i / graded_n);
                mesh.insert(grade == GradeMode::Left ? a + span * frac : b - span * frac);
            }
        }
        std::vector<double> ts(mesh.begin(), mesh.end());
        std::vector<double> vals(sup_mask.size(), 0.0);
        // trapezoid / sup over the mesh
        const std::vector<double>* left = &value_at(ts[0]);
        for (std::size_t c = 0; c < sup_mask.size(); ++c)
            if (sup_mask[c]) vals[c] = (*left)[c];
        for (std::size_t i = 1; i < ts.size(); ++i) {
            const std::vector<double>& right = value_at(ts[i]);
            const double h = ts[i] - ts[i - 1];
            for (std::size_t c = 0; c < sup_mask.size(); ++c) {
                if (sup_mask[c])
                    vals[c] = std::max(vals[c], right[c]);
                else
                    vals[c] += 0.5 * h * ((*left)[c] + right[c]);
            }
            left = &right;
        }
        out.samples_used = static_cast<int>(ts.size());
        if (!prev.empty()) {
            double d = 0.0;
            for (std::size_t c = 0; c < vals.size(); ++c) {
                const double scale = std::max(std::abs(vals[c]), 1e-300);
                d = std::max(d, std::abs(vals[c] - prev[c]) / scale);
            }
            out.delta_rel = d;
            if (d <= opts.rel_tol) {
                out.values = vals;
                out.converged = true;
                return out;
            }
        }
        prev = vals;
        if (uniform_n >= opts.max_samples) {
            out.values = vals;
            out.converged = false;  // flagged: cap reached before the doubling check passed
            return out;
        }
        uniform_n *= 2;
        graded_n *= 2;
    }
}

// -----------------------------------------------------------------------
// Instantaneous norm evaluators: given a field and a flow, produce
// t -> { ||u(t)||_p^p  (finite p),  sup |u(t)|  (p = inf) }.
// -----------------------------------------------------------------------

namespace detail_st {

struct Mode {
    int index;
    complexd coeff;
    double rate;  // phase rate: multiplier is e^{2 pi i t rate}
};

inline double power_accum(double m2, double p) {
    if (p == 4.0) return m2 * m2;
    if (p == 6.0) return m2 * m2 * m2;
    if (p == 8.0) return (m2 * m2) * (m2 * m2);
    if (p == 2.0) return m2;
    return std::pow(m2, 0.5 * p);
}

inline cvec pad_natural_1d(const cvec& a, int factor) {
    const int n = static_cast<int>(a.size());
    if (factor <= 1) return a;
    cvec out(static_cast<std::size_t>(n) * factor, complexd(0.0));
    for (int i = 0; i < n; ++i) {
        const int m = i < n / 2 ? i : i - n;
        const int j = m >= 0 ? m : m + n * factor;
        out[j] = a[i];
    }
    return out;
}

}  // namespace detail_st

// Full 2-D synthesis per time sample. The padded spectrum and per-mode phase
// rates are prepared once; each evaluation is one multiplier pass + one FFT.
class NormEvaluator2D {
public:
    NormEvaluator2D(const SpectralField& F, SymbolKind kind, int oversample) {
        SpectralField Fp = pad_spectrum(F, oversample, oversample);
        domain_ = Fp.domain;
        scratch_.assign(domain_.size(), complexd(0.0));
        const double scale = 1.0 / domain_.x_period;
        const int ny = domain_.n_y;
        for (int ix = 0; ix < domain_.n_x; ++ix) {
            const double xi = domain_.xi(ix);
            const double sgn = (ix % 2 == 0) ? 1.0 : -1.0;
            for (int iy = 0; iy < ny; ++iy) {
                const std::size_t idx = static_cast<std::size_t>(ix) * ny + iy;
                if (Fp.coeffs[idx] == complexd(0.0)) continue;
                modes_.push_back({static_cast<int>(idx), Fp.coeffs[idx] * sgn * scale,
                                  symbol_phase(kind, xi, domain_.freq_k(iy))});
            }
        }
        cell_ = domain_.dx() * domain_.dy();
    }

    std::vector<double> operator()(double t, const std::vector<double>& ps) {
        std::fill(scratch_.begin(), scratch_.end(), complexd(0.0));
        for (const auto& m : modes_) scratch_[m.index] = m.coeff * std::polar(1.0, TWO_PI * t * m.rate);
        Fft::dft_2d(scratch_, domain_.n_x, domain_.n_y, +1);
        std::vector<double> out(ps.size(), 0.0);
        for (const auto& v : scratch_) {
            const double m2 = std::norm(v);
            for (std::size_t c = 0; c < ps.size(); ++c) {
                if (std::isinf(ps[c]))
                    out[c] = std::max(out[c], m2);
                else
                    out[c] += detail_st::power_accum(m2, ps[c]);
            }
        }
        for (std::size_t c = 0; c < ps.size(); ++c)
            out[c] = std::isinf(ps[c]) ? std::sqrt(out[c]) : out[c] * cell_;
        return out;
    }

private:
    DomainSpec domain_;
    std::vector<detail_st::Mode> modes_;
    cvec scratch_;
    double cell_ = 0.0;
};

// Rank-1 members under a factorizing flow: two 1-D syntheses per sample.
// Factorization holds for the hyperbolic flow on any product data and for
// the mixed flow on single-row data (where it is an x-translation).
class NormEvaluator1D {
public:
    NormEvaluator1D(const EnsembleMember& m, const DomainSpec& d, SymbolKind kind, int oversample)
        : nx_(d.n_x * oversample), ny_(d.n_y * oversample), wx_(d.x_period / nx_), wy_(1.0 / ny_) {
        bufx_.assign(nx_, complexd(0.0));
        bufy_.assign(ny_, complexd(0.0));
        const cvec ax = detail_st::pad_natural_1d(m.ax, oversample);
        const cvec by = detail_st::pad_natural_1d(m.by, oversample);
        const double scale = 1.0 / d.x_period;
        for (int i = 0; i < nx_; ++i) {
            if (ax[i] == complexd(0.0)) continue;
            const int mm = i < nx_ / 2 ? i : i - nx_;
            const double xi = mm / d.x_period;
            const double sgn = (i % 2 == 0) ? 1.0 : -1.0;
            const double rate = (kind == SymbolKind::Hyperbolic) ? -xi * xi : xi * static_cast<double>(m.row_k);
            xmodes_.push_back({i, ax[i] * sgn * scale, rate});
        }
        for (int j = 0; j < ny_; ++j) {
            if (by[j] == complexd(0.0)) continue;
            const int k = j < ny_ / 2 ? j : j - ny_;
            const double rate = (kind == SymbolKind::Hyperbolic) ? static_cast<double>(k) * k : 0.0;
            ymodes_.push_back({j, by[j], rate});
        }
    }

    std::vector<double> operator()(double t, const std::vector<double>& ps) {
        std::fill(bufx_.begin(), bufx_.end(), complexd(0.0));
        for (const auto& m : xmodes_) bufx_[m.index] = m.coeff * std::polar(1.0, TWO_PI * t * m.rate);
        Fft::dft_1d(bufx_, +1);
        std::fill(bufy_.begin(), bufy_.end(), complexd(0.0));
        for (const auto& m : ymodes_) bufy_[m.index] = m.coeff * std::polar(1.0, TWO_PI * t * m.rate);
        Fft::dft_1d(bufy_, +1);
        std::vector<double> out(ps.size(), 0.0);
        for (std::size_t c = 0; c < ps.size(); ++c) {
            const double p = ps[c];
            if (std::isinf(p)) {
                double sx = 0.0, sy = 0.0;
                for (const auto& v : bufx_) sx = std::max(sx, std::norm(v));
                for (const auto& v : bufy_) sy = std::max(sy, std::norm(v));
                out[c] = std::sqrt(sx) * std::sqrt(sy);
            } else {
                double px = 0.0, py = 0.0;
                for (const auto& v : bufx_) px += detail_st::power_accum(std::norm(v), p);
                for (const auto& v : bufy_) py += detail_st::power_accum(std::norm(v), p);
                out[c] = (px * wx_) * (py * wy_);
            }
        }
        return out;
    }

private:
    int nx_, ny_;
    double wx_, wy_;
    std::vector<detail_st::Mode> xmodes_, ymodes_;
    cvec bufx_, bufy_;
};

// dispatch: 1-D product path when the member structure and the flow allow it
inline std::function<std::vector<double>(double, const std::vector<double>&)> make_norm_evaluator(
    const EnsembleMember& m, SymbolKind kind, int oversample) {
    const bool product_ok = m.separable && (kind == SymbolKind::Hyperbolic || m.row_k != INT_MIN);
    if (product_ok) {
        auto ev = std::make_shared<NormEvaluator1D>(m, m.field.domain, kind, oversample);
        return [ev](double t, const std::vector<double>& ps) { return (*ev)(t, ps); };
    }
    auto ev = std::make_shared<NormEvaluator2D>(m.field, kind, oversample);
    return [ev](double t, const std::vector<double>& ps) { return (*ev)(t, ps); };
}

// -----------------------------------------------------------------------
// Space-time L^p norm of e^{it .} F over [t0, t1]: composite trapezoid of
// ||u(t)||_p^p on the adaptive mesh, then the p-th root. p = inf takes the
// sup over samples. The doubling check is always enforced; a capped,
// non-converged refinement is reported through `converged`.
// -----------------------------------------------------------------------

struct SpacetimeNormResult {
    double value = 0.0;
    bool converged = true;
    double delta_rel = 0.0;
    int samples_used = 0;
};

inline SpacetimeNormResult spacetime_lp_norm(const SpectralField& F, double p, double t0, double t1, SymbolKind kind,
                                             int t_samples = 0, QuadOpts opts = {}) {
    if (t_samples > 0) opts.base_samples = t_samples;
    EnsembleMember m;
    m.field = F;
    auto eval = make_norm_evaluator(m, kind, std::max(1, opts.oversample));
    std::vector<double> ps{p};
    GradeMode grade = GradeMode::None;
    if (t0 == 0.0) grade = GradeMode::Left;
    else if (t1 == 0.0) grade = GradeMode::Right;
    auto q = adaptive_multi_quadrature([&](double t) { return eval(t, ps); }, t0, t1, grade,
                                       std::vector<bool>{std::isinf(p)}, opts);
    SpacetimeNormResult r;
    r.converged = q.converged;
    r.delta_rel = q.delta_rel;
    r.samples_used = q.samples_used;
    r.value = std::isinf(p) ? q.values[0] : std::pow(q.values[0], 1.0 / p);
    return r;
}

// default time-sampling floor: 32 N^2 |interval| capped at 2^20 (the cap and
// the sweep-profile overrides are recorded in run manifests)
inline int default_time_samples(const DyadicScale& N, double interval, int cap = 1 << 20) {
    const double f = 32.0 * N.as_double() * N.as_double() * std::abs(interval);
    return static_cast<int>(std::min<double>(cap, std::max(16.0, f)));
}

}  // namespace hnls
