#pragma once

#include <climits>
#include <string>
#include <vector>

#include "hnls/projectors.hpp"

namespace hnls {

// Adversarial data families for the Strichartz sweeps. Every member is
// band-limited to 2N (smooth cutoff) and L^2-normalized.
//   GaussianRandom  : iid complex Gaussians over the band (generic baseline)
//   SingleRow       : one k-mode, Gaussian envelope in xi
//   XFlat           : fhat = 1_{|xi|<=N} on the k = 0 row, u(t,x,y) = g(x) type
//   HyperbolaAligned: mass concentrated where xi^2 - k^2 is nearly constant
//   DeltaPacket     : fhat = phi(xi/N) phi(k/N), the P_{<=N} delta profile that
//                     saturates the L^infty and large-p rates
enum class EnsembleKind { GaussianRandom, SingleRow, XFlat, HyperbolaAligned, DeltaPacket };

inline const char* ensemble_kind_name(EnsembleKind k) {
    switch (k) {
        case EnsembleKind::GaussianRandom: return "gaussian_random";
        case EnsembleKind::SingleRow: return "single_row";
        case EnsembleKind::XFlat: return "x_flat";
        case EnsembleKind::HyperbolaAligned: return "hyperbola_aligned";
        case EnsembleKind::DeltaPacket: return "delta_packet";
    }
    return "?";
}

inline EnsembleKind ensemble_kind_from_name(const std::string& s) {
    if (s == "gaussian_random") return EnsembleKind::GaussianRandom;
    if (s == "single_row") return EnsembleKind::SingleRow;
    if (s == "x_flat") return EnsembleKind::XFlat;
    if (s == "hyperbola_aligned") return EnsembleKind::HyperbolaAligned;
    if (s == "delta_packet") return EnsembleKind::DeltaPacket;
    throw std::invalid_argument("unknown ensemble kind: " + s);
}

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::GaussianRandom;
    int count = 64;
    std::uint64_t seed = 1;
};

// Rank-1 members carry their factors so norm sweeps can run on 1-D grids.
struct EnsembleMember {
    SpectralField field;
    bool separable = false;
    cvec ax;               // x-axis coefficients, natural FFT order (length n_x)
    cvec by;               // y-axis coefficients (length n_y)
    int row_k = INT_MIN;   // the single k when the member lives on one row
};

namespace detail_ens {

inline void assemble_rank1(EnsembleMember& m, const DomainSpec& d) {
    m.field = SpectralField(d);
    for (int ix = 0; ix < d.n_x; ++ix) {
        if (m.ax[ix] == complexd(0.0)) continue;
        for (int iy = 0; iy < d.n_y; ++iy)
            m.field.coeffs[static_cast<std::size_t>(ix) * d.n_y + iy] = m.ax[ix] * m.by[iy];
    }
}

inline void normalize(EnsembleMember& m) {
    const double n = m.field.l2_norm();
    if (n == 0.0) return;
    m.field *= 1.0 / n;
    if (m.separable)
        for (auto& a : m.ax) a *= 1.0 / n;
}

}  // namespace detail_ens

inline EnsembleMember make_member(EnsembleKind kind, const DyadicScale& N, const DomainSpec& d, std::uint64_t seed) {
    EnsembleMember m;
    const double Nd = N.as_double();
    Rng rng(seed);
    switch (kind) {
        case EnsembleKind::GaussianRandom: {
            m.field = SpectralField(d);
            for (int ix = 0; ix < d.n_x; ++ix) {
                const double px = bump_phi(d.xi(ix) / Nd);
                if (px == 0.0) continue;
                for (int iy = 0; iy < d.n_y; ++iy) {
                    const double pk = bump_phi(d.freq_k(iy) / Nd);
                    if (pk == 0.0) continue;
                    m.field.coeffs[static_cast<std::size_t>(ix) * d.n_y + iy] = px * pk * rng.gaussian_complex();
                }
            }
            break;
        }
        case EnsembleKind::SingleRow: {
            m.separable = true;
            m.row_k = static_cast<int>(rng.uniform_int(-N.n, N.n));
            const double sigma = Nd * rng.uniform(0.125, 0.5);
            const double xi0 = Nd * rng.uniform(-0.5, 0.5);
            const double phase = rng.uniform(0.0, TWO_PI);
            m.ax.assign(d.n_x, complexd(0.0));
            m.by.assign(d.n_y, complexd(0.0));
            for (int ix = 0; ix < d.n_x; ++ix) {
                const double xi = d.xi(ix);
                const double env = bump_phi(xi / Nd) * std::exp(-(xi - xi0) * (xi - xi0) / (2.0 * sigma * sigma));
                if (env > 0.0) m.ax[ix] = env * std::polar(1.0, phase);
            }
            m.by[m.row_k >= 0 ? m.row_k : m.row_k + d.n_y] = complexd(1.0);
            detail_ens::assemble_rank1(m, d);
            break;
        }
        case EnsembleKind::XFlat: {
            m.separable = true;
            m.row_k = 0;
            m.ax.assign(d.n_x, complexd(0.0));
            m.by.assign(d.n_y, complexd(0.0));
            for (int ix = 0; ix < d.n_x; ++ix)
                if (std::abs(d.xi(ix)) <= Nd) m.ax[ix] = complexd(1.0);
            m.by[0] = complexd(1.0);
            detail_ens::assemble_rank1(m, d);
            break;
        }
        case EnsembleKind::HyperbolaAligned: {
            m.field = SpectralField(d);
            const double level = rng.uniform(-Nd * Nd, Nd * Nd);
            const double width = 1.0;
            for (int ix = 0; ix < d.n_x; ++ix) {
                const double xi = d.xi(ix);
                const double px = bump_phi(xi / Nd);
                if (px == 0.0) continue;
                for (int iy = 0; iy < d.n_y; ++iy) {
                    const double k = d.freq_k(iy);
                    const double pk = bump_phi(k / Nd);
                    if (pk == 0.0) continue;
                    const double phi = xi * xi - k * k - level;
                    const double env = std::exp(-phi * phi / (2.0 * width * width));
                    if (env < 1e-14) continue;
                    m.field.coeffs[static_cast<std::size_t>(ix) * d.n_y + iy] =
                        px * pk * env * std::polar(1.0, rng.uniform(0.0, TWO_PI));
                }
            }
            break;
        }
        case EnsembleKind::DeltaPacket: {
            m.separable = true;
            m.ax.assign(d.n_x, complexd(0.0));
            m.by.assign(d.n_y, complexd(0.0));
            for (int ix = 0; ix < d.n_x; ++ix) m.ax[ix] = complexd(bump_phi(d.xi(ix) / Nd));
            for (int iy = 0; iy < d.n_y; ++iy) m.by[iy] = complexd(bump_phi(d.freq_k(iy) / Nd));
            detail_ens::assemble_rank1(m, d);
            break;
        }
    }
    detail_ens::normalize(m);
    return m;
}

inline std::vector<EnsembleMember> make_ensemble(const EnsembleSpec& spec, const DyadicScale& N, const DomainSpec& d) {
    // the deterministic families carry a single member regardless of count
    const int count = (spec.kind == EnsembleKind::XFlat || spec.kind == EnsembleKind::DeltaPacket) ? 1 : spec.count;
    std::vector<EnsembleMember> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(make_member(spec.kind, N, d, derive_seed(spec.seed, i)));
    return out;
}

}  // namespace hnls
