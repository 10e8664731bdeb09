#pragma once

#include <cmath>
#include <vector>

#include "hnls/field.hpp"

namespace hnls {

// Linear flows as Fourier multipliers. Phase signs are read off the kernel
// factorization: the hyperbolic flow carries e^{-2pi i t xi^2} in x and
// e^{+2pi i t k^2} in y; the mixed-derivative flow carries e^{+2pi i t xi k}.
enum class SymbolKind { Hyperbolic, MixedDerivative };

inline double symbol_phase(SymbolKind kind, double xi, double k) {
    return kind == SymbolKind::Hyperbolic ? (k * k - xi * xi) : (xi * k);
}

inline SpectralField evolve(const SpectralField& F, double t, SymbolKind kind) {
    SpectralField G = F;
    if (t == 0.0) return G;
    const int ny = F.domain.n_y;
    for (int ix = 0; ix < F.domain.n_x; ++ix) {
        const double xi = F.domain.xi(ix);
        if (kind == SymbolKind::Hyperbolic) {
            const complexd mx = std::polar(1.0, -TWO_PI * t * xi * xi);
            for (int iy = 0; iy < ny; ++iy) {
                const double k = F.domain.freq_k(iy);
                G.coeffs[static_cast<std::size_t>(ix) * ny + iy] *= mx * std::polar(1.0, TWO_PI * t * k * k);
            }
        } else {
            for (int iy = 0; iy < ny; ++iy) {
                const double k = F.domain.freq_k(iy);
                G.coeffs[static_cast<std::size_t>(ix) * ny + iy] *= std::polar(1.0, TWO_PI * t * xi * k);
            }
        }
    }
    return G;
}

struct DuhamelResult {
    SpectralField value;
    double richardson_delta = 0.0;  // |coarse - fine| / max(|fine|, tiny), trapezoid order check
};

// I[F](t) = int_0^t e^{i(t-tau) Box} F(tau) dtau by composite trapezoid on the
// uniform samples; the coarse/fine difference (stride-2 subsample) is reported.
inline DuhamelResult duhamel(const std::vector<SpectralField>& source, double t, SymbolKind kind) {
    if (source.empty()) throw std::invalid_argument("duhamel: empty source");
    const std::size_t M = source.size() - 1;
    if (M == 0) {
        DuhamelResult r{source.front(), 0.0};
        for (auto& c : r.value.coeffs) c = complexd(0.0);
        return r;
    }
    const double dtau = t / static_cast<double>(M);
    SpectralField fine(source.front().domain);
    SpectralField coarse(source.front().domain);
    const bool have_coarse = (M % 2 == 0) && M >= 2;
    for (std::size_t j = 0; j <= M; ++j) {
        const double tau = dtau * static_cast<double>(j);
        SpectralField prop = evolve(source[j], t - tau, kind);
        const double wf = (j == 0 || j == M) ? 0.5 * dtau : dtau;
        for (std::size_t i = 0; i < prop.coeffs.size(); ++i) fine.coeffs[i] += wf * prop.coeffs[i];
        if (have_coarse && j % 2 == 0) {
            const double wc = (j == 0 || j == M) ? dtau : 2.0 * dtau;
            for (std::size_t i = 0; i < prop.coeffs.size(); ++i) coarse.coeffs[i] += wc * prop.coeffs[i];
        }
    }
    double diff = 0.0, mag = 0.0;
    if (have_coarse) {
        for (std::size_t i = 0; i < fine.coeffs.size(); ++i) {
            diff += std::norm(fine.coeffs[i] - coarse.coeffs[i]);
            mag += std::norm(fine.coeffs[i]);
        }
        diff = std::sqrt(diff);
        mag = std::sqrt(mag);
    }
    return DuhamelResult{std::move(fine), mag > 0 ? diff / mag : diff};
}

// Cumulative trapezoid Duhamel on a uniform grid tau_j = j*dtau:
//   D_{j+1} = e^{i dtau Box}(D_j + dtau/2 F_j) + dtau/2 F_{j+1},
// returning I[F](tau_j) for every j in O(M) multiplier applications.
inline std::vector<SpectralField> duhamel_cumulative(const std::vector<SpectralField>& source, double dtau,
                                                     SymbolKind kind) {
    std::vector<SpectralField> out;
    out.reserve(source.size());
    SpectralField D(source.front().domain);
    out.push_back(D);
    for (std::size_t j = 0; j + 1 < source.size(); ++j) {
        SpectralField step = D;
        for (std::size_t i = 0; i < step.coeffs.size(); ++i)
            step.coeffs[i] += 0.5 * dtau * source[j].coeffs[i];
        step = evolve(step, dtau, kind);
        for (std::size_t i = 0; i < step.coeffs.size(); ++i)
            step.coeffs[i] += 0.5 * dtau * source[j + 1].coeffs[i];
        D = step;
        out.push_back(D);
    }
    return out;
}

}  // namespace hnls
