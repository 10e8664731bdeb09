#pragma once

#include <functional>

#include "hnls/bump.hpp"
#include "hnls/field.hpp"

namespace hnls {

namespace detail {
inline void require_band(const DomainSpec& d, const DyadicScale& N, const char* who) {
    if (2.0 * N.n > d.x_band())
        throw std::invalid_argument(std::string(who) + ": band 2N = " + std::to_string(2 * N.n) +
                                    " exceeds resolvable x-band n_x/(2L) = " + std::to_string(d.x_band()) +
                                    "; need n_x >= " +
                                    std::to_string(static_cast<long long>(std::ceil(4.0 * N.n * d.x_period))));
    if (2.0 * N.n > d.y_band())
        throw std::invalid_argument(std::string(who) + ": band 2N = " + std::to_string(2 * N.n) +
                                    " exceeds resolvable y-band n_y/2 = " + std::to_string(d.y_band()) +
                                    "; need n_y >= " + std::to_string(4 * N.n));
}
}  // namespace detail

// P_{<=N}: multiply by phi(xi/N) phi(k/N).
inline SpectralField project_leq(const SpectralField& F, const DyadicScale& N) {
    detail::require_band(F.domain, N, "project_leq");
    SpectralField G = F;
    const double Nd = N.as_double();
    const int ny = F.domain.n_y;
    for (int ix = 0; ix < F.domain.n_x; ++ix) {
        const double px = bump_phi(F.domain.xi(ix) / Nd);
        if (px == 0.0) {
            for (int iy = 0; iy < ny; ++iy) G.coeffs[static_cast<std::size_t>(ix) * ny + iy] = complexd(0.0);
            continue;
        }
        for (int iy = 0; iy < ny; ++iy)
            G.coeffs[static_cast<std::size_t>(ix) * ny + iy] *= px * bump_phi(F.domain.freq_k(iy) / Nd);
    }
    return G;
}

// P_N = P_{<=N} - P_{<=N/2} for N >= 2; P_1 = P_{<=1}.
inline SpectralField project_dyadic(const SpectralField& F, const DyadicScale& N) {
    if (N.n == 1) return project_leq(F, N);
    detail::require_band(F.domain, N, "project_dyadic");
    SpectralField G = F;
    const double Nd = N.as_double();
    const int ny = F.domain.n_y;
    for (int ix = 0; ix < F.domain.n_x; ++ix) {
        const double xi = F.domain.xi(ix);
        const double pxN = bump_phi(xi / Nd);
        const double pxH = bump_phi(2.0 * xi / Nd);
        for (int iy = 0; iy < ny; ++iy) {
            const double k = F.domain.freq_k(iy);
            const double w = pxN * bump_phi(k / Nd) - pxH * bump_phi(2.0 * k / Nd);
            G.coeffs[static_cast<std::size_t>(ix) * ny + iy] *= w;
        }
    }
    return G;
}

// Sharp projection with symbol 1_S evaluated on lattice points (xi, k).
inline SpectralField project_set(const SpectralField& F, const std::function<bool(double, int)>& member) {
    SpectralField G = F;
    const int ny = F.domain.n_y;
    for (int ix = 0; ix < F.domain.n_x; ++ix) {
        const double xi = F.domain.xi(ix);
        for (int iy = 0; iy < ny; ++iy)
            if (!member(xi, F.domain.freq_k(iy))) G.coeffs[static_cast<std::size_t>(ix) * ny + iy] = complexd(0.0);
    }
    return G;
}

// Projection onto the unit cube C_z = z + [0,1)^2.
inline SpectralField project_cube(const SpectralField& F, int zx, int zy) {
    return project_set(F, [zx, zy](double xi, int k) {
        return xi >= zx && xi < zx + 1 && k >= zy && k < zy + 1;
    });
}

}  // namespace hnls
