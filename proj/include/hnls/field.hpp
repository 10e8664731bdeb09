#pragma once

#include <cmath>

#include "hnls/domain.hpp"
#include "hnls/fft.hpp"

namespace hnls {

// Complex values on the (x,y) grid, x in [-L/2, L/2), y in [0,1).
// Storage is row-major with x outer: values[ix*n_y + iy].
struct PhysicalField {
    DomainSpec domain;
    cvec values;

    PhysicalField() = default;
    explicit PhysicalField(const DomainSpec& d) : domain(d), values(d.size(), complexd(0.0, 0.0)) {}

    complexd& at(int ix, int iy) { return values[static_cast<std::size_t>(ix) * domain.n_y + iy]; }
    const complexd& at(int ix, int iy) const { return values[static_cast<std::size_t>(ix) * domain.n_y + iy]; }
};

// Band-limited coefficients on the (xi, k) lattice, xi = m/L. Storage is in
// FFT natural order: index ix maps to m = ix (ix < n_x/2) or ix - n_x.
// Density convention: f(x,y) = sum_{m,k} coeff(m,k) e^{2pi i (xi x + k y)} / L.
struct SpectralField {
    DomainSpec domain;
    cvec coeffs;

    SpectralField() = default;
    explicit SpectralField(const DomainSpec& d) : domain(d), coeffs(d.size(), complexd(0.0, 0.0)) {}

    complexd& at_index(int ix, int iy) { return coeffs[static_cast<std::size_t>(ix) * domain.n_y + iy]; }
    const complexd& at_index(int ix, int iy) const { return coeffs[static_cast<std::size_t>(ix) * domain.n_y + iy]; }

    // access by signed frequency (m, k)
    complexd& at_freq(int m, int k) {
        const int ix = m >= 0 ? m : m + domain.n_x;
        const int iy = k >= 0 ? k : k + domain.n_y;
        return coeffs[static_cast<std::size_t>(ix) * domain.n_y + iy];
    }

    double l2_norm() const {
        double s = 0.0;
        for (const auto& c : coeffs) s += std::norm(c);
        return std::sqrt(s / domain.x_period);
    }

    SpectralField& operator*=(double a) {
        for (auto& c : coeffs) c *= a;
        return *this;
    }
};

// Discrete realization of the 2pi-convention transform pair
//   Fhat(xi,k) = int e^{-2pi i (xi x + k y)} f dx dy   (trapezoid in x, exact series in y)
//   f(x,y)     = sum_k int e^{+2pi i (xi x + k y)} Fhat dxi
// The x-grid starts at -L/2, which shows up as the (-1)^m phase below.
inline SpectralField forward_transform(const PhysicalField& f) {
    SpectralField F(f.domain);
    F.coeffs = f.values;
    Fft::dft_2d(F.coeffs, f.domain.n_x, f.domain.n_y, -1);
    const double w = f.domain.dx() * f.domain.dy();
    const int ny = f.domain.n_y;
    for (int ix = 0; ix < f.domain.n_x; ++ix) {
        const double ph = (ix % 2 == 0) ? w : -w;
        for (int iy = 0; iy < ny; ++iy) F.coeffs[static_cast<std::size_t>(ix) * ny + iy] *= ph;
    }
    return F;
}

inline PhysicalField inverse_transform(const SpectralField& F) {
    PhysicalField f(F.domain);
    f.values = F.coeffs;
    const double w = 1.0 / F.domain.x_period;
    const int ny = F.domain.n_y;
    for (int ix = 0; ix < F.domain.n_x; ++ix) {
        const double ph = (ix % 2 == 0) ? w : -w;
        for (int iy = 0; iy < ny; ++iy) f.values[static_cast<std::size_t>(ix) * ny + iy] *= ph;
    }
    Fft::dft_2d(f.values, F.domain.n_x, F.domain.n_y, +1);
    return f;
}

// Embed the spectrum into a finer grid (same box, higher resolvable band).
// Coefficients keep their signed frequencies; new slots are zero.
inline SpectralField pad_spectrum(const SpectralField& F, int factor_x, int factor_y) {
    if (factor_x < 1 || factor_y < 1) throw std::invalid_argument("pad_spectrum: factors >= 1");
    if (factor_x == 1 && factor_y == 1) return F;
    const DomainSpec& d = F.domain;
    DomainSpec big(d.x_period, d.n_x * factor_x, d.n_y * factor_y, d.n_max);
    SpectralField G(big);
    for (int ix = 0; ix < d.n_x; ++ix) {
        const int m = d.freq_m(ix);
        const int jx = m >= 0 ? m : m + big.n_x;
        for (int iy = 0; iy < d.n_y; ++iy) {
            const int k = d.freq_k(iy);
            const int jy = k >= 0 ? k : k + big.n_y;
            G.coeffs[static_cast<std::size_t>(jx) * big.n_y + jy] =
                F.coeffs[static_cast<std::size_t>(ix) * d.n_y + iy];
        }
    }
    return G;
}

// Restrict the spectrum back to a coarser grid, discarding out-of-band modes.
inline SpectralField truncate_spectrum(const SpectralField& F, const DomainSpec& target) {
    if (target == F.domain) return F;
    if (target.x_period != F.domain.x_period)
        throw std::invalid_argument("truncate_spectrum: box length mismatch");
    SpectralField G(target);
    for (int ix = 0; ix < target.n_x; ++ix) {
        const int m = target.freq_m(ix);
        const int jx = m >= 0 ? m : m + F.domain.n_x;
        for (int iy = 0; iy < target.n_y; ++iy) {
            const int k = target.freq_k(iy);
            const int jy = k >= 0 ? k : k + F.domain.n_y;
            G.coeffs[static_cast<std::size_t>(ix) * target.n_y + iy] =
                F.coeffs[static_cast<std::size_t>(jx) * F.domain.n_y + jy];
        }
    }
    return G;
}

}  // namespace hnls
