#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "hnls/common.hpp"

namespace hnls {

// Dyadic band parameter N in {1, 2, 4, ...}.
struct DyadicScale {
    int n = 1;
    DyadicScale() = default;
    explicit DyadicScale(int value) : n(value) {
        if (n < 1 || !is_pow2(static_cast<std::size_t>(n)))
            throw std::invalid_argument("DyadicScale: n must be a power of two >= 1, got " + std::to_string(value));
    }
    double as_double() const { return static_cast<double>(n); }
};

struct SobolevIndex {
    double s = 0.0;
    SobolevIndex() = default;
    explicit SobolevIndex(double value) : s(value) {
        if (!std::isfinite(s)) throw std::invalid_argument("SobolevIndex: s must be finite");
    }
    // critical index 1 - 1/k for nonlinearity degree 2k+1
    static SobolevIndex critical(int k) {
        if (k < 1) throw std::invalid_argument("SobolevIndex::critical: k >= 1 required");
        return SobolevIndex(1.0 - 1.0 / static_cast<double>(k));
    }
};

// Discretization contract for the truncated R x T domain.
//   x lives on [-L/2, L/2) with n_x points, spectral spacing 1/L;
//   y lives on [0,1) with n_y points, integer frequencies.
// Resolvable bands must cover |xi|,|k| <= 2*n_max so that P_{<=N} multipliers
// (support up to 2N) never alias for N <= n_max.
struct DomainSpec {
    double x_period = 0.0;  // L
    int n_x = 0;
    int n_y = 0;
    int n_max = 1;

    DomainSpec() = default;
    DomainSpec(double L, int nx, int ny, int nmax) : x_period(L), n_x(nx), n_y(ny), n_max(nmax) {
        if (!(L > 0.0)) throw std::invalid_argument("DomainSpec: x_period must be positive");
        if (nx <= 0 || ny <= 0 || nx % 2 || ny % 2)
            throw std::invalid_argument("DomainSpec: n_x, n_y must be even positive");
        if (!is_pow2(static_cast<std::size_t>(nx)) || !is_pow2(static_cast<std::size_t>(ny)))
            throw std::invalid_argument("DomainSpec: n_x, n_y must be powers of two");
        if (!is_pow2(static_cast<std::size_t>(nmax)) || nmax < 1)
            throw std::invalid_argument("DomainSpec: n_max must be a dyadic integer >= 1");
        if (x_band() < 2.0 * n_max)
            throw std::invalid_argument("DomainSpec: resolvable x-band n_x/(2L) = " + std::to_string(x_band()) +
                                        " is below 2*n_max = " + std::to_string(2 * n_max) +
                                        "; need n_x >= " + std::to_string(static_cast<long long>(std::ceil(4.0 * n_max * L))));
        if (y_band() < 2.0 * n_max)
            throw std::invalid_argument("DomainSpec: resolvable y-band n_y/2 = " + std::to_string(y_band()) +
                                        " is below 2*n_max = " + std::to_string(2 * n_max) +
                                        "; need n_y >= " + std::to_string(4 * n_max));
    }

    double x_band() const { return n_x / (2.0 * x_period); }
    double y_band() const { return n_y / 2.0; }
    double dxi() const { return 1.0 / x_period; }
    double dx() const { return x_period / n_x; }
    double dy() const { return 1.0 / n_y; }
    std::size_t size() const { return static_cast<std::size_t>(n_x) * static_cast<std::size_t>(n_y); }

    // signed frequency index from storage index (FFT natural order)
    int freq_m(int ix) const { return ix < n_x / 2 ? ix : ix - n_x; }
    int freq_k(int iy) const { return iy < n_y / 2 ? iy : iy - n_y; }
    double xi(int ix) const { return freq_m(ix) / x_period; }
    double x_of(int ix) const { return -0.5 * x_period + ix * dx(); }
    double y_of(int iy) const { return iy * dy(); }

    bool operator==(const DomainSpec& o) const {
        return x_period == o.x_period && n_x == o.n_x && n_y == o.n_y && n_max == o.n_max;
    }

    // smallest grid resolving band n_max on a period-L box
    static DomainSpec for_band(int nmax, double L) {
        const int nx = static_cast<int>(next_pow2(static_cast<std::size_t>(std::ceil(4.0 * nmax * L))));
        const int ny = static_cast<int>(next_pow2(static_cast<std::size_t>(4 * nmax)));
        return DomainSpec(L, std::max(nx, 2), std::max(ny, 2), nmax);
    }
};

}  // namespace hnls
