#pragma once

#include <algorithm>
#include <cmath>

#include "hnls/field.hpp"

namespace hnls {

// H^s lattice norm: (sum_k int (1+xi^2+k^2)^s |Fhat|^2 dxi)^{1/2}, dxi = 1/L.
inline double sobolev_norm(const SpectralField& F, const SobolevIndex& s) {
    double acc = 0.0;
    const int ny = F.domain.n_y;
    for (int ix = 0; ix < F.domain.n_x; ++ix) {
        const double xi = F.domain.xi(ix);
        for (int iy = 0; iy < ny; ++iy) {
            const double k = F.domain.freq_k(iy);
            const double w = (s.s == 0.0) ? 1.0 : std::pow(1.0 + xi * xi + k * k, s.s);
            acc += w * std::norm(F.coeffs[static_cast<std::size_t>(ix) * ny + iy]);
        }
    }
    return std::sqrt(acc / F.domain.x_period);
}

// l^4_n L^2_xi norm of the coefficients: (sum_k (int |Fhat(.,k)|^2 dxi)^2)^{1/4}.
inline double mixed_l4n_l2xi_norm(const SpectralField& F) {
    const int ny = F.domain.n_y;
    double acc = 0.0;
    for (int iy = 0; iy < ny; ++iy) {
        double row = 0.0;
        for (int ix = 0; ix < F.domain.n_x; ++ix)
            row += std::norm(F.coeffs[static_cast<std::size_t>(ix) * ny + iy]);
        row /= F.domain.x_period;
        acc += row * row;
    }
    return std::pow(acc, 0.25);
}

// Grid L^p norm with cell weights (L/n_x)(1/n_y); p = inf is the grid max.
inline double spatial_lp_norm(const PhysicalField& f, double p) {
    if (p < 1.0 && !std::isinf(p)) throw std::invalid_argument("spatial_lp_norm: p >= 1 required");
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    const double w = f.domain.dx() * f.domain.dy();
    double acc = 0.0;
    if (p == 2.0) {
        for (const auto& v : f.values) acc += std::norm(v);
    } else {
        for (const auto& v : f.values) acc += std::pow(std::abs(v), p);
    }
    return std::pow(w * acc, 1.0 / p);
}

}  // namespace hnls
