#pragma once

#include <cmath>

namespace hnls {

// The fixed even cutoff used by every frequency projector:
//
//   phi(x) = 1                                 for |x| <= 1
//   phi(x) = exp(1 - 1/(1 - (|x|-1)^2))        for 1 < |x| < 2
//   phi(x) = 0                                 for |x| >= 2
//
// The bridge is smooth on (1,2), flat to all orders at |x| = 2, and monotone
// decreasing on [1,2]. Constants fitted elsewhere in the artifact depend on
// this particular choice of bridge.
inline double bump_phi(double x) {
    const double a = std::abs(x);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    const double s = a - 1.0;          // s in (0,1)
    const double d = 1.0 - s * s;      // in (0,1)
    return std::exp(1.0 - 1.0 / d);
}

// integral of phi over the real line, evaluated once by composite Simpson on
// the bridge (the integrand is smooth there); used by kernel tests.
inline double bump_phi_integral() {
    static const double cached = [] {
        const int n = 1 << 14;  // Simpson on [1,2]
        const double h = 1.0 / n;
        double s = bump_phi(1.0) + bump_phi(2.0);
        for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * bump_phi(1.0 + i * h);
        const double bridge = s * h / 3.0;
        return 2.0 * (1.0 + bridge);
    }();
    return cached;
}

}  // namespace hnls
