#include <doctest.h>

#include "hnls/kernel.hpp"
#include "hnls/projectors.hpp"
#include "hnls/propagator.hpp"

using namespace hnls;

TEST_CASE("kernel_ni: t = 0 values and symmetry") {
    SUBCASE("K_NI(0,0) = N * integral of phi") {
        for (int n : {1, 4, 16}) {
            auto r = kernel_ni_detail(0.0, 0.0, DyadicScale(n));
            CHECK(r.converged);
            CHECK(std::abs(r.value.imag()) < 1e-10 * n);
            CHECK(r.value.real() == doctest::Approx(n * bump_phi_integral()).epsilon(1e-8));
        }
    }
    SUBCASE("even in x") {
        const complexd a = kernel_ni(0.3, 1.7, DyadicScale(8));
        const complexd b = kernel_ni(0.3, -1.7, DyadicScale(8));
        CHECK(std::abs(a - b) < 1e-8 * std::abs(a));
    }
    SUBCASE("reported error meets the 1e-8 tolerance on a time sweep") {
        for (double t : {1e-4, 1e-2, 0.3, 1.0}) {
            auto r = kernel_ni_detail(t, 0.7, DyadicScale(16));
            CHECK(r.converged);
            CHECK(r.rel_error <= 1e-8);
        }
    }
    SUBCASE("|K_NI| <= C t^{-1/2} with one modest constant") {
        double cmax = 0.0;
        for (double t : {0.001, 0.01, 0.1, 0.5, 1.0})
            for (double x : {0.0, 0.4, 2.0}) {
                const double mag = std::abs(kernel_ni(t, x, DyadicScale(8)));
                cmax = std::max(cmax, mag * std::sqrt(t));
            }
        CHECK(cmax < 3.0);
    }
}

TEST_CASE("kernel_ns: bounds and time periodicity") {
    for (int n : {2, 8}) {
        const complexd v = kernel_ns(0.0, 0.0, DyadicScale(n));
        CHECK(std::abs(v.imag()) < 1e-12 * std::abs(v));
        CHECK(v.real() >= 2 * n + 1);
        CHECK(v.real() <= 4 * n + 1);
    }
    const complexd a = kernel_ns(0.37, 0.21, DyadicScale(8));
    const complexd b = kernel_ns(1.37, 0.21, DyadicScale(8));
    CHECK(std::abs(a - b) < 1e-12 * std::abs(a));
}

TEST_CASE("kernel product equals the grid-realized propagator on the delta") {
    // e^{it Box} P_{<= N} delta_0 on a box large enough that periodized
    // images are negligible next to the 1e-6 gate
    for (const int n : {4, 8}) {
        const DyadicScale N(n);
        const double L = 48.0;
        DomainSpec d = DomainSpec::for_band(n, L);
        SpectralField delta(d);
        for (auto& c : delta.coeffs) c = complexd(1.0);
        SpectralField proj = project_leq(delta, N);

        Rng rng(99);
        for (int trial = 0; trial < 20; ++trial) {
            const double t = rng.uniform(0.02, 0.5);
            SpectralField evolved = evolve(proj, t, SymbolKind::Hyperbolic);
            PhysicalField grid = inverse_transform(evolved);
            const int ix = static_cast<int>(rng.uniform_int(0, d.n_x - 1));
            const int iy = static_cast<int>(rng.uniform_int(0, d.n_y - 1));
            const double x = d.x_of(ix), y = d.y_of(iy);
            if (std::abs(x) > L / 2 - 4.0 * n * 0.5 - 2.0) continue;  // stay away from the seam
            const complexd expect = kernel_ni(t, x, N) * kernel_ns(t, y, N);
            const double scale = 4.0 * n * n;  // the t -> 0 peak height
            CHECK(std::abs(grid.at(ix, iy) - expect) < 1e-6 * scale);
        }
    }
}

TEST_CASE("kernel sample invariant and bound bookkeeping") {
    KernelSample s = kernel(0.2, 0.5, 0.75, DyadicScale(4));
    CHECK(std::abs(s.value - kernel_ni(0.2, 0.5, DyadicScale(4)) * kernel_ns(0.2, 0.75, DyadicScale(4))) <
          1e-10 * std::abs(s.value) + 1e-12);
    CHECK(s.bound_allt == doctest::Approx(4.0 / std::sqrt(0.2)));
    CHECK(s.bound_short == doctest::Approx(5.0));
}

TEST_CASE("dispersive_bound_scan: finite constants, stability across N") {
    std::vector<double> tg;
    for (int i = 0; i <= 24; ++i) tg.push_back(std::pow(10.0, -4.0 + 4.0 * i / 24.0));
    std::vector<std::pair<double, double>> xy;
    Rng rng(5);
    xy.push_back({0.0, 0.0});
    for (int i = 0; i < 11; ++i) xy.push_back({rng.uniform(-2.0, 2.0), rng.uniform(0.0, 1.0)});

    SUBCASE("degenerate N = 1 scan returns finite constants") {
        auto rep = dispersive_bound_scan(DyadicScale(1), tg, xy);
        CHECK(std::isfinite(rep.c1));
        CHECK(std::isfinite(rep.c2));
        CHECK(rep.c1 > 0.0);
        CHECK(rep.short_window_sampled);
    }
    SUBCASE("C1 stable within factor 2 over N in {8,16,32}") {
        double lo = 1e300, hi = 0.0;
        for (int n : {8, 16, 32}) {
            auto rep = dispersive_bound_scan(DyadicScale(n), tg, xy);
            lo = std::min(lo, rep.c1);
            hi = std::max(hi, rep.c1);
            CHECK(rep.short_window_sampled);
        }
        CHECK(hi / lo < 2.0);
    }
}
