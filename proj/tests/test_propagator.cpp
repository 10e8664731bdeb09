#include <doctest.h>

#include "hnls/norms.hpp"
#include "hnls/projectors.hpp"
#include "hnls/propagator.hpp"

using namespace hnls;

namespace {
SpectralField rand_band(const DomainSpec& d, std::uint64_t seed, int band) {
    SpectralField F(d);
    Rng rng(seed);
    for (int ix = 0; ix < d.n_x; ++ix) {
        if (std::abs(d.xi(ix)) > band) continue;
        for (int iy = 0; iy < d.n_y; ++iy) {
            if (std::abs(d.freq_k(iy)) > band) continue;
            F.coeffs[static_cast<std::size_t>(ix) * d.n_y + iy] = rng.gaussian_complex();
        }
    }
    return F;
}
double field_dist(const SpectralField& a, const SpectralField& b) {
    double n = 0;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) n += std::norm(a.coeffs[i] - b.coeffs[i]);
    return std::sqrt(n);
}
}  // namespace

TEST_CASE("evolve: identity, recurrence, unitarity, group law") {
    DomainSpec d(2.0, 64, 16, 2);
    SpectralField F = rand_band(d, 2, 4);

    SUBCASE("t = 0 is the identity") {
        SpectralField G = evolve(F, 0.0, SymbolKind::Hyperbolic);
        CHECK(field_dist(F, G) == 0.0);
    }
    SUBCASE("x-independent data is 1-periodic under the hyperbolic flow") {
        SpectralField G(d);
        G.at_freq(0, 1) = complexd(0.3, -0.2);
        G.at_freq(0, 3) = complexd(1.0, 0.5);
        SpectralField H = evolve(G, 1.0, SymbolKind::Hyperbolic);
        CHECK(field_dist(G, H) < 1e-12 * G.l2_norm());
    }
    SUBCASE("unimodular multiplier preserves the L^2 norm") {
        for (double t : {0.1, 1.0, 7.0}) {
            SpectralField G = evolve(F, t, SymbolKind::Hyperbolic);
            CHECK(G.l2_norm() == doctest::Approx(F.l2_norm()).epsilon(1e-12));
            SpectralField M = evolve(F, t, SymbolKind::MixedDerivative);
            CHECK(M.l2_norm() == doctest::Approx(F.l2_norm()).epsilon(1e-12));
        }
    }
    SUBCASE("group law") {
        SpectralField a = evolve(evolve(F, 0.4, SymbolKind::Hyperbolic), 0.35, SymbolKind::Hyperbolic);
        SpectralField b = evolve(F, 0.75, SymbolKind::Hyperbolic);
        CHECK(field_dist(a, b) < 1e-12 * F.l2_norm());
    }
}

TEST_CASE("duhamel: degenerate, constant-mode, quadrature order") {
    DomainSpec d(2.0, 64, 16, 2);

    SUBCASE("zero source gives zero") {
        std::vector<SpectralField> src(9, SpectralField(d));
        auto r = duhamel(src, 0.8, SymbolKind::Hyperbolic);
        for (const auto& c : r.value.coeffs) CHECK(std::abs(c) == 0.0);
    }
    SUBCASE("constant (0,0) mode integrates to t times the mode") {
        std::vector<SpectralField> src;
        for (int j = 0; j <= 8; ++j) {
            SpectralField s(d);
            s.at_freq(0, 0) = complexd(2.0, -1.0);
            src.push_back(s);
        }
        auto r = duhamel(src, 0.6, SymbolKind::Hyperbolic);
        CHECK(std::abs(r.value.at_freq(0, 0) - complexd(1.2, -0.6)) < 1e-13);
    }
    SUBCASE("halving dtau shrinks the update by about 4x") {
        // time-dependent source: e^{i tau Box} applied to a fixed field;
        // counts start in the trapezoid asymptotic regime for this band
        SpectralField base = rand_band(d, 3, 4);
        auto build = [&](int M) {
            std::vector<SpectralField> src;
            for (int j = 0; j <= M; ++j) src.push_back(evolve(base, 0.7 * j / M, SymbolKind::MixedDerivative));
            return src;
        };
        auto r64 = duhamel(build(64), 0.7, SymbolKind::Hyperbolic);
        auto r128 = duhamel(build(128), 0.7, SymbolKind::Hyperbolic);
        auto r512 = duhamel(build(512), 0.7, SymbolKind::Hyperbolic);
        const double e1 = field_dist(r64.value, r512.value);
        const double e2 = field_dist(r128.value, r512.value);
        CHECK(e2 < e1 * (0.25 + 0.15));
        CHECK(r128.richardson_delta < r64.richardson_delta * 0.6);
    }
}

TEST_CASE("duhamel_cumulative matches single-shot duhamel at the end point") {
    DomainSpec d(2.0, 64, 16, 2);
    SpectralField base = rand_band(d, 5, 4);
    const int M = 24;
    const double T = 0.9, dtau = T / M;
    std::vector<SpectralField> src;
    for (int j = 0; j <= M; ++j) src.push_back(evolve(base, dtau * j, SymbolKind::MixedDerivative));
    auto direct = duhamel(src, T, SymbolKind::Hyperbolic);
    auto cum = duhamel_cumulative(src, dtau, SymbolKind::Hyperbolic);
    CHECK(field_dist(direct.value, cum.back()) < 1e-11 * direct.value.l2_norm());
}
