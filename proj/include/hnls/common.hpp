#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hnls {

using complexd = std::complex<double>;
using cvec = std::vector<complexd>;

inline constexpr double PI = 3.141592653589793238462643383279502884;
inline constexpr double TWO_PI = 2.0 * PI;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Deterministic, portable RNG. splitmix64 drives a xoshiro256** stream so
// that results do not depend on the standard library's distributions.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
        have_spare_ = false;
    }

    std::uint64_t next_u64() {
        auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0,1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // uniform integer in [lo, hi] inclusive
    long long uniform_int(long long lo, long long hi) {
        return lo + static_cast<long long>(uniform() * static_cast<double>(hi - lo + 1));
    }

    // standard normal via Box-Muller (portable across platforms)
    double gaussian() {
        if (have_spare_) { have_spare_ = false; return spare_; }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(TWO_PI * u2);
        have_spare_ = true;
        return r * std::cos(TWO_PI * u2);
    }

    complexd gaussian_complex() { return complexd(gaussian(), gaussian()); }

private:
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_;
};

// Per-task seed derivation: independent streams from a root seed.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t task_index) {
    SplitMix64 sm(root ^ (0xD1B54A32D192ED03ULL + task_index * 0x9E3779B97F4A7C15ULL));
    sm.next();
    return sm.next();
}

// Deterministic parallel map over [0, n): results are written to per-index
// slots, so the reduction order never depends on the schedule.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::vector<std::exception_ptr> errs(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&, t]() {
            try {
                for (std::size_t i = t; i < n; i += nt) body(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace hnls
