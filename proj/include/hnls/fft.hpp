#pragma once

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "hnls/common.hpp"

namespace hnls {

// Thin FFTW wrapper. Plans are cached per shape and created with
// FFTW_ESTIMATE | FFTW_UNALIGNED so that (a) planning is deterministic and
// (b) a cached plan can execute on any buffer. Plan creation is serialized;
// execution on distinct buffers is safe concurrently.
class Fft {
public:
    // unnormalized DFT, sign = -1 forward (e^{-2pi i jk/n}), +1 backward
    static void dft_1d(cvec& data, int sign) {
        fftw_plan p = plan1d(static_cast<int>(data.size()), sign);
        fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data.data()),
                         reinterpret_cast<fftw_complex*>(data.data()));
    }

    // Row-major (n0, n1) 2D transform, in place.
    static void dft_2d(cvec& data, int n0, int n1, int sign) {
        if (static_cast<std::size_t>(n0) * n1 != data.size())
            throw std::invalid_argument("Fft::dft_2d: shape mismatch");
        fftw_plan p = plan2d(n0, n1, sign);
        fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data.data()),
                         reinterpret_cast<fftw_complex*>(data.data()));
    }

private:
    static fftw_plan plan1d(int n, int sign) {
        static std::map<std::pair<int, int>, fftw_plan> cache;
        static std::mutex mtx;
        std::lock_guard<std::mutex> lock(mtx);
        auto key = std::make_pair(n, sign);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        cvec scratch(n);
        fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(scratch.data()),
                                       reinterpret_cast<fftw_complex*>(scratch.data()),
                                       sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        cache[key] = p;
        return p;
    }

    static fftw_plan plan2d(int n0, int n1, int sign) {
        static std::map<std::tuple<int, int, int>, fftw_plan> cache;
        static std::mutex mtx;
        std::lock_guard<std::mutex> lock(mtx);
        auto key = std::make_tuple(n0, n1, sign);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        cvec scratch(static_cast<std::size_t>(n0) * n1);
        fftw_plan p = fftw_plan_dft_2d(n0, n1, reinterpret_cast<fftw_complex*>(scratch.data()),
                                       reinterpret_cast<fftw_complex*>(scratch.data()),
                                       sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        cache[key] = p;
        return p;
    }
};

}  // namespace hnls
