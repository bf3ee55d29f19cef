#include "qtm/fft.hpp"

#include <unsupported/Eigen/FFT>

#include <bit>
#include <cstddef>

namespace qtm {
namespace fft {

namespace {

Eigen::FFT<double>& engine() {
    thread_local Eigen::FFT<double> f;
    return f;
}

std::size_t next_pow2(std::size_t n) {
    return std::bit_ceil(n);
}

} // namespace

std::vector<cplx> forward(const std::vector<cplx>& in) {
    std::vector<cplx> out;
    engine().fwd(out, in);
    return out;
}

std::vector<cplx> inverse(const std::vector<cplx>& in) {
    std::vector<cplx> out;
    engine().inv(out, in);
    return out;
}

std::vector<cplx> convolve(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.empty() || b.empty()) return {};
    const std::size_t out_len = a.size() + b.size() - 1;
    // Direct convolution below the FFT break-even point.
    if (a.size() * b.size() <= 16384) {
        std::vector<cplx> out(out_len, cplx(0.0));
        const auto& small = a.size() <= b.size() ? a : b;
        const auto& big = a.size() <= b.size() ? b : a;
        for (std::size_t i = 0; i < small.size(); ++i) {
            const cplx s = small[i];
            if (s == cplx(0.0)) continue;
            for (std::size_t j = 0; j < big.size(); ++j) out[i + j] += s * big[j];
        }
        return out;
    }
    const std::size_t n = next_pow2(out_len);
    std::vector<cplx> fa(n, cplx(0.0)), fb(n, cplx(0.0));
    std::copy(a.begin(), a.end(), fa.begin());
    std::copy(b.begin(), b.end(), fb.begin());
    fa = forward(fa);
    fb = forward(fb);
    for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
    fa = inverse(fa);
    fa.resize(out_len);
    return fa;
}

} // namespace fft
} // namespace qtm
