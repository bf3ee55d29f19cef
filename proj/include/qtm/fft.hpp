#ifndef QTM_FFT_HPP
#define QTM_FFT_HPP

#include <complex>
#include <vector>

namespace qtm {

using cplx = std::complex<double>;

namespace fft {

// Forward DFT: out[k] = sum_n in[n] * exp(-2*pi*i*n*k/N).
std::vector<cplx> forward(const std::vector<cplx>& in);

// Inverse DFT: out[n] = (1/N) * sum_k in[k] * exp(+2*pi*i*n*k/N).
std::vector<cplx> inverse(const std::vector<cplx>& in);

// Full linear convolution, out has size a.size()+b.size()-1.
// Switches to an FFT path when the direct cost gets large.
std::vector<cplx> convolve(const std::vector<cplx>& a, const std::vector<cplx>& b);

} // namespace fft

} // namespace qtm

#endif
