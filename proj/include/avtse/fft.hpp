#pragma once

#include <complex>
#include <vector>

namespace avtse {

// In-place radix-2 FFT. Size must be a power of two.
void fft(std::vector<std::complex<double>>& x, bool inverse = false);

// Linear convolution via zero-padded FFT.
std::vector<double> fft_convolve(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace avtse
