#pragma once

#include <Eigen/Dense>

#include "avtse/stft.hpp"

namespace avtse {

// Floor inside every log so silent bins map to log(kLogFloor) instead of -inf.
inline constexpr double kLogFloor = 1e-10;

// ln(|X|^2 + kLogFloor), [frame][freq]. Single-channel spectrograms only.
Eigen::MatrixXd lps(const ComplexSpectrogram& spec);

struct FbankConfig {
  int n_mels = 80;
  double f_low = 0.0;
  double f_high = 8000.0;
};

// Triangular mel filters, peak-normalized to 1 (no area normalization);
// rows are filters, columns are FFT bins.
Eigen::MatrixXd mel_filterbank(const FbankConfig& cfg, std::size_t fft_size, int sample_rate);

// Log mel energies of |X|^2, [frame][mel].
Eigen::MatrixXd fbank(const ComplexSpectrogram& spec, const FbankConfig& cfg,
                      int sample_rate = kSampleRate);

}  // namespace avtse
