#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "avtse/waveform.hpp"

namespace avtse {

enum class WindowType { Hann, SqrtHann, Rect };

struct StftConfig {
  std::size_t fft_size = 512;
  std::size_t hop = 256;
  WindowType window = WindowType::Hann;

  bool operator==(const StftConfig&) const = default;
  void validate() const;
};

// Periodic window of length fft_size.
std::vector<double> make_window(const StftConfig& cfg);

// Max deviation of sum_m w(n - m*hop)^2 from its mean over one hop period.
// Zero (to rounding) means the squared window overlap-adds to a constant.
double cola_deviation(const StftConfig& cfg);

// [channel][frame][freq], freq_bins = fft_size/2 + 1.
struct ComplexSpectrogram {
  std::vector<std::vector<std::vector<std::complex<double>>>> bins;
  StftConfig config;

  std::size_t channels() const { return bins.size(); }
  std::size_t frames() const { return bins.empty() ? 0 : bins[0].size(); }
  std::size_t freq_bins() const { return frames() == 0 ? 0 : bins[0][0].size(); }
};

// Analysis of a single channel. The signal is zero-padded by fft_size at both
// ends so every input sample is covered by fully-normalizable frames.
ComplexSpectrogram stft(const Waveform& wave, const StftConfig& cfg);

// All channels of a multichannel waveform.
ComplexSpectrogram stft_multi(const Waveform& wave, const StftConfig& cfg);

// Overlap-add synthesis with squared-window normalization; inverse of stft.
// `length` is the number of output samples (the original signal length).
Waveform istft(const ComplexSpectrogram& spec, const StftConfig& cfg, std::size_t length);

}  // namespace avtse
