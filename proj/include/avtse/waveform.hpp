#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace avtse {

// The toolkit operates at a fixed rate; other rates are rejected at load time.
inline constexpr int kSampleRate = 16000;

// Multichannel audio. All channels have the same length.
struct Waveform {
  std::vector<std::vector<double>> samples;  // [channel][sample]
  int sample_rate = kSampleRate;

  Waveform() = default;
  Waveform(std::size_t channels, std::size_t length, int rate = kSampleRate)
      : samples(channels, std::vector<double>(length, 0.0)), sample_rate(rate) {}

  std::size_t channels() const { return samples.size(); }
  std::size_t length() const { return samples.empty() ? 0 : samples[0].size(); }

  const std::vector<double>& channel(std::size_t c) const { return samples.at(c); }
  std::vector<double>& channel(std::size_t c) { return samples.at(c); }

  void validate() const {
    if (sample_rate <= 0) throw std::invalid_argument("Waveform: sample_rate must be positive");
    for (const auto& ch : samples)
      if (ch.size() != length())
        throw std::invalid_argument("Waveform: channels must have equal length");
  }

  Waveform mono(std::size_t c = 0) const {
    Waveform out;
    out.sample_rate = sample_rate;
    out.samples.push_back(samples.at(c));
    return out;
  }
};

}  // namespace avtse
