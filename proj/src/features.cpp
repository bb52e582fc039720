#include "avtse/features.hpp"

#include <cmath>
#include <stdexcept>

namespace avtse {

Eigen::MatrixXd lps(const ComplexSpectrogram& spec) {
  if (spec.channels() != 1) throw std::invalid_argument("lps: expects a single channel");
  const auto frames = static_cast<Eigen::Index>(spec.frames());
  const auto bins = static_cast<Eigen::Index>(spec.freq_bins());
  Eigen::MatrixXd out(frames, bins);
  for (Eigen::Index t = 0; t < frames; ++t)
    for (Eigen::Index k = 0; k < bins; ++k)
      out(t, k) = std::log(std::norm(spec.bins[0][static_cast<std::size_t>(t)]
                                                 [static_cast<std::size_t>(k)]) +
                           kLogFloor);
  return out;
}

namespace {
double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }
}  // namespace

Eigen::MatrixXd mel_filterbank(const FbankConfig& cfg, std::size_t fft_size, int sample_rate) {
  if (cfg.n_mels <= 0) throw std::invalid_argument("fbank: n_mels must be positive");
  if (!(cfg.f_low < cfg.f_high) || cfg.f_high > sample_rate / 2.0 || cfg.f_low < 0.0)
    throw std::invalid_argument("fbank: need 0 <= f_low < f_high <= sample_rate/2");

  const auto n_bins = static_cast<Eigen::Index>(fft_size / 2 + 1);
  const double mel_low = hz_to_mel(cfg.f_low);
  const double mel_high = hz_to_mel(cfg.f_high);
  std::vector<double> edges(static_cast<std::size_t>(cfg.n_mels) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(mel_low + (mel_high - mel_low) * static_cast<double>(i) /
                                       static_cast<double>(cfg.n_mels + 1));

  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(cfg.n_mels, n_bins);
  const double hz_per_bin = static_cast<double>(sample_rate) / static_cast<double>(fft_size);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double left = edges[static_cast<std::size_t>(m)];
    const double center = edges[static_cast<std::size_t>(m) + 1];
    const double right = edges[static_cast<std::size_t>(m) + 2];
    for (Eigen::Index k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * hz_per_bin;
      if (f > left && f < center)
        fb(m, k) = (f - left) / (center - left);
      else if (f >= center && f < right)
        fb(m, k) = (right - f) / (right - center);
    }
  }
  return fb;
}

Eigen::MatrixXd fbank(const ComplexSpectrogram& spec, const FbankConfig& cfg, int sample_rate) {
  if (spec.channels() != 1) throw std::invalid_argument("fbank: expects a single channel");
  const Eigen::MatrixXd fb = mel_filterbank(cfg, spec.config.fft_size, sample_rate);
  const auto frames = static_cast<Eigen::Index>(spec.frames());
  const auto bins = static_cast<Eigen::Index>(spec.freq_bins());
  Eigen::MatrixXd power(frames, bins);
  for (Eigen::Index t = 0; t < frames; ++t)
    for (Eigen::Index k = 0; k < bins; ++k)
      power(t, k) =
          std::norm(spec.bins[0][static_cast<std::size_t>(t)][static_cast<std::size_t>(k)]);
  Eigen::MatrixXd energies = power * fb.transpose();
  return (energies.array() + kLogFloor).log().matrix();
}

}  // namespace avtse
