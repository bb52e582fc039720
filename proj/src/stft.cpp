#include "avtse/stft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "avtse/fft.hpp"

namespace avtse {

void StftConfig::validate() const {
  if (fft_size == 0 || (fft_size & (fft_size - 1)) != 0)
    throw std::invalid_argument("StftConfig: fft_size must be a power of two");
  if (hop == 0 || hop > fft_size)
    throw std::invalid_argument("StftConfig: hop must satisfy 0 < hop <= fft_size");
}

std::vector<double> make_window(const StftConfig& cfg) {
  std::vector<double> w(cfg.fft_size, 1.0);
  if (cfg.window == WindowType::Rect) return w;
  for (std::size_t n = 0; n < cfg.fft_size; ++n) {
    const double h =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                             static_cast<double>(cfg.fft_size));
    w[n] = cfg.window == WindowType::SqrtHann ? std::sqrt(h) : h;
  }
  return w;
}

double cola_deviation(const StftConfig& cfg) {
  cfg.validate();
  const auto w = make_window(cfg);
  std::vector<double> s(cfg.hop, 0.0);
  for (std::size_t n = 0; n < cfg.fft_size; ++n) s[n % cfg.hop] += w[n] * w[n];
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(cfg.hop);
  double dev = 0.0;
  for (double v : s) dev = std::max(dev, std::abs(v - mean));
  return dev;
}

namespace {

std::vector<std::vector<std::complex<double>>> analyze_channel(const std::vector<double>& x,
                                                               const StftConfig& cfg,
                                                               const std::vector<double>& win) {
  const std::size_t pad = cfg.fft_size;
  const std::size_t padded = x.size() + 2 * pad;
  const std::size_t n_frames = 1 + (padded - cfg.fft_size) / cfg.hop;
  const std::size_t n_bins = cfg.fft_size / 2 + 1;

  std::vector<std::vector<std::complex<double>>> frames(n_frames);
  std::vector<std::complex<double>> buf(cfg.fft_size);
  for (std::size_t f = 0; f < n_frames; ++f) {
    const std::size_t start = f * cfg.hop;  // index into padded signal
    for (std::size_t n = 0; n < cfg.fft_size; ++n) {
      const std::size_t p = start + n;
      const double v = (p >= pad && p - pad < x.size()) ? x[p - pad] : 0.0;
      buf[n] = v * win[n];
    }
    fft(buf);
    frames[f].assign(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(n_bins));
  }
  return frames;
}

}  // namespace

ComplexSpectrogram stft(const Waveform& wave, const StftConfig& cfg) {
  if (wave.channels() != 1) throw std::invalid_argument("stft: expects a single channel");
  return stft_multi(wave, cfg);
}

ComplexSpectrogram stft_multi(const Waveform& wave, const StftConfig& cfg) {
  cfg.validate();
  wave.validate();
  if (wave.length() < cfg.fft_size)
    throw std::invalid_argument("stft: signal shorter than one frame (length " +
                                std::to_string(wave.length()) + " < fft_size " +
                                std::to_string(cfg.fft_size) + ")");
  const auto win = make_window(cfg);
  ComplexSpectrogram spec;
  spec.config = cfg;
  for (std::size_t c = 0; c < wave.channels(); ++c)
    spec.bins.push_back(analyze_channel(wave.channel(c), cfg, win));
  return spec;
}

Waveform istft(const ComplexSpectrogram& spec, const StftConfig& cfg, std::size_t length) {
  if (!(cfg == spec.config)) throw std::invalid_argument("istft: config does not match spectrogram");
  cfg.validate();
  const auto win = make_window(cfg);
  const std::size_t pad = cfg.fft_size;
  const std::size_t n_bins = cfg.fft_size / 2 + 1;

  Waveform out(spec.channels(), length);
  for (std::size_t c = 0; c < spec.channels(); ++c) {
    const auto& frames = spec.bins[c];
    const std::size_t padded = (frames.empty() ? 0 : (frames.size() - 1) * cfg.hop) + cfg.fft_size;
    std::vector<double> acc(padded, 0.0), norm(padded, 0.0);
    std::vector<std::complex<double>> buf(cfg.fft_size);
    for (std::size_t f = 0; f < frames.size(); ++f) {
      if (frames[f].size() != n_bins) throw std::invalid_argument("istft: bad bin count");
      for (std::size_t k = 0; k < n_bins; ++k) buf[k] = frames[f][k];
      for (std::size_t k = n_bins; k < cfg.fft_size; ++k)
        buf[k] = std::conj(frames[f][cfg.fft_size - k]);
      fft(buf, true);
      const std::size_t start = f * cfg.hop;
      for (std::size_t n = 0; n < cfg.fft_size; ++n) {
        acc[start + n] += buf[n].real() * win[n];
        norm[start + n] += win[n] * win[n];
      }
    }
    for (std::size_t i = 0; i < length; ++i) {
      const std::size_t p = pad + i;
      if (p < acc.size() && norm[p] > 1e-12) out.channel(c)[i] = acc[p] / norm[p];
    }
  }
  return out;
}

}  // namespace avtse
