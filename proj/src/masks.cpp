#include "avtse/masks.hpp"

#include <cmath>
#include <stdexcept>

namespace avtse {

namespace {
void require_shape(const ComplexSpectrogram& a, const ComplexSpectrogram& b, const char* who) {
  if (a.channels() != b.channels() || a.frames() != b.frames() || a.freq_bins() != b.freq_bins())
    throw std::invalid_argument(std::string(who) + ": spectrogram shape mismatch");
}
}  // namespace

Mask ideal_ratio_mask(const ComplexSpectrogram& clean, const ComplexSpectrogram& noise) {
  require_shape(clean, noise, "ideal_ratio_mask");
  if (clean.channels() != 1)
    throw std::invalid_argument("ideal_ratio_mask: expects single-channel spectrograms");
  const auto frames = static_cast<Eigen::Index>(clean.frames());
  const auto bins = static_cast<Eigen::Index>(clean.freq_bins());
  Mask mask(frames, bins);
  for (Eigen::Index t = 0; t < frames; ++t) {
    for (Eigen::Index k = 0; k < bins; ++k) {
      const double s2 = std::norm(clean.bins[0][static_cast<std::size_t>(t)][static_cast<std::size_t>(k)]);
      const double n2 = std::norm(noise.bins[0][static_cast<std::size_t>(t)][static_cast<std::size_t>(k)]);
      mask(t, k) = std::sqrt(s2 / (s2 + n2 + kIrmEps));
    }
  }
  return mask;
}

ComplexSpectrogram apply_mask(const ComplexSpectrogram& mixture, const Mask& mask) {
  if (mask.rows() != static_cast<Eigen::Index>(mixture.frames()) ||
      mask.cols() != static_cast<Eigen::Index>(mixture.freq_bins()))
    throw std::invalid_argument("apply_mask: mask shape mismatch");
  ComplexSpectrogram out = mixture;
  for (auto& channel : out.bins)
    for (std::size_t t = 0; t < channel.size(); ++t)
      for (std::size_t k = 0; k < channel[t].size(); ++k)
        channel[t][k] *= mask(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k));
  return out;
}

double mse_mask_loss(const Mask& estimate, const Mask& target) {
  if (estimate.rows() != target.rows() || estimate.cols() != target.cols())
    throw std::invalid_argument("mse_mask_loss: shape mismatch");
  if (estimate.size() == 0) throw std::invalid_argument("mse_mask_loss: empty masks");
  return (estimate - target).array().square().mean();
}

}  // namespace avtse
