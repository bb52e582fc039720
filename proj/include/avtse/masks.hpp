#pragma once

#include <Eigen/Dense>

#include "avtse/stft.hpp"

namespace avtse {

// Time-frequency gain, [frame][freq], entries in [0,1].
using Mask = Eigen::MatrixXd;

inline constexpr double kIrmEps = 1e-10;

// sqrt(|S|^2 / (|S|^2 + |N|^2 + eps)) from aligned additive components.
// An all-silent bin (S = N = 0) maps to 0.
Mask ideal_ratio_mask(const ComplexSpectrogram& clean, const ComplexSpectrogram& noise);

// Scale magnitudes by the mask, phase preserved. Applies to every channel.
ComplexSpectrogram apply_mask(const ComplexSpectrogram& mixture, const Mask& mask);

// Mean over all entries of squared difference.
double mse_mask_loss(const Mask& estimate, const Mask& target);

}  // namespace avtse
