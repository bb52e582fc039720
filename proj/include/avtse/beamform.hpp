#pragma once

#include <Eigen/Dense>
#include <vector>

#include "avtse/masks.hpp"
#include "avtse/stft.hpp"
#include "avtse/waveform.hpp"

namespace avtse {

// Per-frequency Hermitian channel covariances with the mask normalizers used.
struct SpatialCovariance {
  std::vector<Eigen::MatrixXcd> matrices;  // [freq], channel x channel
  std::vector<double> mask_weight_sum;     // [freq]

  std::size_t freq_bins() const { return matrices.size(); }
  std::size_t channels() const { return matrices.empty() ? 0 : static_cast<std::size_t>(matrices[0].rows()); }
};

// Mask-weighted covariance: sum_t m(t,f) y(t,f) y(t,f)^H / sum_t m(t,f).
SpatialCovariance estimate_scm(const ComplexSpectrogram& spec, const Mask& mask);

// Souden MVDR: w(f) = (Phi_n^-1 Phi_s / tr(Phi_n^-1 Phi_s)) e_ref, with
// diagonal loading on the noise covariance before inversion.
std::vector<Eigen::VectorXcd> mvdr_weights(const SpatialCovariance& target_scm,
                                           const SpatialCovariance& noise_scm,
                                           std::size_t ref_channel = 0);

// out(t,f) = w(f)^H y(t,f)
ComplexSpectrogram apply_beamformer(const ComplexSpectrogram& spec,
                                    const std::vector<Eigen::VectorXcd>& weights);

// Average of integer-delayed channels.
Waveform delay_and_sum(const Waveform& mixture, const std::vector<int>& delays);

}  // namespace avtse
