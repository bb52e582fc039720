#include "avtse/beamform.hpp"

#include <stdexcept>

namespace avtse {

namespace {
constexpr double kDiagLoad = 1e-6;
constexpr double kPsdTol = 1e-6;

// Largest |asymmetry| relative check plus eigenvalue floor.
void require_psd(const Eigen::MatrixXcd& m, const char* who) {
  const double scale = std::max(1.0, m.norm());
  if ((m - m.adjoint()).norm() > kPsdTol * scale)
    throw std::invalid_argument(std::string(who) + ": matrix not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTol * scale)
    throw std::invalid_argument(std::string(who) + ": matrix not positive semidefinite");
}
}  // namespace

SpatialCovariance estimate_scm(const ComplexSpectrogram& spec, const Mask& mask) {
  if (mask.rows() != static_cast<Eigen::Index>(spec.frames()) ||
      mask.cols() != static_cast<Eigen::Index>(spec.freq_bins()))
    throw std::invalid_argument("estimate_scm: mask shape mismatch");
  if (mask.maxCoeff() <= 0.0) throw std::invalid_argument("estimate_scm: mask is all-zero");

  const std::size_t channels = spec.channels();
  const std::size_t frames = spec.frames();
  const std::size_t bins = spec.freq_bins();
  SpatialCovariance scm;
  scm.matrices.assign(bins, Eigen::MatrixXcd::Zero(channels, channels));
  scm.mask_weight_sum.assign(bins, 0.0);

  Eigen::VectorXcd y(channels);
  for (std::size_t f = 0; f < bins; ++f) {
    for (std::size_t t = 0; t < frames; ++t) {
      const double m = mask(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(f));
      if (m == 0.0) continue;
      for (std::size_t c = 0; c < channels; ++c) y(static_cast<Eigen::Index>(c)) = spec.bins[c][t][f];
      scm.matrices[f].noalias() += m * (y * y.adjoint());
      scm.mask_weight_sum[f] += m;
    }
    if (scm.mask_weight_sum[f] > 0.0) scm.matrices[f] /= scm.mask_weight_sum[f];
  }
  return scm;
}

std::vector<Eigen::VectorXcd> mvdr_weights(const SpatialCovariance& target_scm,
                                           const SpatialCovariance& noise_scm,
                                           std::size_t ref_channel) {
  if (target_scm.freq_bins() != noise_scm.freq_bins() ||
      target_scm.channels() != noise_scm.channels())
    throw std::invalid_argument("mvdr_weights: covariance shape mismatch");
  const auto channels = static_cast<Eigen::Index>(target_scm.channels());
  if (ref_channel >= target_scm.channels())
    throw std::invalid_argument("mvdr_weights: reference channel out of range");

  std::vector<Eigen::VectorXcd> weights(target_scm.freq_bins());
  for (std::size_t f = 0; f < target_scm.freq_bins(); ++f) {
    const Eigen::MatrixXcd& phi_s = target_scm.matrices[f];
    const Eigen::MatrixXcd& phi_n = noise_scm.matrices[f];
    require_psd(phi_s, "mvdr_weights(target)");
    require_psd(phi_n, "mvdr_weights(noise)");

    const double load = kDiagLoad * std::max(phi_n.real().trace() / channels, 1e-30);
    const Eigen::MatrixXcd loaded =
        phi_n + load * Eigen::MatrixXcd::Identity(channels, channels);
    const Eigen::MatrixXcd numerator = loaded.ldlt().solve(phi_s);
    const std::complex<double> tr = numerator.trace();
    Eigen::VectorXcd w;
    if (std::abs(tr) < 1e-30) {
      // No spatial contrast: fall back to reference-channel selection.
      w = Eigen::VectorXcd::Zero(channels);
      w(static_cast<Eigen::Index>(ref_channel)) = 1.0;
    } else {
      w = (numerator / tr).col(static_cast<Eigen::Index>(ref_channel));
    }
    weights[f] = w;
  }
  return weights;
}

ComplexSpectrogram apply_beamformer(const ComplexSpectrogram& spec,
                                    const std::vector<Eigen::VectorXcd>& weights) {
  if (weights.size() != spec.freq_bins())
    throw std::invalid_argument("apply_beamformer: weight count mismatch");
  const std::size_t channels = spec.channels();
  ComplexSpectrogram out;
  out.config = spec.config;
  out.bins.resize(1);
  out.bins[0].assign(spec.frames(),
                     std::vector<std::complex<double>>(spec.freq_bins(), {0.0, 0.0}));
  for (std::size_t t = 0; t < spec.frames(); ++t)
    for (std::size_t f = 0; f < spec.freq_bins(); ++f) {
      std::complex<double> acc = 0.0;
      for (std::size_t c = 0; c < channels; ++c)
        acc += std::conj(weights[f](static_cast<Eigen::Index>(c))) * spec.bins[c][t][f];
      out.bins[0][t][f] = acc;
    }
  return out;
}

Waveform delay_and_sum(const Waveform& mixture, const std::vector<int>& delays) {
  mixture.validate();
  if (delays.size() != mixture.channels())
    throw std::invalid_argument("delay_and_sum: one delay per channel required");
  const auto len = static_cast<long>(mixture.length());
  for (int d : delays)
    if (std::abs(d) >= len) throw std::invalid_argument("delay_and_sum: delay exceeds signal length");

  Waveform out(1, mixture.length(), mixture.sample_rate);
  for (std::size_t c = 0; c < mixture.channels(); ++c) {
    const int d = delays[c];
    for (long i = 0; i < len; ++i) {
      const long j = i - d;
      if (j >= 0 && j < len) out.channel(0)[static_cast<std::size_t>(i)] += mixture.channel(c)[static_cast<std::size_t>(j)];
    }
  }
  for (auto& v : out.channel(0)) v /= static_cast<double>(mixture.channels());
  return out;
}

}  // namespace avtse
