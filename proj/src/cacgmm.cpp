#include "avtse/cacgmm.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace avtse {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kQfFloor = 1e-12;

struct ClassParams {
  double log_weight = kNegInf;
  Eigen::MatrixXcd shape;     // trace-normalized, PD after regularization
  Eigen::MatrixXcd shape_inv;
  double log_det = 0.0;
};

// Regularize, trace-normalize, and cache inverse and log-determinant.
void finalize_shape(ClassParams& p, Eigen::Index channels) {
  const double tr = p.shape.real().trace();
  p.shape += (kCacgmmShapeReg * std::max(tr, 1e-30) / static_cast<double>(channels)) *
             Eigen::MatrixXcd::Identity(channels, channels);
  p.shape *= static_cast<double>(channels) / p.shape.real().trace();
  Eigen::LLT<Eigen::MatrixXcd> llt(p.shape);
  if (llt.info() != Eigen::Success) {
    // Singular beyond the standard regularization: fall back to identity.
    p.shape = Eigen::MatrixXcd::Identity(channels, channels);
    llt.compute(p.shape);
  }
  p.shape_inv = llt.solve(Eigen::MatrixXcd::Identity(channels, channels));
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < channels; ++i)
    log_det += 2.0 * std::log(std::real(llt.matrixL()(i, i)));
  p.log_det = log_det;
}

}  // namespace

CacgmmResult cacgmm_em(const ComplexSpectrogram& observations, const ActivityPattern& activities,
                       int iterations) {
  const std::size_t channels = observations.channels();
  const std::size_t frames = observations.frames();
  const std::size_t bins = observations.freq_bins();
  if (channels < 2) throw std::invalid_argument("cacgmm_em: need at least 2 channels");
  if (iterations < 1) throw std::invalid_argument("cacgmm_em: iterations must be >= 1");
  if (activities.frames() != frames)
    throw std::invalid_argument("cacgmm_em: activity frame count mismatch");
  const std::size_t n_classes = activities.classes();
  const auto d = static_cast<Eigen::Index>(channels);

  // log of the CACG normalizing constant, shared by every density evaluation
  const double log_const = std::lgamma(static_cast<double>(channels)) - std::log(2.0) -
                           static_cast<double>(channels) * std::log(std::numbers::pi);

  CacgmmResult result;
  result.masks.assign(n_classes, Mask::Zero(static_cast<Eigen::Index>(frames),
                                            static_cast<Eigen::Index>(bins)));
  result.state.class_weights.assign(bins, std::vector<double>(n_classes, 0.0));
  result.state.shape_matrices.assign(
      bins, std::vector<Eigen::MatrixXcd>(n_classes, Eigen::MatrixXcd::Identity(d, d)));
  result.state.log_likelihood_trace.assign(static_cast<std::size_t>(iterations) + 1, 0.0);

  for (std::size_t f = 0; f < bins; ++f) {
    // Unit-normalized channel vectors; zero-energy frames carry no direction.
    Eigen::MatrixXcd z(d, static_cast<Eigen::Index>(frames));
    std::vector<bool> valid(frames, false);
    for (std::size_t t = 0; t < frames; ++t) {
      Eigen::VectorXcd y(d);
      for (std::size_t c = 0; c < channels; ++c) y(static_cast<Eigen::Index>(c)) = observations.bins[c][t][f];
      const double norm = y.norm();
      if (norm > 0.0) {
        z.col(static_cast<Eigen::Index>(t)) = y / norm;
        valid[t] = true;
      } else {
        z.col(static_cast<Eigen::Index>(t)).setZero();
      }
    }

    std::vector<ClassParams> params(n_classes);
    Eigen::MatrixXd gamma(static_cast<Eigen::Index>(n_classes), static_cast<Eigen::Index>(frames));

    // Posteriors start uniform over the classes each frame allows.
    for (std::size_t t = 0; t < frames; ++t) {
      int allowed = 0;
      for (std::size_t k = 0; k < n_classes; ++k)
        if (activities.active[k][t]) ++allowed;
      for (std::size_t k = 0; k < n_classes; ++k)
        gamma(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) =
            activities.active[k][t] ? 1.0 / allowed : 0.0;
    }

    auto m_step = [&]() {
      std::size_t n_valid = 0;
      for (std::size_t t = 0; t < frames; ++t)
        if (valid[t]) ++n_valid;
      for (std::size_t k = 0; k < n_classes; ++k) {
        double weight_sum = 0.0;
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
        const Eigen::MatrixXcd inv = params[k].shape_inv.size() > 0
                                         ? params[k].shape_inv
                                         : Eigen::MatrixXcd::Identity(d, d);
        for (std::size_t t = 0; t < frames; ++t) {
          if (!valid[t]) continue;
          const double g = gamma(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t));
          if (g == 0.0) continue;
          const auto zt = z.col(static_cast<Eigen::Index>(t));
          const double qf = std::max(std::real((zt.adjoint() * inv * zt)(0, 0)), kQfFloor);
          acc.noalias() += (g / qf) * (zt * zt.adjoint());
          weight_sum += g;
        }
        params[k].log_weight = weight_sum > 0.0 && n_valid > 0
                                   ? std::log(weight_sum / static_cast<double>(n_valid))
                                   : kNegInf;
        if (weight_sum > 0.0) {
          params[k].shape = static_cast<double>(channels) / weight_sum * acc;
        } else {
          params[k].shape = Eigen::MatrixXcd::Identity(d, d);
        }
        finalize_shape(params[k], d);
      }
    };

    // E-step; returns the data log-likelihood under the current parameters.
    auto e_step = [&]() {
      double ll = 0.0;
      std::vector<double> log_rho(n_classes);
      for (std::size_t t = 0; t < frames; ++t) {
        if (!valid[t]) {
          int allowed = 0;
          for (std::size_t k = 0; k < n_classes; ++k)
            if (activities.active[k][t]) ++allowed;
          for (std::size_t k = 0; k < n_classes; ++k)
            gamma(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) =
                activities.active[k][t] ? 1.0 / allowed : 0.0;
          continue;
        }
        const auto zt = z.col(static_cast<Eigen::Index>(t));
        double max_rho = kNegInf;
        for (std::size_t k = 0; k < n_classes; ++k) {
          if (!activities.active[k][t] || params[k].log_weight == kNegInf) {
            log_rho[k] = kNegInf;
            continue;
          }
          const double qf =
              std::max(std::real((zt.adjoint() * params[k].shape_inv * zt)(0, 0)), kQfFloor);
          log_rho[k] = params[k].log_weight + log_const - params[k].log_det -
                       static_cast<double>(channels) * std::log(qf);
          max_rho = std::max(max_rho, log_rho[k]);
        }
        if (max_rho == kNegInf) {
          int allowed = 0;
          for (std::size_t k = 0; k < n_classes; ++k)
            if (activities.active[k][t]) ++allowed;
          for (std::size_t k = 0; k < n_classes; ++k)
            gamma(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) =
                activities.active[k][t] ? 1.0 / allowed : 0.0;
          continue;
        }
        double denom = 0.0;
        for (std::size_t k = 0; k < n_classes; ++k)
          denom += log_rho[k] == kNegInf ? 0.0 : std::exp(log_rho[k] - max_rho);
        for (std::size_t k = 0; k < n_classes; ++k)
          gamma(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) =
              log_rho[k] == kNegInf ? 0.0 : std::exp(log_rho[k] - max_rho) / denom;
        ll += max_rho + std::log(denom);
      }
      return ll;
    };

    m_step();
    for (int it = 0; it < iterations; ++it) {
      result.state.log_likelihood_trace[static_cast<std::size_t>(it)] += e_step();
      m_step();
    }
    result.state.log_likelihood_trace[static_cast<std::size_t>(iterations)] += e_step();

    for (std::size_t k = 0; k < n_classes; ++k) {
      result.state.class_weights[f][k] =
          params[k].log_weight == kNegInf ? 0.0 : std::exp(params[k].log_weight);
      result.state.shape_matrices[f][k] = params[k].shape;
      for (std::size_t t = 0; t < frames; ++t)
        result.masks[k](static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(f)) =
            gamma(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t));
    }
  }
  return result;
}

}  // namespace avtse
