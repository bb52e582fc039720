#include "avtse/sisnr.hpp"

#include <cmath>
#include <stdexcept>

namespace avtse {

double si_snr(const Waveform& estimate, const Waveform& reference) {
  if (estimate.channels() != 1 || reference.channels() != 1)
    throw std::invalid_argument("si_snr: expects single-channel signals");
  if (estimate.length() != reference.length())
    throw std::invalid_argument("si_snr: length mismatch");
  const auto& e = estimate.channel(0);
  const auto& r = reference.channel(0);
  const std::size_t n = r.size();
  if (n == 0) throw std::invalid_argument("si_snr: empty signals");

  double mean_e = 0.0, mean_r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_e += e[i];
    mean_r += r[i];
  }
  mean_e /= static_cast<double>(n);
  mean_r /= static_cast<double>(n);

  double dot = 0.0, ref_pow = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double re = r[i] - mean_r;
    dot += (e[i] - mean_e) * re;
    ref_pow += re * re;
  }
  if (ref_pow == 0.0) throw std::invalid_argument("si_snr: reference is all-zero");

  const double alpha = dot / ref_pow;
  double target_pow = 0.0, resid_pow = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = alpha * (r[i] - mean_r);
    const double d = (e[i] - mean_e) - t;
    target_pow += t * t;
    resid_pow += d * d;
  }
  if (target_pow == 0.0) return -kSiSnrCapDb;
  if (resid_pow <= 0.0 || target_pow / resid_pow >= std::pow(10.0, kSiSnrCapDb / 10.0))
    return kSiSnrCapDb;
  return 10.0 * std::log10(target_pow / resid_pow);
}

}  // namespace avtse
