#include "avtse/gss.hpp"

#include <algorithm>
#include <stdexcept>

#include "avtse/beamform.hpp"
#include "avtse/masks.hpp"

namespace avtse {

Waveform gss_enhance(const Waveform& mixture, const std::vector<DiarizationSegment>& segments,
                     const std::string& target_speaker, const GssConfig& cfg) {
  return gss_enhance(mixture, segments, target_speaker, cfg, nullptr);
}

Waveform gss_enhance(const Waveform& mixture, const std::vector<DiarizationSegment>& segments,
                     const std::string& target_speaker, const GssConfig& cfg,
                     GssIntermediates* intermediates) {
  mixture.validate();
  if (mixture.channels() < 2) throw std::invalid_argument("gss_enhance: need a multichannel mixture");

  std::vector<std::string> speakers;
  for (const auto& seg : segments)
    if (std::find(speakers.begin(), speakers.end(), seg.speaker) == speakers.end())
      speakers.push_back(seg.speaker);
  const auto target_it = std::find(speakers.begin(), speakers.end(), target_speaker);
  if (target_it == speakers.end())
    throw std::invalid_argument("gss_enhance: target speaker '" + target_speaker +
                                "' has no diarized segments");
  const auto target_class = static_cast<std::size_t>(target_it - speakers.begin());

  const ComplexSpectrogram spec = stft_multi(mixture, cfg.stft);
  // The STFT pads the signal by fft_size samples, so spectrogram frame f
  // starts at sample f*hop - fft_size of the session.
  const ActivityPattern activities = activities_from_segments(
      segments, speakers, spec.frames(), cfg.stft.hop, mixture.sample_rate, cfg.context_pad,
      -static_cast<long>(cfg.stft.fft_size));

  bool target_active = false;
  for (std::size_t t = 0; t < activities.frames() && !target_active; ++t)
    target_active = activities.active[target_class][t];
  if (!target_active)
    throw std::invalid_argument("gss_enhance: target speaker '" + target_speaker +
                                "' is never active");

  CacgmmResult cacgmm = cacgmm_em(spec, activities, cfg.iterations);
  const Mask& target_mask = cacgmm.masks[target_class];
  const Mask distortion_mask = (Mask::Ones(target_mask.rows(), target_mask.cols()) - target_mask).eval();

  const SpatialCovariance target_scm = estimate_scm(spec, target_mask);
  const SpatialCovariance noise_scm = estimate_scm(spec, distortion_mask);
  const auto weights = mvdr_weights(target_scm, noise_scm, cfg.ref_channel);
  ComplexSpectrogram enhanced = apply_beamformer(spec, weights);

  if (cfg.apply_post_mask) {
    Mask floored = target_mask.cwiseMax(cfg.mask_floor);
    enhanced = apply_mask(enhanced, floored);
  }

  if (intermediates) {
    intermediates->activities = activities;
    intermediates->cacgmm = std::move(cacgmm);
    intermediates->target_class = target_class;
  }
  return istft(enhanced, cfg.stft, mixture.length());
}

}  // namespace avtse
