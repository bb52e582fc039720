#pragma once

#include <string>
#include <vector>

#include "avtse/activity.hpp"
#include "avtse/cacgmm.hpp"
#include "avtse/stft.hpp"
#include "avtse/waveform.hpp"

namespace avtse {

struct GssConfig {
  StftConfig stft;
  std::size_t context_pad = 15;  // frames added around diarized segments
  int iterations = 20;
  std::size_t ref_channel = 0;
  bool apply_post_mask = true;   // multiply the beamformed output by the mask
  double mask_floor = 0.2;       // floor on the post-mask magnitude gain
};

// Diarization-guided target extraction: STFT, activity-constrained CACGMM,
// mask-based covariances, MVDR toward the target, optional floored post-mask,
// overlap-add synthesis. Deterministic for fixed inputs and config.
Waveform gss_enhance(const Waveform& mixture, const std::vector<DiarizationSegment>& segments,
                     const std::string& target_speaker, const GssConfig& cfg);

// The intermediate products, for inspection and testing.
struct GssIntermediates {
  ActivityPattern activities;
  CacgmmResult cacgmm;
  std::size_t target_class = 0;
};
Waveform gss_enhance(const Waveform& mixture, const std::vector<DiarizationSegment>& segments,
                     const std::string& target_speaker, const GssConfig& cfg,
                     GssIntermediates* intermediates);

}  // namespace avtse
