#pragma once

#include <string>
#include <vector>

#include "avtse/waveform.hpp"

namespace avtse {

struct DiarizationSegment {
  std::string speaker;
  double start_seconds = 0.0;
  double end_seconds = 0.0;
};

// Per-class, per-frame activity. Speaker classes come first in speaker_ids
// order; a dedicated noise class is appended last and is active in every
// frame, so no frame is ever left without an allowed class.
struct ActivityPattern {
  std::vector<std::vector<bool>> active;  // [class][frame], last class = noise
  std::vector<std::string> speaker_ids;   // speakers only, excludes the noise class
  std::size_t context_pad = 0;

  std::size_t classes() const { return active.size(); }
  std::size_t frames() const { return active.empty() ? 0 : active[0].size(); }
  std::size_t noise_class() const { return active.size() - 1; }
};

// Frame f is active for a speaker iff the frame start sample f*hop +
// frame_offset_samples lies within a diarized segment widened by context_pad
// frames on each side. The offset lets callers align frame indices of a
// padded STFT with session time.
ActivityPattern activities_from_segments(const std::vector<DiarizationSegment>& segments,
                                         const std::vector<std::string>& speaker_ids,
                                         std::size_t frame_count, std::size_t hop,
                                         int sample_rate = kSampleRate,
                                         std::size_t context_pad = 15,
                                         long frame_offset_samples = 0);

}  // namespace avtse
