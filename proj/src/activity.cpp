#include "avtse/activity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace avtse {

ActivityPattern activities_from_segments(const std::vector<DiarizationSegment>& segments,
                                         const std::vector<std::string>& speaker_ids,
                                         std::size_t frame_count, std::size_t hop,
                                         int sample_rate, std::size_t context_pad,
                                         long frame_offset_samples) {
  if (hop == 0) throw std::invalid_argument("activities_from_segments: hop must be positive");
  ActivityPattern pattern;
  pattern.speaker_ids = speaker_ids;
  pattern.context_pad = context_pad;
  pattern.active.assign(speaker_ids.size() + 1, std::vector<bool>(frame_count, false));
  pattern.active.back().assign(frame_count, true);  // noise class

  for (const auto& seg : segments) {
    const auto it = std::find(speaker_ids.begin(), speaker_ids.end(), seg.speaker);
    if (it == speaker_ids.end())
      throw std::invalid_argument("activities_from_segments: unknown speaker '" + seg.speaker + "'");
    const auto spk = static_cast<std::size_t>(it - speaker_ids.begin());
    if (seg.end_seconds <= seg.start_seconds)
      throw std::invalid_argument("activities_from_segments: segment end must follow start");

    const double start_sample = seg.start_seconds * sample_rate - static_cast<double>(frame_offset_samples);
    const double end_sample = seg.end_seconds * sample_rate - static_cast<double>(frame_offset_samples);
    // first frame whose start sample >= segment start, last with start <= end
    auto first = static_cast<long>(std::ceil(start_sample / static_cast<double>(hop)));
    auto last = static_cast<long>(std::floor(end_sample / static_cast<double>(hop)));
    first -= static_cast<long>(context_pad);
    last += static_cast<long>(context_pad);
    first = std::max<long>(first, 0);
    last = std::min<long>(last, static_cast<long>(frame_count) - 1);
    for (long f = first; f <= last; ++f) pattern.active[spk][static_cast<std::size_t>(f)] = true;
  }
  return pattern;
}

}  // namespace avtse
