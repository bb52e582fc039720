#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "avtse/rir.hpp"
#include "avtse/waveform.hpp"

namespace avtse {

// Scales noise so 10 log10(P_target / P_noise) == snr_db, powers measured over
// target-active samples (max over channels above 1e-6 of the target peak).
// Noise shorter than the target is extended cyclically.
struct MixResult {
  Waveform mixture;
  Waveform scaled_noise;
  double noise_scale = 0.0;
};
MixResult mix_at_snr(const Waveform& target, const Waveform& noise, double snr_db);

using SegmentScorer = std::function<double(const Waveform&)>;

// Keeps segments with score >= threshold, order preserved.
std::vector<Waveform> quality_gate(const std::vector<Waveform>& segments,
                                   const SegmentScorer& scorer, double threshold);

// Ratio (dB) of overall mean power to the mean power of the quietest 10% of
// 25 ms frames. A stand-in for neural overall-quality scoring.
double snr_proxy_score(const Waveform& segment);

struct PlacedSegment {
  std::size_t speaker = 0;
  std::size_t start_sample = 0;
  std::size_t length = 0;
};

struct SimulatedMixture {
  Waveform mixture;                  // 6 channels
  std::vector<Waveform> clean_refs;  // per-speaker reverberant image at the reference mic
  std::vector<Waveform> speaker_images;  // per-speaker 6-channel reverberant images
  Waveform scaled_noise;             // the noise actually added, post scaling
  std::vector<std::vector<bool>> activities;  // [speaker][frame]
  std::vector<PlacedSegment> placements;
  double snr_db = 0.0;
  double noise_scale = 0.0;
  std::uint64_t seed = 0;
  RoomSpec room;
};

struct SimConfig {
  RoomSpec room;
  ArrayGeometry array;
  double session_seconds = 4.0;
  double snr_db = 5.0;
  std::size_t activity_hop = 256;  // frame hop for the recorded activity pattern
  bool noise_as_point_source = true;
  std::size_t reference_channel = 0;
};

// Places each speaker's segments at seeded random offsets, convolves with a
// per-speaker room impulse response, and mixes with noise at the requested
// SNR. Deterministic given the seed.
SimulatedMixture build_training_example(
    const std::vector<std::vector<Waveform>>& speaker_segments,
    const std::vector<Waveform>& noise_pool, const SimConfig& cfg, std::uint64_t seed);

// Sidecar metadata describing a simulated mixture (JSON).
std::string mixture_metadata_json(const SimulatedMixture& mix, const SimConfig& cfg);

}  // namespace avtse
