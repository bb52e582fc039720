#include "avtse/mixsim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "avtse/fft.hpp"
#include "json.hpp"

namespace avtse {

namespace {

constexpr double kActiveRel = 1e-6;

std::vector<bool> active_samples(const Waveform& target) {
  double peak = 0.0;
  for (const auto& ch : target.samples)
    for (double v : ch) peak = std::max(peak, std::abs(v));
  std::vector<bool> active(target.length(), false);
  const double thr = kActiveRel * peak;
  for (std::size_t i = 0; i < target.length(); ++i)
    for (std::size_t c = 0; c < target.channels(); ++c)
      if (std::abs(target.channel(c)[i]) > thr) {
        active[i] = true;
        break;
      }
  return active;
}

double mean_power(const Waveform& w, const std::vector<bool>& mask) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < w.length(); ++i) {
    if (!mask[i]) continue;
    for (std::size_t c = 0; c < w.channels(); ++c) sum += w.channel(c)[i] * w.channel(c)[i];
    ++count;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count * w.channels());
}

Waveform cyclic_extend(const Waveform& noise, std::size_t length) {
  Waveform out(noise.channels(), length, noise.sample_rate);
  for (std::size_t c = 0; c < noise.channels(); ++c)
    for (std::size_t i = 0; i < length; ++i)
      out.channel(c)[i] = noise.channel(c)[i % noise.length()];
  return out;
}

// Uniform double in [0,1) from the top 53 bits.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

MixResult mix_at_snr(const Waveform& target, const Waveform& noise, double snr_db) {
  target.validate();
  noise.validate();
  if (target.channels() != noise.channels())
    throw std::invalid_argument("mix_at_snr: channel count mismatch");
  if (noise.length() == 0) throw std::invalid_argument("mix_at_snr: empty noise");

  const Waveform noise_full =
      noise.length() >= target.length() ? noise : cyclic_extend(noise, target.length());

  const auto mask = active_samples(target);
  const double p_target = mean_power(target, mask);
  if (p_target <= 0.0) throw std::invalid_argument("mix_at_snr: silent target");
  std::vector<bool> mask_cropped(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(target.length()));
  Waveform noise_crop(noise.channels(), target.length(), noise.sample_rate);
  for (std::size_t c = 0; c < noise.channels(); ++c)
    std::copy_n(noise_full.channel(c).begin(), target.length(), noise_crop.channel(c).begin());
  const double p_noise = mean_power(noise_crop, mask_cropped);
  if (p_noise <= 0.0) throw std::invalid_argument("mix_at_snr: silent noise over target-active span");

  const double scale = std::sqrt(p_target / (p_noise * std::pow(10.0, snr_db / 10.0)));

  MixResult result;
  result.noise_scale = scale;
  result.scaled_noise = noise_crop;
  result.mixture = target;
  for (std::size_t c = 0; c < target.channels(); ++c)
    for (std::size_t i = 0; i < target.length(); ++i) {
      result.scaled_noise.channel(c)[i] *= scale;
      result.mixture.channel(c)[i] += result.scaled_noise.channel(c)[i];
    }
  return result;
}

std::vector<Waveform> quality_gate(const std::vector<Waveform>& segments,
                                   const SegmentScorer& scorer, double threshold) {
  std::vector<Waveform> kept;
  for (const auto& seg : segments)
    if (scorer(seg) >= threshold) kept.push_back(seg);
  return kept;
}

double snr_proxy_score(const Waveform& segment) {
  const std::size_t frame = 400;  // 25 ms at 16 kHz
  const auto& x = segment.channel(0);
  if (x.size() < frame) return 0.0;
  std::vector<double> powers;
  double total = 0.0;
  for (std::size_t start = 0; start + frame <= x.size(); start += frame) {
    double p = 0.0;
    for (std::size_t i = 0; i < frame; ++i) p += x[start + i] * x[start + i];
    powers.push_back(p / frame);
    total += p / frame;
  }
  std::sort(powers.begin(), powers.end());
  const std::size_t n_quiet = std::max<std::size_t>(1, powers.size() / 10);
  double quiet = 0.0;
  for (std::size_t i = 0; i < n_quiet; ++i) quiet += powers[i];
  quiet /= static_cast<double>(n_quiet);
  const double mean = total / static_cast<double>(powers.size());
  if (quiet <= 0.0) return 100.0;
  return std::min(100.0, 10.0 * std::log10(mean / quiet));
}

SimulatedMixture build_training_example(
    const std::vector<std::vector<Waveform>>& speaker_segments,
    const std::vector<Waveform>& noise_pool, const SimConfig& cfg, std::uint64_t seed) {
  if (speaker_segments.empty())
    throw std::invalid_argument("build_training_example: need at least one speaker");
  if (noise_pool.empty()) throw std::invalid_argument("build_training_example: empty noise pool");
  cfg.room.validate();
  cfg.array.validate();

  const auto session_len =
      static_cast<std::size_t>(std::llround(cfg.session_seconds * kSampleRate));
  std::mt19937_64 rng(seed);

  SimulatedMixture mix;
  mix.seed = seed;
  mix.snr_db = cfg.snr_db;
  mix.room = cfg.room;
  mix.mixture = Waveform(cfg.array.mic_positions.size(), session_len);

  auto random_position = [&]() -> Vec3 {
    const double margin = 0.3;
    Vec3 p;
    for (std::size_t i = 0; i < 3; ++i) {
      const double span = std::max(cfg.room.dimensions[i] - 2.0 * margin, 0.1);
      p[i] = margin + unit_uniform(rng) * span;
    }
    return p;
  };

  Waveform speech_sum(cfg.array.mic_positions.size(), session_len);
  for (std::size_t spk = 0; spk < speaker_segments.size(); ++spk) {
    // Sequential non-overlapping placement within the speaker's own track;
    // overlap across speakers is allowed and expected.
    std::size_t total = 0;
    for (const auto& seg : speaker_segments[spk]) {
      if (seg.channels() != 1)
        throw std::invalid_argument("build_training_example: segments must be single-channel");
      total += seg.length();
    }
    if (total > session_len)
      throw std::invalid_argument("build_training_example: segments longer than session for speaker " +
                                  std::to_string(spk));

    std::vector<double> dry(session_len, 0.0);
    std::size_t cursor = 0;
    std::size_t slack = session_len - total;
    const std::size_t n_segs = speaker_segments[spk].size();
    for (std::size_t s = 0; s < n_segs; ++s) {
      const auto& seg = speaker_segments[spk][s];
      const std::size_t gap = slack == 0 ? 0 : rng() % (slack / (n_segs - s) + 1);
      const std::size_t start = cursor + gap;
      slack -= gap;
      for (std::size_t i = 0; i < seg.length(); ++i) dry[start + i] += seg.channel(0)[i];
      mix.placements.push_back({spk, start, seg.length()});
      cursor = start + seg.length();
    }

    const Vec3 pos = random_position();
    const auto rirs = simulate_rir(cfg.room, pos, cfg.array);
    Waveform image(cfg.array.mic_positions.size(), session_len);
    for (std::size_t m = 0; m < rirs.size(); ++m) {
      const auto conv = fft_convolve(dry, rirs[m]);
      for (std::size_t i = 0; i < session_len && i < conv.size(); ++i) image.channel(m)[i] = conv[i];
    }
    mix.clean_refs.push_back(image.mono(cfg.reference_channel));
    mix.speaker_images.push_back(image);
    for (std::size_t m = 0; m < image.channels(); ++m)
      for (std::size_t i = 0; i < session_len; ++i)
        speech_sum.channel(m)[i] += image.channel(m)[i];
  }

  // Noise: cyclically tiled, optionally rendered as a point source in the room.
  const Waveform& raw_noise = noise_pool[rng() % noise_pool.size()];
  Waveform noise_track = cyclic_extend(raw_noise.mono(0), session_len);
  Waveform noise_multi(cfg.array.mic_positions.size(), session_len);
  if (cfg.noise_as_point_source) {
    const Vec3 pos = random_position();
    const auto rirs = simulate_rir(cfg.room, pos, cfg.array);
    for (std::size_t m = 0; m < rirs.size(); ++m) {
      const auto conv = fft_convolve(noise_track.channel(0), rirs[m]);
      for (std::size_t i = 0; i < session_len && i < conv.size(); ++i)
        noise_multi.channel(m)[i] = conv[i];
    }
  } else {
    for (std::size_t m = 0; m < noise_multi.channels(); ++m)
      noise_multi.channel(m) = noise_track.channel(0);
  }

  const MixResult mixed = mix_at_snr(speech_sum, noise_multi, cfg.snr_db);
  mix.mixture = mixed.mixture;
  mix.scaled_noise = mixed.scaled_noise;
  mix.noise_scale = mixed.noise_scale;

  const std::size_t hop = cfg.activity_hop;
  const std::size_t frames = (session_len + hop - 1) / hop;
  mix.activities.assign(speaker_segments.size(), std::vector<bool>(frames, false));
  for (const auto& p : mix.placements) {
    const std::size_t first = p.start_sample / hop;
    const std::size_t last = (p.start_sample + p.length - 1) / hop;
    for (std::size_t f = first; f <= last && f < frames; ++f) mix.activities[p.speaker][f] = true;
  }
  return mix;
}

std::string mixture_metadata_json(const SimulatedMixture& mix, const SimConfig& cfg) {
  nlohmann::json j;
  j["seed"] = mix.seed;
  j["snr_db"] = mix.snr_db;
  j["noise_scale"] = mix.noise_scale;
  j["session_seconds"] = cfg.session_seconds;
  j["room"] = {{"dimensions", mix.room.dimensions},
               {"absorption", mix.room.absorption},
               {"speed_of_sound", mix.room.speed_of_sound},
               {"max_reflection_order", mix.room.max_reflection_order}};
  j["placements"] = nlohmann::json::array();
  for (const auto& p : mix.placements)
    j["placements"].push_back(
        {{"speaker", p.speaker}, {"start_sample", p.start_sample}, {"length", p.length}});
  return j.dump(2);
}

}  // namespace avtse
