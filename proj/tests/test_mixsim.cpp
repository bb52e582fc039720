#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "avtse/mixsim.hpp"
#include "avtse/rir.hpp"

using namespace avtse;

namespace {

double distance(const Vec3& a, const Vec3& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                   (a[2] - b[2]) * (a[2] - b[2]));
}

Waveform speechish(std::size_t length, std::uint64_t seed) {
  Waveform w(1, length);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 0.2);
  for (std::size_t i = 0; i < length; ++i) {
    const double t = static_cast<double>(i) / kSampleRate;
    w.channel(0)[i] = 0.3 * std::sin(2.0 * std::numbers::pi * (300.0 + 40.0 * t) * t) + dist(rng) * 0.1;
  }
  return w;
}

// Brute-force 3-D image enumeration, written independently of the library.
struct OracleImage {
  double delay_samples;
  double amplitude;
};
std::vector<OracleImage> enumerate_images(const RoomSpec& room, const Vec3& src, const Vec3& mic) {
  std::vector<OracleImage> images;
  const int order = room.max_reflection_order;
  const double beta = std::sqrt(1.0 - room.absorption[0]);
  for (int qx = 0; qx <= 1; ++qx)
    for (int qy = 0; qy <= 1; ++qy)
      for (int qz = 0; qz <= 1; ++qz)
        for (int nx = -order; nx <= order; ++nx)
          for (int ny = -order; ny <= order; ++ny)
            for (int nz = -order; nz <= order; ++nz) {
              const int refl = std::abs(nx - qx) + std::abs(nx) + std::abs(ny - qy) + std::abs(ny) +
                               std::abs(nz - qz) + std::abs(nz);
              if (refl > order) continue;
              const Vec3 pos{(1 - 2 * qx) * src[0] + 2.0 * nx * room.dimensions[0],
                             (1 - 2 * qy) * src[1] + 2.0 * ny * room.dimensions[1],
                             (1 - 2 * qz) * src[2] + 2.0 * nz * room.dimensions[2]};
              const double dist = distance(pos, mic);
              images.push_back({dist / room.speed_of_sound * kSampleRate,
                                std::pow(beta, refl) / (4.0 * std::numbers::pi * dist)});
            }
  return images;
}

}  // namespace

TEST_CASE("order-0 rir is a single free-field impulse") {
  RoomSpec room;
  room.max_reflection_order = 0;
  const Vec3 src{1.0, 1.0, 1.0};
  const ArrayGeometry mics = circular_array_6({3.0, 2.0, 1.5});
  const auto rirs = simulate_rir(room, src, mics);
  REQUIRE(rirs.size() == 6);
  for (std::size_t m = 0; m < 6; ++m) {
    const double d = distance(src, mics.mic_positions[m]);
    const auto expect_delay = static_cast<std::size_t>(std::llround(d / 343.0 * kSampleRate));
    std::size_t nonzero = 0, pos = 0;
    for (std::size_t i = 0; i < rirs[m].size(); ++i)
      if (rirs[m][i] != 0.0) {
        ++nonzero;
        pos = i;
      }
    CHECK(nonzero == 1);
    CHECK(pos == expect_delay);
    CHECK(rirs[m][pos] == doctest::Approx(1.0 / (4.0 * std::numbers::pi * d)).epsilon(1e-12));
  }
}

TEST_CASE("doubling the distance halves the order-0 amplitude") {
  RoomSpec room{{20.0, 20.0, 10.0}, {}, 343.0, 0};
  room.set_uniform_absorption(0.4);
  ArrayGeometry near, far;
  for (int i = 0; i < 6; ++i) {
    near.mic_positions.push_back({3.0, 2.0, 2.0});
    far.mic_positions.push_back({5.0, 2.0, 2.0});
  }
  const Vec3 src{1.0, 2.0, 2.0};  // distances 2 m and 4 m
  const auto rir_near = simulate_rir(room, src, near);
  const auto rir_far = simulate_rir(room, src, far);
  auto peak = [](const std::vector<double>& h) {
    double p = 0.0;
    for (double v : h) p = std::max(p, std::abs(v));
    return p;
  };
  CHECK(peak(rir_far[0]) == doctest::Approx(peak(rir_near[0]) / 2.0).epsilon(1e-12));
}

TEST_CASE("order-2 rir matches the brute-force image enumeration oracle") {
  RoomSpec room{{4.0, 3.0, 2.5}, {}, 343.0, 2};
  room.set_uniform_absorption(0.5);
  const Vec3 src{1.2, 1.1, 1.0};
  ArrayGeometry mics;
  for (int i = 0; i < 6; ++i) mics.mic_positions.push_back({2.5, 1.9, 1.3});
  const auto rirs = simulate_rir(room, src, mics);

  const auto oracle = enumerate_images(room, src, mics.mic_positions[0]);
  std::vector<double> expected(rirs[0].size(), 0.0);
  for (const auto& img : oracle) {
    const auto tap = static_cast<std::size_t>(std::llround(img.delay_samples));
    REQUIRE(tap < expected.size());
    expected[tap] += img.amplitude;
  }
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(rirs[0][i] == doctest::Approx(expected[i]).epsilon(1e-9));
}

TEST_CASE("rir energy does not increase with absorption") {
  const Vec3 src{1.0, 1.5, 1.2};
  ArrayGeometry mics;
  for (int i = 0; i < 6; ++i) mics.mic_positions.push_back({3.5, 2.5, 1.4});
  double prev = std::numeric_limits<double>::infinity();
  for (double absorption : {0.2, 0.4, 0.6, 0.8}) {
    RoomSpec room;
    room.max_reflection_order = 6;
    room.set_uniform_absorption(absorption);
    const auto rirs = simulate_rir(room, src, mics);
    double energy = 0.0;
    for (double v : rirs[0]) energy += v * v;
    CHECK(energy <= prev + 1e-15);
    prev = energy;
  }
}

TEST_CASE("rir rejects positions outside the room") {
  RoomSpec room;
  const ArrayGeometry mics = circular_array_6({2.5, 2.0, 1.5});
  CHECK_THROWS_AS(simulate_rir(room, {9.0, 1.0, 1.0}, mics), std::invalid_argument);
}

TEST_CASE("mix_at_snr hits the requested ratio") {
  const Waveform target = speechish(16000, 1);
  const Waveform noise = speechish(16000, 2);

  auto measure = [](const Waveform& a, const Waveform& b) {
    double pa = 0.0, pb = 0.0;
    for (std::size_t i = 0; i < a.length(); ++i) {
      pa += a.channel(0)[i] * a.channel(0)[i];
      pb += b.channel(0)[i] * b.channel(0)[i];
    }
    return 10.0 * std::log10(pa / pb);
  };

  SUBCASE("0 dB equalizes power") {
    const auto mix = mix_at_snr(target, noise, 0.0);
    CHECK(std::abs(measure(target, mix.scaled_noise)) < 1e-3);
  }
  SUBCASE("+20 dB scales noise power down by 100") {
    const auto mix = mix_at_snr(target, noise, 20.0);
    CHECK(std::abs(measure(target, mix.scaled_noise) - 20.0) < 1e-3);
  }
  SUBCASE("-10 dB re-measures within 0.01 dB") {
    const auto mix = mix_at_snr(target, noise, -10.0);
    CHECK(std::abs(measure(target, mix.scaled_noise) + 10.0) < 0.01);
  }
  SUBCASE("mixture is exactly target plus scaled noise") {
    const auto mix = mix_at_snr(target, noise, 5.0);
    for (std::size_t i = 0; i < target.length(); ++i)
      CHECK(mix.mixture.channel(0)[i] ==
            target.channel(0)[i] + mix.scaled_noise.channel(0)[i]);
  }
  SUBCASE("silent inputs reject") {
    Waveform silence(1, 16000);
    CHECK_THROWS_AS(mix_at_snr(silence, noise, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(mix_at_snr(target, silence, 0.0), std::invalid_argument);
  }
  SUBCASE("short noise is extended cyclically") {
    const Waveform brief = speechish(4000, 3);
    const auto mix = mix_at_snr(target, brief, 0.0);
    CHECK(mix.mixture.length() == target.length());
  }
}

TEST_CASE("quality gate keeps exactly the segments above threshold") {
  std::vector<Waveform> segments{speechish(8000, 4), speechish(8000, 5), speechish(8000, 6)};
  auto scorer = [i = 0](const Waveform&) mutable { return static_cast<double>(i++); };  // 0,1,2
  CHECK(quality_gate(segments, scorer, -1.0).size() == 3);
  auto scorer2 = [i = 0](const Waveform&) mutable { return static_cast<double>(i++); };
  CHECK(quality_gate(segments, scorer2, 10.0).empty());
  auto scorer3 = [i = 0](const Waveform&) mutable { return static_cast<double>(i++); };
  const auto kept = quality_gate(segments, scorer3, 1.0);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].channel(0) == segments[1].channel(0));
}

TEST_CASE("snr proxy scorer separates clean from noisy segments") {
  // clean: bursts separated by silence; noisy: same plus constant noise floor
  Waveform clean(1, 16000);
  for (std::size_t i = 0; i < 8000; ++i)
    clean.channel(0)[i] = 0.5 * std::sin(2.0 * std::numbers::pi * 500.0 * i / kSampleRate);
  Waveform noisy = clean;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> dist(0.0, 0.1);
  for (auto& v : noisy.channel(0)) v += dist(rng);

  const double clean_score = snr_proxy_score(clean);
  const double noisy_score = snr_proxy_score(noisy);
  CHECK(clean_score > noisy_score);
  const auto kept = quality_gate({clean, noisy}, snr_proxy_score, (clean_score + noisy_score) / 2.0);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].channel(0) == clean.channel(0));
}

TEST_CASE("build_training_example: reconstruction, determinism, activities") {
  SimConfig cfg;
  cfg.room.max_reflection_order = 2;
  cfg.array = circular_array_6({2.5, 2.0, 1.2});
  cfg.session_seconds = 1.5;
  cfg.snr_db = 5.0;

  std::vector<std::vector<Waveform>> speakers{{speechish(8000, 11)}, {speechish(6000, 12)}};
  std::vector<Waveform> noise{speechish(16000, 13)};

  const auto mix = build_training_example(speakers, noise, cfg, 1234);
  REQUIRE(mix.mixture.channels() == 6);
  REQUIRE(mix.clean_refs.size() == 2);
  CHECK(mix.clean_refs[0].length() == mix.mixture.length());

  SUBCASE("mixture equals sum of images plus scaled noise to 1e-12") {
    for (std::size_t c = 0; c < 6; ++c)
      for (std::size_t i = 0; i < mix.mixture.length(); i += 37) {
        double sum = mix.scaled_noise.channel(c)[i];
        for (const auto& img : mix.speaker_images) sum += img.channel(c)[i];
        CHECK(std::abs(mix.mixture.channel(c)[i] - sum) < 1e-12);
      }
  }

  SUBCASE("same seed reproduces bit-identical output") {
    const auto again = build_training_example(speakers, noise, cfg, 1234);
    for (std::size_t c = 0; c < 6; ++c) CHECK(again.mixture.channel(c) == mix.mixture.channel(c));
    CHECK(again.placements.size() == mix.placements.size());
    const auto different = build_training_example(speakers, noise, cfg, 99);
    CHECK(different.mixture.channel(0) != mix.mixture.channel(0));
  }

  SUBCASE("activities cover exactly the placed spans") {
    for (const auto& p : mix.placements) {
      const std::size_t mid_frame = (p.start_sample + p.length / 2) / cfg.activity_hop;
      CHECK(mix.activities[p.speaker][mid_frame]);
    }
    // a frame well before any placement of a speaker is inactive
    for (std::size_t spk = 0; spk < 2; ++spk) {
      std::size_t first = mix.mixture.length();
      for (const auto& p : mix.placements)
        if (p.speaker == spk) first = std::min(first, p.start_sample);
      if (first > 2 * cfg.activity_hop) CHECK_FALSE(mix.activities[spk][0]);
    }
  }

  SUBCASE("oversized segments reject") {
    std::vector<std::vector<Waveform>> too_long{{speechish(40000, 14)}};
    CHECK_THROWS_AS(build_training_example(too_long, noise, cfg, 1), std::invalid_argument);
  }
}

TEST_CASE("single speaker order-0 room yields a delayed scaled copy") {
  SimConfig cfg;
  cfg.room.max_reflection_order = 0;
  cfg.array = circular_array_6({2.5, 2.0, 1.2});
  cfg.session_seconds = 1.0;
  cfg.snr_db = 60.0;  // noise contribution negligible but still present

  std::vector<std::vector<Waveform>> speakers{{speechish(16000, 15)}};
  std::vector<Waveform> noise{speechish(16000, 16)};
  const auto mix = build_training_example(speakers, noise, cfg, 7);

  // the clean reference is the order-0 image: one delay, one gain
  const auto& ref = mix.clean_refs[0];
  double peak = 0.0;
  for (double v : ref.channel(0)) peak = std::max(peak, std::abs(v));
  CHECK(peak > 0.0);
  // mixture at the reference channel is image + tiny noise
  double err = 0.0, sig = 0.0;
  for (std::size_t i = 0; i < ref.length(); ++i) {
    err += std::pow(mix.mixture.channel(0)[i] - ref.channel(0)[i] -
                        mix.scaled_noise.channel(0)[i], 2.0);
    sig += ref.channel(0)[i] * ref.channel(0)[i];
  }
  CHECK(err <= 1e-20 * std::max(sig, 1.0));
}

TEST_CASE("re-measured snr tracks the request across the grid") {
  SimConfig cfg;
  cfg.room.max_reflection_order = 1;
  cfg.array = circular_array_6({2.5, 2.0, 1.2});
  cfg.session_seconds = 1.0;

  std::vector<std::vector<Waveform>> speakers{{speechish(12000, 21)}};
  std::vector<Waveform> noise{speechish(16000, 22)};
  for (double snr : {-10.0, 0.0, 20.0}) {
    cfg.snr_db = snr;
    const auto mix = build_training_example(speakers, noise, cfg, 3);
    // re-measure over the same active-sample rule used by the mixer
    Waveform speech_sum(6, mix.mixture.length());
    for (std::size_t c = 0; c < 6; ++c)
      for (std::size_t i = 0; i < mix.mixture.length(); ++i)
        for (const auto& img : mix.speaker_images)
          speech_sum.channel(c)[i] += img.channel(c)[i];
    double peak = 0.0;
    for (const auto& ch : speech_sum.samples)
      for (double v : ch) peak = std::max(peak, std::abs(v));
    double ps = 0.0, pn = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < mix.mixture.length(); ++i) {
      bool active = false;
      for (std::size_t c = 0; c < 6 && !active; ++c)
        active = std::abs(speech_sum.channel(c)[i]) > 1e-6 * peak;
      if (!active) continue;
      ++count;
      for (std::size_t c = 0; c < 6; ++c) {
        ps += speech_sum.channel(c)[i] * speech_sum.channel(c)[i];
        pn += mix.scaled_noise.channel(c)[i] * mix.scaled_noise.channel(c)[i];
      }
    }
    REQUIRE(count > 0);
    CHECK(10.0 * std::log10(ps / pn) == doctest::Approx(snr).epsilon(0.001));
  }
}
