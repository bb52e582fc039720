// Release gate: every check below must pass. Each prints one line.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "avtse/beamform.hpp"
#include "avtse/cacgmm.hpp"
#include "avtse/evalkit.hpp"
#include "avtse/gss.hpp"
#include "avtse/masks.hpp"
#include "avtse/mixsim.hpp"
#include "avtse/pipeline.hpp"
#include "avtse/sisnr.hpp"
#include "avtse/stft.hpp"
#include "avtse/wavio.hpp"

using namespace avtse;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void run(const std::string& name, const std::function<bool()>& check) {
  bool ok = false;
  std::string detail;
  try {
    ok = check();
  } catch (const std::exception& e) {
    detail = std::string(" (") + e.what() + ")";
  }
  std::printf("%s %s%s\n", ok ? "[PASS]" : "[FAIL]", name.c_str(), detail.c_str());
  if (!ok) ++g_failures;
}

Waveform speechish(std::size_t length, std::uint64_t seed) {
  Waveform w(1, length);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (std::size_t i = 0; i < length; ++i) {
    const double t = static_cast<double>(i) / kSampleRate;
    w.channel(0)[i] =
        0.3 * std::sin(2.0 * std::numbers::pi * (220.0 + 180.0 * std::fmod(3.1 * t, 1.0)) * t) *
            (0.4 + 0.6 * std::pow(std::sin(2.0 * std::numbers::pi * 2.5 * t), 2.0)) +
        0.02 * dist(rng);
  }
  return w;
}

// Distance-only Levenshtein, independent of the library's aligner.
std::int64_t brute_levenshtein(const std::vector<std::uint32_t>& a,
                               const std::vector<std::uint32_t>& b) {
  std::vector<std::int64_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<std::int64_t>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<std::int64_t>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::int64_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Exhaustive CTC: sum the probability of every frame labeling that collapses
// to the target.
double brute_ctc(const PosteriorMatrix& post, const std::vector<int>& target) {
  const auto frames = static_cast<std::size_t>(post.log_probs.rows());
  const auto vocab = static_cast<std::size_t>(post.log_probs.cols());
  double total = 0.0;
  std::vector<int> path(frames, 0);
  while (true) {
    std::vector<int> collapsed;
    for (std::size_t t = 0; t < frames; ++t) {
      if (t > 0 && path[t] == path[t - 1]) continue;
      if (path[t] != post.blank) collapsed.push_back(path[t]);
    }
    if (collapsed == target) {
      double lp = 0.0;
      for (std::size_t t = 0; t < frames; ++t)
        lp += post.log_probs(static_cast<Eigen::Index>(t), path[t]);
      total += std::exp(lp);
    }
    std::size_t pos = 0;
    while (pos < frames && path[pos] == static_cast<int>(vocab) - 1) path[pos++] = 0;
    if (pos == frames) break;
    ++path[pos];
  }
  return total == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(total);
}

PosteriorMatrix random_posteriors(std::size_t frames, std::size_t vocab, std::mt19937_64& rng) {
  PosteriorMatrix post;
  post.log_probs.resize(static_cast<Eigen::Index>(frames), static_cast<Eigen::Index>(vocab));
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  for (std::size_t t = 0; t < frames; ++t) {
    double sum = 0.0;
    std::vector<double> p(vocab);
    for (auto& v : p) sum += (v = dist(rng));
    for (std::size_t k = 0; k < vocab; ++k)
      post.log_probs(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) =
          std::log(p[k] / sum);
  }
  return post;
}

ComplexSpectrogram random_multichannel(std::size_t channels, std::size_t frames, std::size_t freqs,
                                       std::uint64_t seed) {
  ComplexSpectrogram spec;
  spec.config = StftConfig{};
  spec.bins.resize(channels);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (auto& ch : spec.bins) {
    ch.assign(frames, std::vector<std::complex<double>>(freqs));
    for (auto& frame : ch)
      for (auto& bin : frame) bin = std::complex<double>(dist(rng), dist(rng));
  }
  return spec;
}

double pearson(const Mask& x, const Mask& y) {
  const double mx = x.mean(), my = y.mean();
  const auto dx = (x.array() - mx).eval(), dy = (y.array() - my).eval();
  return (dx * dy).sum() / std::sqrt((dx * dx).sum() * (dy * dy).sum());
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Session {
  SimulatedMixture mix;
  std::vector<DiarizationSegment> segments;
};

Session make_session(std::uint64_t seed) {
  SimConfig sim;
  sim.room.max_reflection_order = 1;
  sim.room.set_uniform_absorption(0.7);
  sim.array = circular_array_6({2.5, 2.0, 1.2});
  sim.session_seconds = 2.5;
  sim.snr_db = 10.0;
  std::vector<std::vector<Waveform>> speakers{{speechish(14400, seed * 17 + 1)},
                                              {speechish(14400, seed * 17 + 2)}};
  std::vector<Waveform> noise{speechish(16000, seed * 17 + 3)};
  Session s;
  s.mix = build_training_example(speakers, noise, sim, seed);
  for (const auto& p : s.mix.placements)
    s.segments.push_back({p.speaker == 0 ? "s1" : "s2",
                          static_cast<double>(p.start_sample) / kSampleRate,
                          static_cast<double>(p.start_sample + p.length) / kSampleRate});
  return s;
}

bool check_cer_row_sums() {
  // pooled error rates over N=1000 reference characters per row
  const struct {
    std::int64_t s, d, i;
    double expect;
  } rows[] = {{310, 72, 48, 43.0}, {200, 42, 22, 26.4}, {198, 47, 18, 26.3}};
  for (const auto& row : rows) {
    const ErrorCounts counts{row.s, row.d, row.i, 1000};
    if (std::abs(cer(counts) - row.expect) > 0.05) return false;
  }
  return true;
}

bool check_edit_distance_oracle() {
  std::mt19937_64 rng(1001);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<std::uint32_t> ref(rng() % 11), hyp(rng() % 11);
    for (auto& c : ref) c = static_cast<std::uint32_t>('a' + rng() % 4);
    for (auto& c : hyp) c = static_cast<std::uint32_t>('a' + rng() % 4);
    const ErrorCounts counts = align_and_count(ref, hyp);
    if (counts.total_errors() != brute_levenshtein(ref, hyp)) return false;
    if (counts.ref_length != static_cast<std::int64_t>(ref.size())) return false;
  }
  return true;
}

bool check_ctc_brute_force() {
  std::mt19937_64 rng(1002);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t frames = 1 + rng() % 6;
    const std::size_t vocab = 2 + rng() % 3;  // blank + up to 3 labels
    const auto post = random_posteriors(frames, vocab, rng);
    std::vector<int> target(rng() % 4);
    for (auto& t : target) t = 1 + static_cast<int>(rng() % (vocab - 1));
    const double got = ctc_log_prob(post, target);
    const double want = brute_ctc(post, target);
    if (std::isinf(want) != std::isinf(got)) return false;
    if (!std::isinf(want) && std::abs(got - want) > 1e-9) return false;
  }
  return true;
}

bool check_mtl_combination() {
  if (std::abs(mtl_loss(-2.0, -1.0, 0.3) - (-1.3)) > 1e-12) return false;
  if (std::abs(mtl_loss(-5.0, -7.0, 0.0) - (-7.0)) > 1e-12) return false;
  if (std::abs(mtl_loss(-5.0, -7.0, 1.0) - (-5.0)) > 1e-12) return false;
  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> dist(-20.0, 0.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = dist(rng), b = dist(rng), l = unit(rng);
    if (std::abs(mtl_loss(a, b, l) - (l * a + (1.0 - l) * b)) > 1e-12) return false;
  }
  return true;
}

bool check_stft_round_trip() {
  const StftConfig configs[] = {{512, 256, WindowType::Hann},
                                {512, 128, WindowType::SqrtHann},
                                {256, 128, WindowType::Hann}};
  std::mt19937_64 rng(1004);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t length = 1000 + rng() % 4000;
    Waveform x(1, length);
    for (auto& v : x.channel(0)) v = dist(rng);
    for (const auto& cfg : configs) {
      const Waveform back = istft(stft(x, cfg), cfg, length);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < length; ++i) {
        num += std::pow(back.channel(0)[i] - x.channel(0)[i], 2.0);
        den += x.channel(0)[i] * x.channel(0)[i];
      }
      if (std::sqrt(num / den) >= 1e-6) return false;
    }
  }
  return true;
}

bool check_irm_ceiling() {
  const StftConfig cfg{};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Waveform clean = speechish(12000, 2000 + seed);
    Waveform noise(1, 12000);
    std::mt19937_64 rng(3000 + seed);
    std::normal_distribution<double> dist(0.0, 0.3);
    for (auto& v : noise.channel(0)) v = dist(rng);
    const MixResult mix = mix_at_snr(clean, noise, 0.0);
    const Mask irm = ideal_ratio_mask(stft(clean, cfg), stft(mix.scaled_noise, cfg));
    const Waveform enhanced = istft(apply_mask(stft(mix.mixture, cfg), irm), cfg, 12000);
    const double gain = si_snr(enhanced, clean) - si_snr(mix.mixture, clean);
    if (gain < 5.0) return false;
  }
  return true;
}

bool check_em_monotonic() {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto spec = random_multichannel(4, 40, 8, 4000 + seed);
    const std::vector<DiarizationSegment> segs{{"a", 0.0, 0.35}, {"b", 0.25, 0.64}};
    const auto pattern = activities_from_segments(segs, {"a", "b"}, 40, 256, kSampleRate, 1, 0);
    const auto result = cacgmm_em(spec, pattern, 20);
    const auto& trace = result.state.log_likelihood_trace;
    for (std::size_t i = 1; i < trace.size(); ++i)
      if (trace[i] < trace[i - 1] - 1e-6) return false;
  }
  return true;
}

bool check_gss_end_to_end() {
  GssConfig cfg;
  std::vector<double> gains, correlations;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Session sess = make_session(seed);
    for (std::size_t spk = 0; spk < 2; ++spk) {
      const std::string id = spk == 0 ? "s1" : "s2";
      GssIntermediates inter;
      const Waveform out = gss_enhance(sess.mix.mixture, sess.segments, id, cfg, &inter);
      const double before = si_snr(sess.mix.mixture.mono(0), sess.mix.clean_refs[spk]);
      const double after = si_snr(out, sess.mix.clean_refs[spk]);
      gains.push_back(after - before);

      Waveform others(1, sess.mix.mixture.length());
      for (std::size_t i = 0; i < others.length(); ++i)
        others.channel(0)[i] =
            sess.mix.mixture.channel(0)[i] - sess.mix.clean_refs[spk].channel(0)[i];
      const Mask irm =
          ideal_ratio_mask(stft(sess.mix.clean_refs[spk], cfg.stft), stft(others, cfg.stft));
      correlations.push_back(pearson(inter.cacgmm.masks[inter.target_class], irm));
    }
  }
  std::printf("       gss median gain %.2f dB, median mask correlation %.3f\n",
              median(gains), median(correlations));
  return median(gains) >= 5.0 &&
         *std::min_element(correlations.begin(), correlations.end()) > 0.7;
}

bool check_mvdr_distortionless() {
  std::mt19937_64 rng(1005);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXcd d(6);
    for (Eigen::Index i = 0; i < 6; ++i) d(i) = std::complex<double>(dist(rng), dist(rng));
    SpatialCovariance target, noise;
    target.matrices = {d * d.adjoint()};
    target.mask_weight_sum = {1.0};
    noise.matrices = {Eigen::MatrixXcd::Identity(6, 6)};
    noise.mask_weight_sum = {1.0};
    const auto w = mvdr_weights(target, noise, 0);
    const std::complex<double> response = w[0].adjoint() * d;
    if (std::abs(response - d(0)) >= 1e-8) return false;
  }
  return true;
}

bool check_pipeline_determinism() {
  const fs::path dir = fs::temp_directory_path() / "avtse_acceptance" / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const Session sess = make_session(42);
  const std::string wav_path = (dir / "session.wav").string();
  write_wav(wav_path, sess.mix.mixture, WavFormat::Float32);

  SessionManifest manifest;
  manifest.session_id = "A01";
  manifest.audio_path = wav_path;
  manifest.speakers = {"s1", "s2"};
  for (const auto& seg : sess.segments)
    manifest.segments.push_back({seg.speaker, seg.start_seconds, seg.end_seconds, std::nullopt});

  RunConfig cfg;
  cfg.gss.iterations = 10;
  cfg.segment_context_seconds = 0.5;
  if (run_extraction(manifest, cfg, (dir / "run_a").string()).failures != 0) return false;
  if (run_extraction(manifest, cfg, (dir / "run_b").string()).failures != 0) return false;

  // compare the two trees file by file, byte for byte
  std::vector<fs::path> rel_paths;
  for (const auto& entry : fs::recursive_directory_iterator(dir / "run_a"))
    if (entry.is_regular_file()) rel_paths.push_back(fs::relative(entry.path(), dir / "run_a"));
  if (rel_paths.empty()) return false;
  for (const auto& rel : rel_paths) {
    std::ifstream fa(dir / "run_a" / rel, std::ios::binary);
    std::ifstream fb(dir / "run_b" / rel, std::ios::binary);
    if (!fa || !fb) return false;
    const std::string da((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    const std::string db((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    if (da != db) return false;
  }
  return true;
}

bool check_snr_fidelity() {
  for (int snr = -10; snr <= 20; snr += 5) {
    const Waveform target = speechish(16000, 5000 + static_cast<std::uint64_t>(snr + 10));
    const Waveform noise = speechish(20000, 6000 + static_cast<std::uint64_t>(snr + 10));
    const MixResult mix = mix_at_snr(target, noise, snr);

    // re-measure over target-active samples, the definition of the ratio
    double peak = 0.0;
    for (double v : target.channel(0)) peak = std::max(peak, std::abs(v));
    double ps = 0.0, pn = 0.0;
    for (std::size_t i = 0; i < target.length(); ++i) {
      if (std::abs(target.channel(0)[i]) <= 1e-6 * peak) continue;
      ps += target.channel(0)[i] * target.channel(0)[i];
      pn += mix.scaled_noise.channel(0)[i] * mix.scaled_noise.channel(0)[i];
    }
    if (std::abs(10.0 * std::log10(ps / pn) - snr) > 0.01) return false;
  }
  return true;
}

}  // namespace

int main() {
  run("cer row sums match the published error breakdowns", check_cer_row_sums);
  run("edit distance agrees with brute force on 10000 pairs", check_edit_distance_oracle);
  run("ctc forward agrees with exhaustive path enumeration", check_ctc_brute_force);
  run("mtl loss is the exact lambda combination", check_mtl_combination);
  run("stft round trip below 1e-6 relative error", check_stft_round_trip);
  run("oracle irm gains at least 5 dB on 50 mixtures", check_irm_ceiling);
  run("cacgmm em log-likelihood is monotonic on 20 inputs", check_em_monotonic);
  run("gss improves targets by 5 dB median with faithful masks", check_gss_end_to_end);
  run("mvdr response to the target steering vector is distortionless", check_mvdr_distortionless);
  run("extraction runs are bit-identical given the same seed", check_pipeline_determinism);
  run("mixing snr is accurate to 0.01 dB from -10 to +20", check_snr_fidelity);

  if (g_failures == 0) {
    std::printf("all acceptance checks passed\n");
    return 0;
  }
  std::printf("%d acceptance check(s) failed\n", g_failures);
  return 1;
}
