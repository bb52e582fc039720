#include "avtse/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "avtse/gss.hpp"
#include "avtse/wavio.hpp"
#include "json.hpp"

namespace avtse {

namespace {

Waveform crop(const Waveform& wave, std::size_t start, std::size_t end) {
  Waveform out(wave.channels(), end - start, wave.sample_rate);
  for (std::size_t c = 0; c < wave.channels(); ++c)
    for (std::size_t i = start; i < end; ++i) out.channel(c)[i - start] = wave.channel(c)[i];
  return out;
}

struct Job {
  std::size_t record_index;
  std::string speaker;
  std::size_t segment_index;
  double start_seconds;
  double end_seconds;
};

}  // namespace

ExtractionResult run_extraction(const SessionManifest& manifest, const RunConfig& config,
                                const std::string& out_dir) {
  const Waveform audio = read_wav(manifest.audio_path);
  if (audio.sample_rate != kSampleRate)
    throw std::runtime_error("run_extraction: expected " + std::to_string(kSampleRate) +
                             " Hz audio, got " + std::to_string(audio.sample_rate) +
                             " Hz (resampling is not supported)");

  std::filesystem::create_directories(std::filesystem::path(out_dir) / manifest.session_id);

  // Target rotation: every speaker is enhanced in turn, over their segments.
  std::vector<Job> jobs;
  ExtractionResult result;
  for (const auto& speaker : manifest.speakers) {
    std::size_t idx = 0;
    for (const auto& seg : manifest.segments) {
      if (seg.speaker != speaker) continue;
      Job job;
      job.record_index = result.records.size();
      job.speaker = speaker;
      job.segment_index = idx++;
      job.start_seconds = seg.start_seconds;
      job.end_seconds = seg.end_seconds;
      jobs.push_back(job);
      result.records.push_back({speaker, job.segment_index, seg.start_seconds, seg.end_seconds, "", ""});
    }
  }

  auto run_job = [&](const Job& job) {
    ExtractionRecord& record = result.records[job.record_index];
    try {
      const auto len = audio.length();
      const auto seg_start = static_cast<std::size_t>(std::llround(job.start_seconds * kSampleRate));
      const auto seg_end =
          std::min(len, static_cast<std::size_t>(std::llround(job.end_seconds * kSampleRate)));
      const auto ctx = static_cast<std::size_t>(
          std::llround(config.segment_context_seconds * kSampleRate));
      const std::size_t win_start = seg_start > ctx ? seg_start - ctx : 0;
      const std::size_t win_end = std::min(len, seg_end + ctx);

      Waveform enhanced;
      if (config.stage == PipelineStage::Passthrough) {
        enhanced = crop(audio.mono(config.gss.ref_channel), seg_start, seg_end);
      } else {
        const Waveform window = crop(audio, win_start, win_end);
        // All speakers' segments overlapping the window guide the separation.
        std::vector<DiarizationSegment> guide;
        const double w0 = static_cast<double>(win_start) / kSampleRate;
        const double w1 = static_cast<double>(win_end) / kSampleRate;
        for (const auto& seg : manifest.segments) {
          if (seg.end_seconds <= w0 || seg.start_seconds >= w1) continue;
          guide.push_back({seg.speaker, std::max(seg.start_seconds, w0) - w0,
                           std::min(seg.end_seconds, w1) - w0});
        }
        const Waveform out = gss_enhance(window, guide, job.speaker, config.gss);
        enhanced = crop(out, seg_start - win_start, seg_end - win_start);
      }

      std::ostringstream name;
      name << manifest.session_id << "_" << job.speaker << "_" << std::setw(3)
           << std::setfill('0') << job.segment_index << ".wav";
      const auto dir = std::filesystem::path(out_dir) / manifest.session_id / job.speaker;
      std::filesystem::create_directories(dir);
      const std::string path = (dir / name.str()).string();
      write_wav(path, enhanced, WavFormat::Float32);
      record.output_path = path;
    } catch (const std::exception& e) {
      record.error = e.what();
    }
  };

  const int jobs_n = std::max(1, config.jobs);
  if (jobs_n == 1) {
    for (const auto& job : jobs) run_job(job);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs_n; ++w)
      workers.emplace_back([&]() {
        for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1))
          run_job(jobs[i]);
      });
    for (auto& t : workers) t.join();
  }

  for (const auto& r : result.records)
    if (!r.error.empty()) ++result.failures;

  nlohmann::json meta;
  meta["session_id"] = manifest.session_id;
  meta["config"] = nlohmann::json::parse(config.to_json());
  meta["failures"] = result.failures;
  meta["records"] = nlohmann::json::array();
  for (const auto& r : result.records) {
    // paths go into the metadata relative to out_dir so two runs into
    // different directories produce identical trees
    std::string rel = r.output_path;
    if (!rel.empty())
      rel = std::filesystem::relative(rel, out_dir).generic_string();
    meta["records"].push_back({{"speaker", r.speaker},
                               {"segment_index", r.segment_index},
                               {"start_seconds", r.start_seconds},
                               {"end_seconds", r.end_seconds},
                               {"output", rel},
                               {"error", r.error}});
  }
  std::ofstream meta_out(std::filesystem::path(out_dir) / manifest.session_id / "metadata.json");
  meta_out << meta.dump(2) << "\n";
  return result;
}

}  // namespace avtse
