#include "avtse/manifest.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "avtse/wavio.hpp"
#include "json.hpp"

namespace avtse {

namespace {
std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

SessionManifest parse_manifest_json(const std::string& json_text, const std::string& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("manifest: malformed JSON: ") + e.what());
  }

  SessionManifest m;
  m.session_id = j.at("session_id").get<std::string>();
  m.audio_path = j.at("audio").get<std::string>();
  if (!base_dir.empty() && !std::filesystem::path(m.audio_path).is_absolute())
    m.audio_path = (std::filesystem::path(base_dir) / m.audio_path).string();
  m.speakers = j.at("speakers").get<std::vector<std::string>>();
  if (m.speakers.empty()) throw std::runtime_error("manifest: speaker list is empty");

  std::size_t index = 0;
  for (const auto& js : j.at("segments")) {
    ManifestSegment seg;
    seg.speaker = js.at("speaker").get<std::string>();
    seg.start_seconds = js.at("start_seconds").get<double>();
    seg.end_seconds = js.at("end_seconds").get<double>();
    if (js.contains("transcript")) seg.transcript = js.at("transcript").get<std::string>();
    if (std::find(m.speakers.begin(), m.speakers.end(), seg.speaker) == m.speakers.end())
      throw std::runtime_error("manifest: segment " + std::to_string(index) +
                               " names unknown speaker '" + seg.speaker + "'");
    if (!(seg.start_seconds >= 0.0 && seg.start_seconds < seg.end_seconds))
      throw std::runtime_error("manifest: segment " + std::to_string(index) +
                               " has invalid times [" + std::to_string(seg.start_seconds) + ", " +
                               std::to_string(seg.end_seconds) + ")");
    m.segments.push_back(std::move(seg));
    ++index;
  }

  if (std::filesystem::exists(m.audio_path)) {
    const Waveform audio = read_wav(m.audio_path);
    const double duration = static_cast<double>(audio.length()) / audio.sample_rate;
    for (std::size_t i = 0; i < m.segments.size(); ++i)
      if (m.segments[i].end_seconds > duration + 1e-9)
        throw std::runtime_error("manifest: segment " + std::to_string(i) +
                                 " ends at " + std::to_string(m.segments[i].end_seconds) +
                                 "s, beyond audio duration " + std::to_string(duration) + "s");
  }
  return m;
}

SessionManifest load_manifest(const std::string& path) {
  return parse_manifest_json(read_file(path), std::filesystem::path(path).parent_path().string());
}

std::string manifest_to_json(const SessionManifest& manifest) {
  nlohmann::json j;
  j["session_id"] = manifest.session_id;
  j["audio"] = manifest.audio_path;
  j["speakers"] = manifest.speakers;
  j["segments"] = nlohmann::json::array();
  for (const auto& seg : manifest.segments) {
    nlohmann::json js = {{"speaker", seg.speaker},
                         {"start_seconds", seg.start_seconds},
                         {"end_seconds", seg.end_seconds}};
    if (seg.transcript) js["transcript"] = *seg.transcript;
    j["segments"].push_back(js);
  }
  return j.dump(2);
}

namespace {
WindowType window_from_string(const std::string& s) {
  if (s == "hann") return WindowType::Hann;
  if (s == "sqrt_hann") return WindowType::SqrtHann;
  if (s == "rect") return WindowType::Rect;
  throw std::runtime_error("config: unknown window '" + s + "'");
}
std::string window_to_string(WindowType w) {
  switch (w) {
    case WindowType::Hann: return "hann";
    case WindowType::SqrtHann: return "sqrt_hann";
    case WindowType::Rect: return "rect";
  }
  return "hann";
}
}  // namespace

RunConfig RunConfig::from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("config: malformed JSON: ") + e.what());
  }
  RunConfig cfg;
  if (j.contains("stage")) {
    const auto stage = j.at("stage").get<std::string>();
    if (stage == "gss")
      cfg.stage = PipelineStage::Gss;
    else if (stage == "passthrough")
      cfg.stage = PipelineStage::Passthrough;
    else
      throw std::runtime_error("config: unknown stage '" + stage + "'");
  }
  if (j.contains("stft")) {
    const auto& s = j.at("stft");
    if (s.contains("fft_size")) cfg.gss.stft.fft_size = s.at("fft_size").get<std::size_t>();
    if (s.contains("hop")) cfg.gss.stft.hop = s.at("hop").get<std::size_t>();
    if (s.contains("window")) cfg.gss.stft.window = window_from_string(s.at("window").get<std::string>());
    cfg.gss.stft.validate();
  }
  if (j.contains("gss")) {
    const auto& g = j.at("gss");
    if (g.contains("iterations")) cfg.gss.iterations = g.at("iterations").get<int>();
    if (g.contains("context_pad")) cfg.gss.context_pad = g.at("context_pad").get<std::size_t>();
    if (g.contains("ref_channel")) cfg.gss.ref_channel = g.at("ref_channel").get<std::size_t>();
    if (g.contains("apply_post_mask")) cfg.gss.apply_post_mask = g.at("apply_post_mask").get<bool>();
    if (g.contains("mask_floor")) cfg.gss.mask_floor = g.at("mask_floor").get<double>();
  }
  if (j.contains("segment_context_seconds"))
    cfg.segment_context_seconds = j.at("segment_context_seconds").get<double>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
  return cfg;
}

std::string RunConfig::to_json() const {
  nlohmann::json j;
  j["stage"] = stage == PipelineStage::Gss ? "gss" : "passthrough";
  j["stft"] = {{"fft_size", gss.stft.fft_size},
               {"hop", gss.stft.hop},
               {"window", window_to_string(gss.stft.window)}};
  j["gss"] = {{"iterations", gss.iterations},
              {"context_pad", gss.context_pad},
              {"ref_channel", gss.ref_channel},
              {"apply_post_mask", gss.apply_post_mask},
              {"mask_floor", gss.mask_floor}};
  j["segment_context_seconds"] = segment_context_seconds;
  j["seed"] = seed;
  j["jobs"] = jobs;
  return j.dump(2);
}

RunConfig load_run_config(const std::string& path) { return RunConfig::from_json(read_file(path)); }

}  // namespace avtse
