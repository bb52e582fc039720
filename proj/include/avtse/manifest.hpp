#pragma once

#include <optional>
#include <string>
#include <vector>

#include "avtse/activity.hpp"
#include "avtse/gss.hpp"

namespace avtse {

struct ManifestSegment {
  std::string speaker;
  double start_seconds = 0.0;
  double end_seconds = 0.0;
  std::optional<std::string> transcript;
};

struct SessionManifest {
  std::string session_id;
  std::string audio_path;  // multichannel WAV, relative paths resolve against the manifest
  std::vector<std::string> speakers;
  std::vector<ManifestSegment> segments;
};

// Parses and validates eagerly: ordering, speaker membership, and (when the
// audio file is readable) segment bounds against the audio duration.
SessionManifest load_manifest(const std::string& path);
SessionManifest parse_manifest_json(const std::string& json_text, const std::string& base_dir = "");
std::string manifest_to_json(const SessionManifest& manifest);

enum class PipelineStage { Gss, Passthrough };

struct RunConfig {
  PipelineStage stage = PipelineStage::Gss;
  GssConfig gss;
  double segment_context_seconds = 1.0;  // mixture context handed to GSS around each segment
  std::uint64_t seed = 0;
  int jobs = 1;

  static RunConfig from_json(const std::string& json_text);
  std::string to_json() const;
};

RunConfig load_run_config(const std::string& path);

}  // namespace avtse
