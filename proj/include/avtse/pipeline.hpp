#pragma once

#include <string>
#include <vector>

#include "avtse/manifest.hpp"
#include "avtse/report.hpp"
#include "avtse/waveform.hpp"

namespace avtse {

struct ExtractionRecord {
  std::string speaker;
  std::size_t segment_index = 0;  // index within the speaker's segment list
  double start_seconds = 0.0;
  double end_seconds = 0.0;
  std::string output_path;  // empty when the segment failed
  std::string error;        // empty on success
};

struct ExtractionResult {
  std::vector<ExtractionRecord> records;
  std::size_t failures = 0;
};

// Treats every speaker in the manifest as the target in turn and enhances
// each of their segments. Per-segment failures are recorded and the run
// continues. Writes one WAV per (speaker, segment) under out_dir plus a
// metadata.json embedding the exact config.
ExtractionResult run_extraction(const SessionManifest& manifest, const RunConfig& config,
                                const std::string& out_dir);

}  // namespace avtse
