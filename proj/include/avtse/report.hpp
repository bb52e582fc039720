#pragma once

#include <map>
#include <string>
#include <vector>

#include "avtse/evalkit.hpp"

namespace avtse {

// "utterance-id<TAB>text", one utterance per line, UTF-8.
std::map<std::string, std::string> read_transcripts(const std::string& path);

struct SystemScore {
  std::string system;
  ErrorCounts counts;
  double cer_percent = 0.0;
};

struct ScoreReport {
  std::vector<SystemScore> rows;
};

// Pools counts over utterances per system. Every hypothesis id must have a
// reference; missing ids are reported together in the exception message.
ScoreReport score_systems(
    const std::map<std::string, std::map<std::string, std::string>>& hypotheses_by_system,
    const std::map<std::string, std::string>& references,
    const TextNormalizer& normalizer = {});

// Aligned text table with S / D / I / CER columns per system.
std::string render_report_text(const ScoreReport& report);
std::string render_report_json(const ScoreReport& report);
ScoreReport parse_report_json(const std::string& json_text);

}  // namespace avtse
