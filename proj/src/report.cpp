#include "avtse/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace avtse {

std::map<std::string, std::string> read_transcripts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("transcripts: cannot open " + path);
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error("transcripts: missing tab separator at " + path + ":" +
                               std::to_string(lineno));
    out[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return out;
}

ScoreReport score_systems(
    const std::map<std::string, std::map<std::string, std::string>>& hypotheses_by_system,
    const std::map<std::string, std::string>& references, const TextNormalizer& normalizer) {
  ScoreReport report;
  for (const auto& [system, hyps] : hypotheses_by_system) {
    std::vector<std::string> missing;
    SystemScore row;
    row.system = system;
    for (const auto& [utt, hyp_text] : hyps) {
      auto it = references.find(utt);
      if (it == references.end()) {
        missing.push_back(utt);
        continue;
      }
      row.counts += align_and_count(normalizer.normalize(it->second), normalizer.normalize(hyp_text));
    }
    if (!missing.empty()) {
      std::string msg = "score: missing references for system " + system + ":";
      for (const auto& id : missing) msg += " " + id;
      throw std::runtime_error(msg);
    }
    row.cer_percent = cer(row.counts);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string render_report_text(const ScoreReport& report) {
  std::ostringstream out;
  std::size_t name_w = 6;
  for (const auto& r : report.rows) name_w = std::max(name_w, r.system.size());
  out << std::left << std::setw(static_cast<int>(name_w + 2)) << "System" << std::right
      << std::setw(8) << "S" << std::setw(8) << "D" << std::setw(8) << "I" << std::setw(10)
      << "CER" << "\n";
  for (const auto& r : report.rows) {
    out << std::left << std::setw(static_cast<int>(name_w + 2)) << r.system << std::right
        << std::setw(8) << r.counts.substitutions << std::setw(8) << r.counts.deletions
        << std::setw(8) << r.counts.insertions << std::setw(10) << std::fixed
        << std::setprecision(2) << r.cer_percent << "\n";
  }
  return out.str();
}

std::string render_report_json(const ScoreReport& report) {
  nlohmann::json j;
  j["systems"] = nlohmann::json::array();
  for (const auto& r : report.rows) {
    j["systems"].push_back({{"system", r.system},
                            {"substitutions", r.counts.substitutions},
                            {"deletions", r.counts.deletions},
                            {"insertions", r.counts.insertions},
                            {"ref_length", r.counts.ref_length},
                            {"cer", r.cer_percent}});
  }
  return j.dump(2);
}

ScoreReport parse_report_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  ScoreReport report;
  for (const auto& row : j.at("systems")) {
    SystemScore s;
    s.system = row.at("system").get<std::string>();
    s.counts.substitutions = row.at("substitutions").get<std::int64_t>();
    s.counts.deletions = row.at("deletions").get<std::int64_t>();
    s.counts.insertions = row.at("insertions").get<std::int64_t>();
    s.counts.ref_length = row.at("ref_length").get<std::int64_t>();
    s.cer_percent = row.at("cer").get<double>();
    report.rows.push_back(std::move(s));
  }
  return report;
}

}  // namespace avtse
