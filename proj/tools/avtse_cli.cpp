#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "avtse/masks.hpp"
#include "avtse/mixsim.hpp"
#include "avtse/pipeline.hpp"
#include "avtse/report.hpp"
#include "avtse/sisnr.hpp"
#include "avtse/wavio.hpp"

namespace fs = std::filesystem;
using namespace avtse;

namespace {

int cmd_simulate(const std::string& manifest_path, const std::string& out_dir,
                 std::uint64_t seed) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open " + manifest_path);
  nlohmann::json j = nlohmann::json::parse(in);
  const fs::path base = fs::path(manifest_path).parent_path();
  auto resolve = [&](const std::string& p) {
    return fs::path(p).is_absolute() ? p : (base / p).string();
  };

  std::vector<std::vector<Waveform>> speakers;
  for (const auto& spk : j.at("speakers")) {
    std::vector<Waveform> segs;
    for (const auto& p : spk) segs.push_back(read_wav(resolve(p.get<std::string>())).mono(0));
    speakers.push_back(std::move(segs));
  }
  std::vector<Waveform> noise;
  for (const auto& p : j.at("noise")) noise.push_back(read_wav(resolve(p.get<std::string>())));

  SimConfig cfg;
  cfg.array = circular_array_6({2.5, 2.0, 1.2});
  if (j.contains("session_seconds")) cfg.session_seconds = j.at("session_seconds").get<double>();
  if (j.contains("snr_db")) cfg.snr_db = j.at("snr_db").get<double>();
  if (j.contains("noise_as_point_source"))
    cfg.noise_as_point_source = j.at("noise_as_point_source").get<bool>();
  if (j.contains("room")) {
    const auto& r = j.at("room");
    if (r.contains("dimensions")) cfg.room.dimensions = r.at("dimensions").get<Vec3>();
    if (r.contains("absorption")) cfg.room.set_uniform_absorption(r.at("absorption").get<double>());
    if (r.contains("max_reflection_order"))
      cfg.room.max_reflection_order = r.at("max_reflection_order").get<int>();
    cfg.array = circular_array_6(
        {cfg.room.dimensions[0] / 2, cfg.room.dimensions[1] / 2, cfg.room.dimensions[2] * 0.4});
  }

  const SimulatedMixture mix = build_training_example(speakers, noise, cfg, seed);
  fs::create_directories(out_dir);
  write_wav((fs::path(out_dir) / "mixture.wav").string(), mix.mixture);
  for (std::size_t s = 0; s < mix.clean_refs.size(); ++s)
    write_wav((fs::path(out_dir) / ("clean_spk" + std::to_string(s) + ".wav")).string(),
              mix.clean_refs[s]);
  std::ofstream meta(fs::path(out_dir) / "metadata.json");
  meta << mixture_metadata_json(mix, cfg) << "\n";
  std::cout << "simulated " << mix.mixture.channels() << "-channel session, "
            << mix.mixture.length() << " samples, SNR " << mix.snr_db << " dB -> " << out_dir
            << "\n";
  return 0;
}

int cmd_extract(const std::string& manifest_path, const std::string& config_path,
                const std::string& out_dir, std::uint64_t seed, const std::string& stage,
                int jobs) {
  const SessionManifest manifest = load_manifest(manifest_path);
  RunConfig config = config_path.empty() ? RunConfig{} : load_run_config(config_path);
  if (seed != static_cast<std::uint64_t>(-1)) config.seed = seed;
  if (!stage.empty()) {
    if (stage == "gss")
      config.stage = PipelineStage::Gss;
    else if (stage == "passthrough")
      config.stage = PipelineStage::Passthrough;
    else
      throw std::runtime_error("unknown stage '" + stage + "'");
  }
  if (jobs > 0) config.jobs = jobs;

  const ExtractionResult result = run_extraction(manifest, config, out_dir);
  std::cout << result.records.size() - result.failures << "/" << result.records.size()
            << " segments extracted -> " << out_dir << "\n";
  if (result.failures > 0) {
    std::cerr << result.failures << " segment(s) failed; see metadata.json\n";
    return 2;
  }
  return 0;
}

int cmd_score(const std::string& ref_path, const std::vector<std::string>& hyp_specs,
              const std::string& out_prefix) {
  const auto references = read_transcripts(ref_path);
  std::map<std::string, std::map<std::string, std::string>> systems;
  for (const auto& spec : hyp_specs) {
    const auto eq = spec.find('=');
    const std::string name = eq == std::string::npos ? "system" : spec.substr(0, eq);
    const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    systems[name] = read_transcripts(path);
  }
  const ScoreReport report = score_systems(systems, references);
  const std::string text = render_report_text(report);
  std::cout << text;
  if (!out_prefix.empty()) {
    std::ofstream(out_prefix + ".txt") << text;
    std::ofstream(out_prefix + ".json") << render_report_json(report) << "\n";
  }
  return 0;
}

int cmd_oracle_enhance(const std::string& clean_path, const std::string& noise_path,
                       const std::string& out_dir) {
  const Waveform clean = read_wav(clean_path).mono(0);
  Waveform noise = read_wav(noise_path).mono(0);
  if (noise.length() < clean.length())
    throw std::runtime_error("oracle-enhance: noise shorter than clean signal");
  noise.channel(0).resize(clean.length());

  Waveform mixture(1, clean.length());
  for (std::size_t i = 0; i < clean.length(); ++i)
    mixture.channel(0)[i] = clean.channel(0)[i] + noise.channel(0)[i];

  StftConfig stft_cfg;
  const auto mix_spec = stft(mixture, stft_cfg);
  const Mask irm = ideal_ratio_mask(stft(clean, stft_cfg), stft(noise, stft_cfg));
  const Waveform enhanced = istft(apply_mask(mix_spec, irm), stft_cfg, mixture.length());

  fs::create_directories(out_dir);
  write_wav((fs::path(out_dir) / "mixture.wav").string(), mixture);
  write_wav((fs::path(out_dir) / "enhanced.wav").string(), enhanced);
  std::cout << "SI-SNR mixture:  " << si_snr(mixture, clean) << " dB\n"
            << "SI-SNR enhanced: " << si_snr(enhanced, clean) << " dB\n";
  return 0;
}

int cmd_report(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw std::runtime_error("cannot open " + json_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::cout << render_report_text(parse_report_json(ss.str()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multichannel target-speaker extraction and scoring toolkit"};
  app.require_subcommand(1);

  std::string manifest_path, config_path, out_path, stage, ref_path, clean_path, noise_path,
      json_path;
  std::vector<std::string> hyp_specs;
  std::uint64_t seed = static_cast<std::uint64_t>(-1);
  int jobs = 0;

  auto* simulate = app.add_subcommand("simulate", "Render a seeded far-field mixture");
  simulate->add_option("--manifest", manifest_path, "simulation manifest (JSON)")->required();
  simulate->add_option("--out", out_path, "output directory")->required();
  simulate->add_option("--seed", seed, "random seed");

  auto* extract = app.add_subcommand("extract", "Enhance every speaker's segments");
  extract->add_option("--manifest", manifest_path, "session manifest (JSON)")->required();
  extract->add_option("--config", config_path, "run config (JSON)");
  extract->add_option("--out", out_path, "output directory")->required();
  extract->add_option("--seed", seed, "seed override");
  extract->add_option("--stage", stage, "stage override: gss | passthrough");
  extract->add_option("--jobs", jobs, "parallel workers");

  auto* score = app.add_subcommand("score", "Score hypothesis transcripts against references");
  score->add_option("--ref", ref_path, "reference transcripts")->required();
  score->add_option("--hyp", hyp_specs, "hypothesis transcripts, NAME=PATH")->required();
  score->add_option("--out", out_path, "report path prefix (.txt/.json)");

  auto* oracle = app.add_subcommand("oracle-enhance", "Ideal-ratio-mask upper bound");
  oracle->add_option("--clean", clean_path, "clean reference WAV")->required();
  oracle->add_option("--noise", noise_path, "aligned noise WAV")->required();
  oracle->add_option("--out", out_path, "output directory")->required();

  auto* report = app.add_subcommand("report", "Re-render a JSON report as text");
  report->add_option("--json", json_path, "report JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed())
      return cmd_simulate(manifest_path, out_path, seed == static_cast<std::uint64_t>(-1) ? 0 : seed);
    if (extract->parsed()) return cmd_extract(manifest_path, config_path, out_path, seed, stage, jobs);
    if (score->parsed()) return cmd_score(ref_path, hyp_specs, out_path);
    if (oracle->parsed()) return cmd_oracle_enhance(clean_path, noise_path, out_path);
    if (report->parsed()) return cmd_report(json_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
