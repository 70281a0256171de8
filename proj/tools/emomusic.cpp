// emomusic: synth | extract | evaluate | report

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "emomusic/error.hpp"
#include "emomusic/evaluation.hpp"
#include "emomusic/parallel.hpp"
#include "emomusic/pipeline.hpp"
#include "emomusic/synth.hpp"
#include "emomusic/text_io.hpp"

namespace fs = std::filesystem;
using namespace emomusic;

namespace {

struct Options {
  // shared
  fs::path out;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  // synth
  SynthConfig synth;
  // extract / evaluate
  fs::path manifest;
  fs::path features;
  std::vector<double> windows{2.0};
  bool sweep_windows = false;
  double hop_s = 0.0;
  std::size_t k_max = 32;
  std::vector<double> bandpass;
  std::size_t frame_len = 2048;
  std::size_t frame_hop = 1024;
  // evaluate
  std::optional<double> alpha;
  bool sweep_alpha = false;
  std::string protocol = "subject-dependent";
  std::string modality = "dlf";
  std::string normalization = "train-only";
  std::string fold_mode = "stratified";
  std::size_t folds = 10;
  std::size_t repetitions = 5;
  // report
  fs::path input;
  std::string metric = "accuracy";
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("emomusic");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("EMOMUSIC_LOG_LEVEL")) spdlog::set_level(spdlog::level::from_str(env));
}

void write_config_snapshot(const CLI::App& app, const fs::path& dir) {
  text::write_file(dir / "config.toml", app.config_to_str(true, false));
}

ExtractionConfig extraction_config(const Options& o, double window_s) {
  ExtractionConfig cfg;
  cfg.window_s = window_s;
  cfg.hop_s = o.hop_s;
  cfg.eeg.k_max = o.k_max;
  if (!o.bandpass.empty()) cfg.eeg.bandpass = Band{o.bandpass.at(0), o.bandpass.at(1)};
  cfg.frames.frame_len = o.frame_len;
  cfg.frames.hop = o.frame_hop;
  validate(cfg.frames);
  return cfg;
}

std::string config_fingerprint(const ExtractionConfig& c) {
  std::ostringstream s;
  s << "v1 w=" << text::format_double(c.window_s) << " hop=" << text::format_double(c.hop_s) << " k=" << c.eeg.k_max
    << " frame=" << c.frames.frame_len << '/' << c.frames.hop;
  if (c.eeg.bandpass) s << " band=" << text::format_double(c.eeg.bandpass->low_hz) << '-' << text::format_double(c.eeg.bandpass->high_hz);
  return s.str();
}

std::uint64_t input_hash(const TrialRef& ref) {
  std::uint64_t h = fnv1a(text::read_file(ref.eeg_path));
  if (fs::exists(eeg_sidecar_path(ref.eeg_path))) h = fnv1a(text::read_file(eeg_sidecar_path(ref.eeg_path)), h);
  h = fnv1a(text::read_file(ref.audio_path), h);
  return fnv1a(text::read_file(ref.annotation_path), h);
}

std::map<std::string, std::string> read_cache(const fs::path& file) {
  std::map<std::string, std::string> cache;
  if (!fs::exists(file)) return cache;
  const std::string contents = text::read_file(file);
  for (const auto& line : text::lines(contents)) {
    const auto parts = text::split(line, ' ');
    if (parts.size() == 2) cache[std::string(parts[0])] = std::string(parts[1]);
  }
  return cache;
}

// Extracts feature tables for every trial and window size; trials whose
// inputs and settings are unchanged since the last run are skipped.
void extract_features(const DatasetManifest& manifest, const Options& o, const fs::path& features_dir) {
  struct Job {
    std::string subject;
    const TrialRef* ref;
  };
  std::vector<Job> jobs;
  for (const auto& s : manifest.subjects)
    for (const auto& t : s.trials) jobs.push_back({s.subject_id, &t});

  std::vector<ExtractionConfig> configs;
  std::vector<std::map<std::string, std::string>> caches;
  for (double w : o.windows) {
    configs.push_back(extraction_config(o, w));
    caches.push_back(read_cache(features_dir / window_dir_name(w) / "cache.txt"));
  }

  std::mutex mutex;
  std::vector<std::string> failures(jobs.size());
  parallel_for(jobs.size(), resolve_jobs(o.jobs), [&](std::size_t j) {
    const auto& job = jobs[j];
    const std::string trial_id = job.subject + "/" + job.ref->song_id;
    try {
      const std::uint64_t h = input_hash(*job.ref);
      std::optional<Trial> trial;
      for (std::size_t w = 0; w < configs.size(); ++w) {
        const auto dir = features_dir / window_dir_name(o.windows[w]);
        const std::string key = std::to_string(fnv1a(config_fingerprint(configs[w]), h));
        const auto stem = trial_table_stem(dir, job.subject, job.ref->song_id);
        bool cached;
        {
          std::lock_guard lock(mutex);
          auto it = caches[w].find(trial_id);
          cached = it != caches[w].end() && it->second == key;
        }
        if (cached && fs::exists(stem.string() + ".labels.csv")) {
          spdlog::info("{} w={}: skipped (cached)", trial_id, o.windows[w]);
          continue;
        }
        if (!trial) trial = load_trial(job.subject, *job.ref);
        write_trial_tables(dir, job.subject, job.ref->song_id, extract_trial_windows(*trial, configs[w]));
        spdlog::info("{} w={}: extracted", trial_id, o.windows[w]);
        std::lock_guard lock(mutex);
        caches[w][trial_id] = key;
      }
    } catch (const std::exception& e) {
      failures[j] = e.what();
    }
  });

  for (std::size_t w = 0; w < configs.size(); ++w) {
    std::string out;
    for (const auto& [trial, key] : caches[w]) out += trial + " " + key + "\n";
    text::write_file(features_dir / window_dir_name(o.windows[w]) / "cache.txt", out);
  }
  for (std::size_t j = 0; j < jobs.size(); ++j)
    if (!failures[j].empty())
      throw Error(ErrorKind::Io, "extraction failed for trial " + jobs[j].subject + "/" + jobs[j].ref->song_id + ": " + failures[j]);
}

CvConfig cv_config(const Options& o) {
  CvConfig cfg;
  cfg.protocol = parse_protocol(o.protocol);
  cfg.modality = parse_modality(o.modality);
  cfg.normalization = parse_normalization(o.normalization);
  cfg.fold_mode = parse_fold_mode(o.fold_mode);
  cfg.folds = o.folds;
  cfg.repetitions = o.repetitions;
  cfg.seed = o.seed;
  cfg.jobs = resolve_jobs(o.jobs);
  if (o.alpha) cfg.alpha = *o.alpha;
  validate(cfg);
  return cfg;
}

int cmd_synth(const Options& o, const CLI::App& app) {
  SynthConfig cfg = o.synth;
  cfg.seed = o.seed;
  const auto manifest = write_synthetic_dataset(o.out, cfg);
  write_config_snapshot(app, o.out);
  std::cout << manifest.string() << '\n';
  return 0;
}

int cmd_extract(const Options& o, const CLI::App& app) {
  const auto manifest = load_manifest(o.manifest);
  const auto dir = o.features.empty() ? o.out / "features" : o.features;
  extract_features(manifest, o, dir);
  write_config_snapshot(app, o.out);
  return 0;
}

int cmd_evaluate(const Options& o, const CLI::App& app) {
  const auto manifest = load_manifest(o.manifest);
  const auto dir = o.features.empty() ? o.out / "features" : o.features;
  extract_features(manifest, o, dir);
  CvConfig cfg = cv_config(o);
  write_config_snapshot(app, o.out);

  if (o.sweep_windows) {
    std::map<double, WindowDataset> by_window;
    for (double w : o.windows) by_window.emplace(w, read_window_dataset(dir / window_dir_name(w), manifest, w));
    const auto table = sweep_windows(by_window, cfg);
    text::write_file(o.out / "sweep_windows.json", sweep_to_json(table));
    text::write_file(o.out / "sweep_windows_accuracy.csv", render_sweep_table(table, Metric::Accuracy));
    text::write_file(o.out / "sweep_windows_mcc.csv", render_sweep_table(table, Metric::Mcc));
    std::cout << render_sweep_table(table, Metric::Accuracy);
    for (const auto& c : table.cells)
      if (c.result.failed) spdlog::warn("cell {} {} w={} failed: {}", c.row, to_string(c.target), c.axis, c.result.failure);
    return 0;
  }

  const double w = o.windows.front();
  const auto ds = read_window_dataset(dir / window_dir_name(w), manifest, w);
  cfg.window_s = w;
  if (o.sweep_alpha) {
    const auto table = sweep_alpha(ds, cfg);
    text::write_file(o.out / "sweep_alpha.json", sweep_to_json(table));
    text::write_file(o.out / "sweep_alpha.csv", render_alpha_series(table));
    std::cout << render_alpha_series(table);
    return 0;
  }

  for (auto target : {Target::Arousal, Target::Valence}) {
    cfg.target = target;
    const auto report = run_protocol(ds, cfg);
    text::write_file(o.out / ("evaluation_" + to_string(target) + ".json"), report_to_json(report));
    const auto& r = report.result;
    std::printf("%s %s: accuracy %.2f (%.2f) mcc %.4f (%.4f) chance %.2f\n", to_string(target).c_str(),
                to_string(cfg.modality).c_str(), r.accuracy_mean, r.accuracy_std, r.mcc_mean, r.mcc_std, r.chance_mean);
    if (r.failed) spdlog::warn("{}: {}", to_string(target), r.failure);
  }
  return 0;
}

int cmd_report(const Options& o) {
  const auto table = sweep_from_json(text::read_file(o.input));
  if (table.axis_name == "alpha")
    std::cout << render_alpha_series(table);
  else
    std::cout << render_sweep_table(table, o.metric == "mcc" ? Metric::Mcc : Metric::Accuracy);
  return 0;
}

void add_window_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--manifest", o.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  cmd->add_option("--features", o.features, "Feature directory (default: <out>/features)");
  auto* window = cmd->add_option("--window", o.windows, "Window size(s) in seconds")->capture_default_str()->expected(1, -1);
  auto* sweep = cmd->add_flag("--sweep-windows", o.sweep_windows, "Use window sizes 2..10 s");
  window->excludes(sweep);
  cmd->add_option("--hop", o.hop_s, "Window hop in seconds (0: non-overlapping)")->capture_default_str();
  cmd->add_option("--k-max", o.k_max, "Higuchi k_max")->capture_default_str();
  cmd->add_option("--bandpass", o.bandpass, "EEG band-pass LOW HIGH in Hz")->expected(2);
  cmd->add_option("--frame-len", o.frame_len, "Music frame length")->capture_default_str();
  cmd->add_option("--frame-hop", o.frame_hop, "Music frame hop")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  Options o;
  CLI::App app{"Multimodal music emotion recognition toolkit"};
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
  app.add_option("--jobs", o.jobs, "Worker threads (0: available parallelism)")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic demo dataset");
  synth->add_option("--out", o.out, "Output directory")->required();
  synth->add_option("--subjects", o.synth.subjects, "Number of subjects")->capture_default_str();
  synth->add_option("--trials", o.synth.trials, "Songs per subject")->capture_default_str();
  synth->add_option("--trial-length", o.synth.trial_s, "Trial length in seconds")->capture_default_str();
  synth->add_option("--segment-length", o.synth.segment_s, "Class segment length in seconds")->capture_default_str();

  auto* extract = app.add_subcommand("extract", "Extract EEG and music feature tables");
  extract->add_option("--out", o.out, "Run directory")->required();
  add_window_options(extract, o);

  auto* evaluate = app.add_subcommand("evaluate", "Cross-validate and write reports");
  evaluate->add_option("--out", o.out, "Run directory")->required();
  add_window_options(evaluate, o);
  auto* alpha = evaluate->add_option("--alpha", o.alpha, "EEG weight of decision fusion")->check(CLI::Range(0.0, 1.0));
  auto* sweep_alpha_flag = evaluate->add_flag("--sweep-alpha", o.sweep_alpha, "Sweep alpha over 0..1 in steps of 0.025");
  alpha->excludes(sweep_alpha_flag);
  evaluate->add_option("--protocol", o.protocol, "subject-dependent | loso")->capture_default_str();
  evaluate->add_option("--modality", o.modality, "eeg | music | dlf | flf")->capture_default_str();
  evaluate->add_option("--normalization", o.normalization, "train-only | whole-scope")->capture_default_str();
  evaluate->add_option("--fold-mode", o.fold_mode, "stratified | grouped-by-song")->capture_default_str();
  evaluate->add_option("--folds", o.folds, "Folds per subject")->capture_default_str();
  evaluate->add_option("--repetitions", o.repetitions, "Cross-validation repetitions")->capture_default_str();

  auto* report = app.add_subcommand("report", "Render a sweep document as a table");
  report->add_option("--in", o.input, "Sweep JSON")->required()->check(CLI::ExistingFile);
  report->add_option("--metric", o.metric, "accuracy | mcc")->capture_default_str()->check(CLI::IsMember({"accuracy", "mcc"}));

  CLI11_PARSE(app, argc, argv);
  if (o.sweep_windows) o.windows = standard_window_sizes();
  if (o.sweep_windows && o.sweep_alpha) {
    std::cerr << "--sweep-windows and --sweep-alpha are mutually exclusive\n";
    return 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(o, app);
    if (extract->parsed()) return cmd_extract(o, app);
    if (evaluate->parsed()) return cmd_evaluate(o, app);
    return cmd_report(o);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
}
