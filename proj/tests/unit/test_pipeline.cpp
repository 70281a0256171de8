#include <algorithm>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "emomusic/pipeline.hpp"
#include "emomusic/synth.hpp"
#include "helpers.hpp"

using namespace emomusic;
using test::error_kind;
using test::TempDir;

namespace {

SynthConfig small_synth(std::uint64_t seed = 4) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.subjects = 2;
  cfg.trials = 2;
  cfg.trial_s = 20.0;
  cfg.segment_s = 10.0;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

}  // namespace

TEST_CASE("synthetic dataset is deterministic") {
  TempDir a, b, c;
  write_synthetic_dataset(a.path(), small_synth());
  write_synthetic_dataset(b.path(), small_synth());
  write_synthetic_dataset(c.path(), small_synth(5));
  std::size_t files = 0;
  bool any_differs = false;
  for (const auto& entry : fs::recursive_directory_iterator(a.path())) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), a.path());
    CHECK(slurp(entry.path()) == slurp(b.path() / rel));
    if (rel.filename() != "manifest.json" && fs::exists(c.path() / rel))
      any_differs = any_differs || slurp(entry.path()) != slurp(c.path() / rel);
    ++files;
  }
  // 2 songs, 2 x 2 EEG files with sidecars, 2 x 2 annotations, manifest.
  CHECK(files == 2 + 8 + 4 + 1);
  CHECK(any_differs);
}

TEST_CASE("synthetic class schedule is balanced") {
  SynthConfig cfg;
  cfg.trials = 6;
  const auto schedule = synth_schedule(cfg);
  CHECK(schedule.size() == 12);
  for (bool a : {false, true})
    for (bool v : {false, true})
      CHECK(std::count_if(schedule.begin(), schedule.end(), [&](const SegmentClass& s) {
              return s.arousal_high == a && s.valence_positive == v;
            }) == 3);
}

TEST_CASE("synthetic dataset loads and its labels follow the schedule") {
  TempDir dir;
  const auto cfg = small_synth();
  const auto manifest = load_manifest(write_synthetic_dataset(dir.path(), cfg));
  REQUIRE(manifest.subjects.size() == 2);
  CHECK(manifest.trial_count() == 4);

  ExtractionConfig ex;
  ex.window_s = 2.0;
  const auto ds = extract_dataset(manifest, ex, 2);
  CHECK(ds.windows.size() == 4 * 10);
  const auto schedule = synth_schedule(cfg);
  std::size_t high = 0, positive = 0;
  for (const auto& w : ds.windows) {
    const std::size_t song = w.song_id == manifest.subjects[0].trials[0].song_id ? 0 : 1;
    const auto& cls = schedule[song * 2 + static_cast<std::size_t>(w.start_s / cfg.segment_s)];
    CHECK((w.label.arousal == ArousalClass::High) == cls.arousal_high);
    CHECK((w.label.valence == ValenceClass::Positive) == cls.valence_positive);
    high += w.label.arousal == ArousalClass::High;
    positive += w.label.valence == ValenceClass::Positive;
  }
  const double n = static_cast<double>(ds.windows.size());
  CHECK(std::fabs(static_cast<double>(high) / n - 0.5) <= 0.1);
  CHECK(std::fabs(static_cast<double>(positive) / n - 0.5) <= 0.1);
}

TEST_CASE("feature tables") {
  TempDir dir;
  const auto manifest = load_manifest(write_synthetic_dataset(dir.path(), small_synth()));
  const auto& subject = manifest.subjects[0];
  const auto trial = load_trial(subject.subject_id, subject.trials[0]);
  ExtractionConfig ex;
  ex.window_s = 4.0;
  const auto windows = extract_trial_windows(trial, ex);
  REQUIRE(windows.size() == 5);

  const auto eeg = format_eeg_table(windows);
  const auto music = format_music_table(windows);
  const auto labels = format_label_table(windows);
  const auto eeg_header = split_line(first_line(eeg));
  const auto music_header = split_line(first_line(music));
  CHECK(eeg_header.size() == 2 + 17);
  CHECK(music_header.size() == 2 + 37 + 3);
  CHECK(eeg_header[0] == "trial_id");
  CHECK(eeg_header[1] == "window_start");
  const auto names = eeg_feature_names();
  for (std::size_t i = 0; i < names.size(); ++i) CHECK(eeg_header[2 + i] == names[i]);
  CHECK(split_line(first_line(labels)) ==
        std::vector<std::string>{"trial_id", "window_start", "mean_valence", "mean_arousal", "valence_class", "arousal_class"});
  CHECK(std::count(eeg.begin(), eeg.end(), '\n') == 6);

  const auto back = parse_trial_tables(eeg, music, labels);
  REQUIRE(back.size() == windows.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].trial_id() == windows[i].trial_id());
    CHECK(back[i].start_s == windows[i].start_s);
    CHECK(back[i].eeg == windows[i].eeg);
    CHECK(back[i].music == windows[i].music);
    CHECK(back[i].label.arousal == windows[i].label.arousal);
    CHECK(back[i].label.valence == windows[i].label.valence);
    CHECK(back[i].tempo_no_onsets == windows[i].tempo_no_onsets);
  }

  const auto truncated = labels.substr(0, labels.rfind('\n', labels.size() - 2) + 1);
  CHECK(error_kind([&] { parse_trial_tables(eeg, music, truncated); }) == ErrorKind::ParseError);

  write_trial_tables(dir.path() / "w4", subject.subject_id, subject.trials[0].song_id, windows);
  CHECK(fs::exists(trial_table_stem(dir.path() / "w4", subject.subject_id, subject.trials[0].song_id).string() + ".eeg.csv"));
}

TEST_CASE("window directory names") {
  CHECK(window_dir_name(2.0) == "w2");
  CHECK(window_dir_name(10.0) == "w10");
  CHECK(window_dir_name(2.5) == "w2.5");
}

TEST_CASE("content hash") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}
