#include "emomusic/pipeline.hpp"

#include <map>

#include "emomusic/error.hpp"
#include "emomusic/parallel.hpp"
#include "emomusic/text_io.hpp"

namespace emomusic {

std::vector<WindowRecord> extract_trial_windows(const Trial& trial, const ExtractionConfig& cfg) {
  const MultichannelSignal eeg =
      cfg.eeg.bandpass ? bandpass_filter(trial.eeg, cfg.eeg.bandpass->low_hz, cfg.eeg.bandpass->high_hz) : trial.eeg;
  const auto windows = segment_windows(trial, cfg.window_s, cfg.hop_s);

  std::vector<WindowRecord> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    WindowRecord rec;
    rec.subject_id = trial.subject_id;
    rec.song_id = trial.ref.song_id;
    rec.start_s = w.start_s;

    auto [e0, en] = window_sample_range(w, eeg.sample_rate_hz);
    en = std::min(en, eeg.sample_count() - std::min(e0, eeg.sample_count()));
    rec.eeg = extract_eeg_features(eeg.slice(e0, en), cfg.eeg).flatten();

    auto [a0, an] = window_sample_range(w, trial.audio.sample_rate_hz);
    an = std::min(an, trial.audio.samples.size() - std::min(a0, trial.audio.samples.size()));
    const auto music = extract_music_features(trial.audio.slice(a0, an), cfg.frames);
    rec.music = music.flatten();
    rec.tempo_no_onsets = music.tempo_no_onsets;
    rec.attack_no_onsets = music.attack_no_onsets;
    rec.flat_chroma = music.flat_chroma;

    rec.label = label_window(trial.annotations, w);
    out.push_back(std::move(rec));
  }
  return out;
}

WindowDataset extract_dataset(const DatasetManifest& manifest, const ExtractionConfig& cfg, unsigned jobs) {
  std::vector<std::pair<std::string, const TrialRef*>> trials;
  for (const auto& s : manifest.subjects)
    for (const auto& t : s.trials) trials.emplace_back(s.subject_id, &t);

  std::vector<std::vector<WindowRecord>> per_trial(trials.size());
  parallel_for(trials.size(), jobs, [&](std::size_t i) {
    const auto trial = load_trial(trials[i].first, *trials[i].second);
    per_trial[i] = extract_trial_windows(trial, cfg);
  });

  WindowDataset ds;
  ds.window_s = cfg.window_s;
  for (auto& v : per_trial)
    for (auto& w : v) ds.windows.push_back(std::move(w));
  return ds;
}

// ---------------------------------------------------------------------------
// Tables

namespace {

std::string row_prefix(const WindowRecord& w) { return w.trial_id() + "," + text::format_double(w.start_s); }

template <class Names>
std::string header(const Names& names, std::initializer_list<const char*> extra = {}) {
  std::string h = "trial_id,window_start";
  for (const auto& n : names) h += "," + std::string(n);
  for (const char* e : extra) h += std::string(",") + e;
  return h + "\n";
}

struct ParsedTable {
  std::vector<std::string> trial_ids;
  std::vector<double> starts;
  std::vector<std::vector<std::string_view>> fields;  // columns after window_start
};

ParsedTable parse_table(std::string_view contents, const std::string& expected_header, const char* what) {
  const auto rows = text::lines(contents);
  if (rows.empty() || std::string(rows.front()) + "\n" != expected_header)
    throw Error(ErrorKind::ParseError, std::string(what) + " table: unexpected header");
  const auto columns = text::split(rows.front(), ',').size();
  ParsedTable t;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (text::trim(rows[r]).empty()) continue;
    auto f = text::split(rows[r], ',');
    if (f.size() != columns)
      throw Error(ErrorKind::ParseError, std::string(what) + " table row " + std::to_string(r + 1) + ": wrong column count");
    const auto start = text::parse_double(f[1]);
    if (!start) throw Error(ErrorKind::ParseError, std::string(what) + " table row " + std::to_string(r + 1) + ": bad window_start");
    t.trial_ids.emplace_back(f[0]);
    t.starts.push_back(*start);
    t.fields.emplace_back(f.begin() + 2, f.end());
  }
  return t;
}

double field_double(std::string_view s, const char* what) {
  const auto v = text::parse_double(s);
  if (!v) throw Error(ErrorKind::ParseError, std::string(what) + ": non-numeric value '" + std::string(s) + "'");
  return *v;
}

}  // namespace

std::string format_eeg_table(const std::vector<WindowRecord>& windows) {
  std::string out = header(eeg_feature_names());
  for (const auto& w : windows) {
    out += row_prefix(w);
    for (double v : w.eeg) out += "," + text::format_double(v);
    out += "\n";
  }
  return out;
}

std::string format_music_table(const std::vector<WindowRecord>& windows) {
  std::string out = header(music_feature_names(), {"tempo_no_onsets", "attack_no_onsets", "flat_chroma"});
  for (const auto& w : windows) {
    out += row_prefix(w);
    for (double v : w.music) out += "," + text::format_double(v);
    out += w.tempo_no_onsets ? ",1" : ",0";
    out += w.attack_no_onsets ? ",1" : ",0";
    out += w.flat_chroma ? ",1" : ",0";
    out += "\n";
  }
  return out;
}

std::string format_label_table(const std::vector<WindowRecord>& windows) {
  std::string out = "trial_id,window_start,mean_valence,mean_arousal,valence_class,arousal_class\n";
  for (const auto& w : windows) {
    out += row_prefix(w);
    out += "," + text::format_double(w.label.mean_valence);
    out += "," + text::format_double(w.label.mean_arousal);
    out += w.label.valence == ValenceClass::Positive ? ",positive" : ",negative";
    out += w.label.arousal == ArousalClass::High ? ",high\n" : ",low\n";
  }
  return out;
}

std::vector<WindowRecord> parse_trial_tables(const std::string& eeg, const std::string& music, const std::string& labels) {
  const auto te = parse_table(eeg, header(eeg_feature_names()), "EEG");
  const auto tm = parse_table(music, header(music_feature_names(), {"tempo_no_onsets", "attack_no_onsets", "flat_chroma"}), "music");
  const auto tl = parse_table(labels, "trial_id,window_start,mean_valence,mean_arousal,valence_class,arousal_class\n", "label");
  if (te.starts != tm.starts || te.starts != tl.starts || te.trial_ids != tm.trial_ids || te.trial_ids != tl.trial_ids)
    throw Error(ErrorKind::ParseError, "feature tables disagree on windows");

  std::vector<WindowRecord> out(te.starts.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& w = out[i];
    const auto& id = te.trial_ids[i];
    const auto slash = id.find('/');
    if (slash == std::string::npos) throw Error(ErrorKind::ParseError, "trial_id must be subject/song: " + id);
    w.subject_id = id.substr(0, slash);
    w.song_id = id.substr(slash + 1);
    w.start_s = te.starts[i];
    for (std::size_t j = 0; j < kEegFeatureCount; ++j) w.eeg[j] = field_double(te.fields[i][j], "EEG table");
    for (std::size_t j = 0; j < kMusicFeatureCount; ++j) w.music[j] = field_double(tm.fields[i][j], "music table");
    w.tempo_no_onsets = tm.fields[i][kMusicFeatureCount] == "1";
    w.attack_no_onsets = tm.fields[i][kMusicFeatureCount + 1] == "1";
    w.flat_chroma = tm.fields[i][kMusicFeatureCount + 2] == "1";
    w.label.mean_valence = field_double(tl.fields[i][0], "label table");
    w.label.mean_arousal = field_double(tl.fields[i][1], "label table");
    w.label.valence = tl.fields[i][2] == "positive" ? ValenceClass::Positive : ValenceClass::Negative;
    w.label.arousal = tl.fields[i][3] == "high" ? ArousalClass::High : ArousalClass::Low;
  }
  return out;
}

std::string window_dir_name(double window_s) { return "w" + text::format_double(window_s); }

std::filesystem::path trial_table_stem(const std::filesystem::path& dir, const std::string& subject_id, const std::string& song_id) {
  return dir / (subject_id + "__" + song_id);
}

void write_trial_tables(const std::filesystem::path& dir, const std::string& subject_id, const std::string& song_id,
                        const std::vector<WindowRecord>& windows) {
  const auto stem = trial_table_stem(dir, subject_id, song_id).string();
  text::write_file(stem + ".eeg.csv", format_eeg_table(windows));
  text::write_file(stem + ".music.csv", format_music_table(windows));
  text::write_file(stem + ".labels.csv", format_label_table(windows));
}

WindowDataset read_window_dataset(const std::filesystem::path& dir, const DatasetManifest& manifest, double window_s) {
  WindowDataset ds;
  ds.window_s = window_s;
  for (const auto& s : manifest.subjects) {
    for (const auto& t : s.trials) {
      const auto stem = trial_table_stem(dir, s.subject_id, t.song_id).string();
      auto recs = parse_trial_tables(text::read_file(stem + ".eeg.csv"), text::read_file(stem + ".music.csv"),
                                     text::read_file(stem + ".labels.csv"));
      for (auto& r : recs) ds.windows.push_back(std::move(r));
    }
  }
  return ds;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace emomusic
