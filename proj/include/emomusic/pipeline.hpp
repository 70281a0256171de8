#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "emomusic/dataset.hpp"
#include "emomusic/eeg_features.hpp"
#include "emomusic/music_features.hpp"
#include "emomusic/window_dataset.hpp"

namespace emomusic {

struct ExtractionConfig {
  double window_s = 2.0;
  double hop_s = 0.0;  // 0: hop = window
  EegFeatureConfig eeg;
  FrameConfig frames;
};

// Windows, labels and both feature vectors for one loaded trial.
std::vector<WindowRecord> extract_trial_windows(const Trial& trial, const ExtractionConfig& cfg);

// Every trial of the manifest; `jobs` worker threads (0: hardware concurrency).
WindowDataset extract_dataset(const DatasetManifest& manifest, const ExtractionConfig& cfg, unsigned jobs = 1);

// Feature tables. Columns:
//   eeg:    trial_id,window_start,<17 EEG names>
//   music:  trial_id,window_start,<37 music names>,tempo_no_onsets,attack_no_onsets,flat_chroma
//   labels: trial_id,window_start,mean_valence,mean_arousal,valence_class,arousal_class
std::string format_eeg_table(const std::vector<WindowRecord>& windows);
std::string format_music_table(const std::vector<WindowRecord>& windows);
std::string format_label_table(const std::vector<WindowRecord>& windows);

// Reassembles records from the three tables of one trial. Throws ParseError
// when the tables disagree on windows or columns.
std::vector<WindowRecord> parse_trial_tables(const std::string& eeg, const std::string& music, const std::string& labels);

// Directory name for a window size, e.g. "w2" or "w2.5".
std::string window_dir_name(double window_s);

// Writes <dir>/<subject>__<song>.{eeg,music,labels}.csv.
void write_trial_tables(const std::filesystem::path& dir, const std::string& subject_id, const std::string& song_id,
                        const std::vector<WindowRecord>& windows);
std::filesystem::path trial_table_stem(const std::filesystem::path& dir, const std::string& subject_id, const std::string& song_id);

// Loads all trials listed in `manifest` from `dir` in manifest order.
WindowDataset read_window_dataset(const std::filesystem::path& dir, const DatasetManifest& manifest, double window_s);

// 64-bit FNV-1a, used for content-hash caching.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace emomusic
