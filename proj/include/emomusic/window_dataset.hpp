#pragma once

#include <array>
#include <string>
#include <vector>

#include "emomusic/dataset.hpp"
#include "emomusic/eeg_features.hpp"
#include "emomusic/music_features.hpp"

namespace emomusic {

// One analysis window with both modalities' features and its label.
struct WindowRecord {
  std::string subject_id;
  std::string song_id;
  double start_s = 0.0;
  std::array<double, kEegFeatureCount> eeg{};
  std::array<double, kMusicFeatureCount> music{};
  WindowLabel label;
  bool tempo_no_onsets = false;
  bool attack_no_onsets = false;
  bool flat_chroma = false;

  std::string trial_id() const { return subject_id + "/" + song_id; }
};

// All windows of one window size across the dataset, in manifest order.
struct WindowDataset {
  double window_s = 0.0;
  std::vector<WindowRecord> windows;

  // Distinct subject ids in order of first appearance.
  std::vector<std::string> subjects() const;
  // subject index (into subjects()) of every window.
  std::vector<std::size_t> subject_index() const;
};

}  // namespace emomusic
