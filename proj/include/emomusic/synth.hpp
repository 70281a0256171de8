#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "emomusic/dataset.hpp"

namespace emomusic {

// Demo dataset with a known class structure. Every song is split into
// segments; each segment gets an (arousal, valence) class from a balanced
// schedule shared by all subjects.
//   arousal high: faster, louder clicks over a noisier mix; EEG closer to white noise
//   valence positive: major triads (minor otherwise); left-hemisphere EEG smoother
// Annotations follow the class signs, so labels are a function of the signals.
struct SynthConfig {
  std::uint64_t seed = 0;
  std::size_t subjects = 2;
  std::size_t trials = 4;  // songs per subject
  double trial_s = 40.0;
  double segment_s = 20.0;
  double eeg_rate_hz = kDefaultEegRateHz;
  double audio_rate_hz = kDefaultAudioRateHz;
};

struct SegmentClass {
  bool arousal_high = false;
  bool valence_positive = false;
};

// Class schedule, one entry per (song, segment) in song-major order. Each of
// the four class combinations appears equally often up to rounding.
std::vector<SegmentClass> synth_schedule(const SynthConfig& cfg);

AudioSignal synth_song_audio(const SynthConfig& cfg, std::size_t song);
MultichannelSignal synth_subject_eeg(const SynthConfig& cfg, std::size_t subject, std::size_t song);
AnnotationStream synth_annotations(const SynthConfig& cfg, std::size_t subject, std::size_t song);

// Writes audio/, eeg/, annotations/ and manifest.json under `dir`; returns the
// manifest path.
std::filesystem::path write_synthetic_dataset(const std::filesystem::path& dir, const SynthConfig& cfg);

}  // namespace emomusic
