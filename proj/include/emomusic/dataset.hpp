#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emomusic/matrix.hpp"

namespace emomusic {

namespace fs = std::filesystem;

inline constexpr std::size_t kEegChannelCount = 12;

// Canonical electrode order. Every MultichannelSignal is stored in this order.
inline constexpr std::array<std::string_view, kEegChannelCount> kEegChannels = {
    "Fp1", "Fp2", "F3", "F4", "C3", "C4", "F7", "F8", "T3", "T4", "Fz", "Pz"};

inline constexpr double kDefaultEegRateHz = 250.0;
inline constexpr double kDefaultAudioRateHz = 44100.0;

struct TrialRef {
  std::string song_id;
  fs::path eeg_path;
  fs::path audio_path;
  fs::path annotation_path;
  int familiarity = 0;
  int confidence = 1;  // 1..3
};

struct SubjectRecord {
  std::string subject_id;
  std::vector<TrialRef> trials;
};

struct DatasetManifest {
  std::vector<SubjectRecord> subjects;

  std::size_t trial_count() const;
};

// Reads a JSON manifest; relative paths resolve against the manifest's
// directory. Throws Error{ParseError | InvalidManifest | MissingFile | DuplicateTrial}.
DatasetManifest load_manifest(const fs::path& path);

// Writes `manifest` with paths made relative to `path`'s directory when possible.
void save_manifest(const DatasetManifest& manifest, const fs::path& path);

struct MultichannelSignal {
  // channels[c] holds the samples (microvolts) of kEegChannels[c].
  std::vector<std::vector<double>> channels;
  double sample_rate_hz = kDefaultEegRateHz;

  std::size_t sample_count() const { return channels.empty() ? 0 : channels.front().size(); }
  double duration_s() const { return static_cast<double>(sample_count()) / sample_rate_hz; }

  // Samples [first, first + count) of every channel.
  MultichannelSignal slice(std::size_t first, std::size_t count) const;
};

// Delimited text, header row of channel names (any order), one row per
// sample. Sample rate comes from the sidecar `<stem>.json`
// ({"sample_rate_hz": ...}); absent sidecar means 250 Hz.
MultichannelSignal load_eeg(const fs::path& path);
void save_eeg(const MultichannelSignal& signal, const fs::path& path);

fs::path eeg_sidecar_path(const fs::path& eeg_path);

struct AudioSignal {
  std::vector<double> samples;  // mono, [-1, 1]
  double sample_rate_hz = kDefaultAudioRateHz;

  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }
  AudioSignal slice(std::size_t first, std::size_t count) const;
};

// 16-bit PCM WAV, mono or stereo (averaged). Samples are scaled by 1/32768.
AudioSignal load_wav(const fs::path& path);
AudioSignal parse_wav(std::span<const std::uint8_t> bytes);
// Mono 16-bit PCM; samples are clamped to [-1, 1] and rounded to the nearest step.
void save_wav(const AudioSignal& audio, const fs::path& path);
std::vector<std::uint8_t> encode_wav(const AudioSignal& audio);

struct AnnotationEvent {
  std::int64_t t_ms = 0;
  double valence = 0.0;
  double arousal = 0.0;

  friend bool operator==(const AnnotationEvent&, const AnnotationEvent&) = default;
};

struct AnnotationStream {
  std::vector<AnnotationEvent> events;
};

// Line format, shared with the annotation front-end:
//   t_ms,valence,arousal            (header, required)
//   <integer>,<real>,<real>         (one event per line)
// Blank lines are ignored. t_ms strictly increasing, values in [-1, 1].
AnnotationStream load_annotations(const fs::path& path);
AnnotationStream parse_annotations(std::string_view text);
std::string format_annotations(const AnnotationStream& stream);
void save_annotations(const AnnotationStream& stream, const fs::path& path);

struct AffectPoint {
  double valence = 0.0;
  double arousal = 0.0;
};

// Zero-order hold: value of the latest event at or before t_s; before the
// first event, the first event's value.
AffectPoint resample_annotations(const AnnotationStream& stream, double t_s);

struct Trial {
  std::string subject_id;
  TrialRef ref;
  MultichannelSignal eeg;
  AudioSignal audio;
  AnnotationStream annotations;

  // Common span of the EEG and audio recordings.
  double duration_s() const;
};

Trial load_trial(const std::string& subject_id, const TrialRef& ref);

struct AnalysisWindow {
  double start_s = 0.0;
  double length_s = 0.0;

  friend bool operator==(const AnalysisWindow&, const AnalysisWindow&) = default;
};

// Windows at 0, hop, 2*hop, ... that fit entirely in [0, duration_s).
// hop_s <= 0 means hop = window (non-overlapping).
std::vector<AnalysisWindow> segment_windows(double duration_s, double window_s, double hop_s = 0.0);
std::vector<AnalysisWindow> segment_windows(const Trial& trial, double window_s, double hop_s = 0.0);

// Sample range [first, first + count) of `window` at `rate_hz`.
std::pair<std::size_t, std::size_t> window_sample_range(const AnalysisWindow& window, double rate_hz);

enum class ArousalClass { Low, High };
enum class ValenceClass { Negative, Positive };

struct WindowLabel {
  ArousalClass arousal = ArousalClass::Low;
  ValenceClass valence = ValenceClass::Negative;
  double mean_valence = 0.0;
  double mean_arousal = 0.0;
};

inline constexpr double kLabelRateHz = 10.0;

// Mean of the 10 Hz zero-order-hold resampled annotation over the window,
// thresholded at 0 (ties go to positive/high).
WindowLabel label_window(const AnnotationStream& stream, const AnalysisWindow& window);

}  // namespace emomusic
