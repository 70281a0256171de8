#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "emomusic/dataset.hpp"
#include "emomusic/matrix.hpp"

namespace emomusic {

inline constexpr std::size_t kMfccCount = 13;
inline constexpr std::size_t kMelBandCount = 40;
inline constexpr double kMelLowHz = 20.0;
inline constexpr std::size_t kMusicFeatureCount = 37;

// Analysis parameters. The defaults follow common music-analysis toolbox
// settings at 44.1 kHz (2048-sample Hann frames, half overlap).
struct FrameConfig {
  std::size_t frame_len = 2048;
  std::size_t hop = 1024;
  // Onset-strength curve used by tempo and attack estimation.
  std::size_t onset_hop = 256;
  // Amplitude envelope used to measure attacks.
  std::size_t envelope_frame_len = 512;
  std::size_t envelope_hop = 256;
  // Roughness needs enough resolution to separate partials ~20 Hz apart.
  std::size_t roughness_frame_len = 8192;
  double min_bpm = 40.0;
  double max_bpm = 200.0;
  double neutral_tempo_bpm = 120.0;
};

// Throws InvalidArgument unless 0 < hop <= frame_len and frame lengths are
// powers of two.
void validate(const FrameConfig& cfg);

struct FrameSequence {
  Matrix magnitudes;           // [frames x (frame_len/2 + 1)], Hann-windowed |STFT|
  std::vector<double> rms;     // per frame, over the raw samples
  std::vector<double> times_s; // frame centres
  double sample_rate_hz = kDefaultAudioRateHz;
  std::size_t frame_len = 0;
  std::size_t hop = 0;

  std::size_t frame_count() const { return rms.size(); }
  std::size_t bins() const { return frame_len / 2 + 1; }
  double bin_hz(std::size_t k) const { return static_cast<double>(k) * sample_rate_hz / static_cast<double>(frame_len); }
};

// Throws TooShort if the audio is shorter than one frame.
FrameSequence analyze_frames(const AudioSignal& audio, std::size_t frame_len, std::size_t hop);
inline FrameSequence analyze_frames(const AudioSignal& audio, const FrameConfig& cfg) {
  return analyze_frames(audio, cfg.frame_len, cfg.hop);
}

double rms_mean(const FrameSequence& frames);

// Strict sign changes per sample, averaged over frames.
double zero_crossing_rate(const AudioSignal& audio, const FrameConfig& cfg = {});

// Fraction of frames with RMS strictly below the mean frame RMS.
double low_energy_rate(std::span<const double> frame_rms);
inline double low_energy_rate(const FrameSequence& frames) { return low_energy_rate(frames.rms); }

// Mean Euclidean distance between consecutive magnitude spectra; 0 for one frame.
double spectral_flux(const FrameSequence& frames);

// 40 triangular unit-area mel filters from 20 Hz to Nyquist, as a
// [bands x bins] weight matrix over the power spectrum.
Matrix mel_filterbank(std::size_t frame_len, double sample_rate_hz);

// Per-frame coefficients 1..13 [frames x 13].
Matrix mfcc_frames(const FrameSequence& frames);

struct MfccSummary {
  std::array<double, kMfccCount> mfcc{};
  std::array<double, kMfccCount> dmfcc{};
};

// Throws TooFewFrames with fewer than 2 frames.
MfccSummary mfcc_mean(const FrameSequence& frames);

// Sensory dissonance of two partials on the Plomp-Levelt curve.
double plomp_levelt_dissonance(double f1, double f2, double a1, double a2);

struct SpectralPeak {
  double hz;
  double amplitude;
  std::size_t bin;
};
// Local maxima whose power is at least 1% of the frame's maximum power.
std::vector<SpectralPeak> spectral_peaks(const FrameSequence& frames, std::size_t frame);

double roughness_mean(const FrameSequence& frames);

// Half-wave-rectified spectral flux per frame (first frame 0).
std::vector<double> onset_strength(const FrameSequence& frames);

struct TempoEstimate {
  double bpm = 120.0;
  bool no_onsets = false;
};

// Throws TooShort below 2 s.
TempoEstimate tempo_estimate(const AudioSignal& audio, const FrameConfig& cfg = {});
TempoEstimate tempo_from_onsets(std::span<const double> onset_curve, double frames_per_second, const FrameConfig& cfg);

struct AttackEstimate {
  double time_s = 0.0;
  double slope = 0.0;
  std::size_t onset_count = 0;
  bool no_onsets = false;
};

AttackEstimate attack_features(const AudioSignal& audio, const FrameConfig& cfg = {});

// Per-frame pitch-class energy [frames x 12], index 0 = C. Rows sum to 1
// unless the frame has no energy in 55-2000 Hz.
Matrix chromagram(const FrameSequence& frames);

std::array<double, 12> mean_chroma(const Matrix& chroma);

struct KeyEstimate {
  double key_clarity = 0.0;
  double mode = 0.0;
  bool flat_chroma = false;
};

// Krumhansl-Kessler key profiles, tonic C.
extern const std::array<double, 12> kMajorKeyProfile;
extern const std::array<double, 12> kMinorKeyProfile;

KeyEstimate key_clarity_mode(std::span<const double, 12> chroma);

// 6-D tonal centroid of one chroma vector.
std::array<double, 6> tonal_centroid(std::span<const double> chroma);

// Mean distance between tonal centroids of frames t-1 and t+1; 0 with
// fewer than 3 frames.
double hcdf_mean(const Matrix& chroma);

struct MusicFeatureVector {
  double rms = 0.0;
  double tempo_bpm = 120.0;
  double attack_time_s = 0.0;
  double attack_slope = 0.0;
  double roughness = 0.0;
  std::array<double, kMfccCount> mfcc{};
  std::array<double, kMfccCount> dmfcc{};
  double zero_cross_rate = 0.0;
  double low_energy_rate = 0.0;
  double spectral_flux = 0.0;
  double key_clarity = 0.0;
  double mode = 0.0;
  double hcdf = 0.0;

  bool tempo_no_onsets = false;
  bool attack_no_onsets = false;
  bool flat_chroma = false;

  std::array<double, kMusicFeatureCount> flatten() const;
};

const std::array<std::string, kMusicFeatureCount>& music_feature_names();

// Throws TooShort below 2 s.
MusicFeatureVector extract_music_features(const AudioSignal& window, const FrameConfig& cfg = {});

}  // namespace emomusic
