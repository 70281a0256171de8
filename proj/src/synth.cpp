#include "emomusic/synth.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "emomusic/error.hpp"
#include "emomusic/rng.hpp"

namespace emomusic {

namespace {

constexpr std::uint64_t kScheduleStream = 1;
constexpr std::uint64_t kAudioStream = 2;
constexpr std::uint64_t kEegStream = 3;
constexpr std::uint64_t kAnnotationStream = 4;
constexpr std::uint64_t kMetaStream = 5;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Own uniform/normal draws so the generated bytes do not depend on the
// standard library's distribution implementations.
double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * uniform01(rng));
}

void check(const SynthConfig& cfg) {
  if (cfg.subjects < 1 || cfg.trials < 1) throw Error(ErrorKind::InvalidArgument, "synth needs at least one subject and trial");
  if (!(cfg.segment_s >= 2.0) || !(cfg.trial_s >= cfg.segment_s))
    throw Error(ErrorKind::InvalidArgument, "synth segments must be at least 2 s and fit in the trial");
  if (!(cfg.eeg_rate_hz > 0.0) || !(cfg.audio_rate_hz > 0.0)) throw Error(ErrorKind::InvalidArgument, "sample rates must be positive");
}

std::size_t segments_per_song(const SynthConfig& cfg) {
  return static_cast<std::size_t>(std::ceil(cfg.trial_s / cfg.segment_s - 1e-9));
}

std::size_t segment_at(const SynthConfig& cfg, double t_s) {
  return std::min(segments_per_song(cfg) - 1, static_cast<std::size_t>(t_s / cfg.segment_s));
}

std::string song_id(std::size_t song) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "song%02zu", song + 1);
  return buf;
}

std::string subject_id(std::size_t subject) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "s%02zu", subject + 1);
  return buf;
}

}  // namespace

std::vector<SegmentClass> synth_schedule(const SynthConfig& cfg) {
  check(cfg);
  const std::size_t n = cfg.trials * segments_per_song(cfg);
  std::vector<SegmentClass> schedule(n);
  for (std::size_t i = 0; i < n; ++i) schedule[i] = {(i % 2) == 0, ((i / 2) % 2) == 0};
  Rng rng(derive_seed(cfg.seed, {kScheduleStream}));
  shuffle_in_place(schedule, rng);
  return schedule;
}

AudioSignal synth_song_audio(const SynthConfig& cfg, std::size_t song) {
  const auto schedule = synth_schedule(cfg);
  const std::size_t segs = segments_per_song(cfg);
  const double sr = cfg.audio_rate_hz;
  const auto n = static_cast<std::size_t>(std::llround(cfg.trial_s * sr));
  AudioSignal audio;
  audio.sample_rate_hz = sr;
  audio.samples.assign(n, 0.0);

  static constexpr std::array<double, 4> kRoots = {261.63, 293.66, 349.23, 392.00};
  Rng rng(derive_seed(cfg.seed, {kAudioStream, song}));

  for (std::size_t g = 0; g < segs; ++g) {
    const auto cls = schedule[song * segs + g];
    const auto first = static_cast<std::size_t>(std::llround(static_cast<double>(g) * cfg.segment_s * sr));
    const auto last = std::min(n, static_cast<std::size_t>(std::llround(static_cast<double>(g + 1) * cfg.segment_s * sr)));

    const double root = kRoots[rng() % kRoots.size()];
    const std::array<int, 3> steps = {0, cls.valence_positive ? 4 : 3, 7};
    const double chord_amp = cls.arousal_high ? 0.12 : 0.06;
    const double bpm = cls.arousal_high ? 140.0 + 20.0 * uniform01(rng) : 70.0 + 15.0 * uniform01(rng);
    const double click_amp = cls.arousal_high ? 0.5 : 0.12;
    const double noise_amp = cls.arousal_high ? 0.03 : 0.003;
    const double beat_s = 60.0 / bpm;

    for (std::size_t i = first; i < last; ++i) {
      const double t = static_cast<double>(i - first) / sr;
      double v = 0.0;
      for (int step : steps) {
        const double f = root * std::exp2(step / 12.0);
        v += chord_amp * (std::sin(kTwoPi * f * t) + 0.5 * std::sin(kTwoPi * 2.0 * f * t) + 0.25 * std::sin(kTwoPi * 3.0 * f * t));
      }
      const double since_beat = std::fmod(t, beat_s);
      if (since_beat < 0.02) v += click_amp * std::exp(-since_beat / 0.004) * std::sin(kTwoPi * 1500.0 * since_beat);
      v += noise_amp * normal(rng);
      audio.samples[i] = std::clamp(v, -1.0, 1.0);
    }
  }
  return audio;
}

MultichannelSignal synth_subject_eeg(const SynthConfig& cfg, std::size_t subject, std::size_t song) {
  const auto schedule = synth_schedule(cfg);
  const std::size_t segs = segments_per_song(cfg);
  const auto n = static_cast<std::size_t>(std::llround(cfg.trial_s * cfg.eeg_rate_hz));
  Rng rng(derive_seed(cfg.seed, {kEegStream, subject, song}));
  const double subject_shift = 0.05 * (uniform01(rng) - 0.5);

  MultichannelSignal eeg;
  eeg.sample_rate_hz = cfg.eeg_rate_hz;
  eeg.channels.assign(kEegChannelCount, std::vector<double>(n, 0.0));
  for (std::size_t c = 0; c < kEegChannelCount; ++c) {
    // Even canonical indices below 10 are left-hemisphere electrodes.
    const bool left = c < 10 && c % 2 == 0;
    const bool right = c < 10 && c % 2 == 1;
    double x = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto cls = schedule[song * segs + segment_at(cfg, static_cast<double>(i) / cfg.eeg_rate_hz)];
      double phi = (cls.arousal_high ? 0.2 : 0.8) + subject_shift;
      if (cls.valence_positive ? left : right) phi += 0.15;
      x = phi * x + std::sqrt(1.0 - phi * phi) * normal(rng);
      eeg.channels[c][i] = std::round(20.0 * x * 1e4) / 1e4;
    }
  }
  return eeg;
}

AnnotationStream synth_annotations(const SynthConfig& cfg, std::size_t subject, std::size_t song) {
  const auto schedule = synth_schedule(cfg);
  const std::size_t segs = segments_per_song(cfg);
  Rng rng(derive_seed(cfg.seed, {kAnnotationStream, subject, song}));
  std::vector<std::array<double, 2>> level(segs);
  for (auto& l : level) l = {0.3 + 0.4 * uniform01(rng), 0.3 + 0.4 * uniform01(rng)};

  AnnotationStream stream;
  const auto count = static_cast<std::int64_t>(std::floor(cfg.trial_s * 10.0 + 1e-9));
  for (std::int64_t k = 0; k < count; ++k) {
    const std::size_t g = segment_at(cfg, static_cast<double>(k) / 10.0);
    const auto cls = schedule[song * segs + g];
    auto draw = [&](double base, bool positive) {
      // Rounded to 1e-3 so the text form is short; magnitude stays >= 0.2.
      const double mag = std::clamp(base + 0.05 * normal(rng), 0.2, 1.0);
      return std::round((positive ? mag : -mag) * 1000.0) / 1000.0;
    };
    const double valence = draw(level[g][0], cls.valence_positive);
    const double arousal = draw(level[g][1], cls.arousal_high);
    stream.events.push_back({k * 100, valence, arousal});
  }
  return stream;
}

fs::path write_synthetic_dataset(const fs::path& dir, const SynthConfig& cfg) {
  check(cfg);
  DatasetManifest manifest;
  for (std::size_t song = 0; song < cfg.trials; ++song) {
    auto audio = synth_song_audio(cfg, song);
    save_wav(audio, dir / "audio" / (song_id(song) + ".wav"));
  }
  Rng meta(derive_seed(cfg.seed, {kMetaStream}));
  for (std::size_t s = 0; s < cfg.subjects; ++s) {
    SubjectRecord subject{subject_id(s), {}};
    for (std::size_t song = 0; song < cfg.trials; ++song) {
      const auto sid = subject_id(s), gid = song_id(song);
      TrialRef ref;
      ref.song_id = gid;
      ref.audio_path = dir / "audio" / (gid + ".wav");
      ref.eeg_path = dir / "eeg" / sid / (gid + ".csv");
      ref.annotation_path = dir / "annotations" / sid / (gid + ".csv");
      ref.familiarity = static_cast<int>(meta() % 2);
      ref.confidence = 1 + static_cast<int>(meta() % 3);
      save_eeg(synth_subject_eeg(cfg, s, song), ref.eeg_path);
      save_annotations(synth_annotations(cfg, s, song), ref.annotation_path);
      subject.trials.push_back(std::move(ref));
    }
    manifest.subjects.push_back(std::move(subject));
  }
  const auto path = dir / "manifest.json";
  save_manifest(manifest, path);
  return path;
}

}  // namespace emomusic
