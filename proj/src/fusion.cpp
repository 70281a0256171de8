#include "emomusic/fusion.hpp"

#include "emomusic/eeg_features.hpp"
#include "emomusic/error.hpp"
#include "emomusic/music_features.hpp"

namespace emomusic {

namespace {
bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }
}  // namespace

ClassProbabilities fuse_decision(const ClassProbabilities& p_eeg, const ClassProbabilities& p_music, const FusionConfig& cfg) {
  if (!is_probability(cfg.alpha)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in [0, 1]");
  if (!is_probability(p_eeg.p_class1) || !is_probability(p_music.p_class1))
    throw Error(ErrorKind::InvalidArgument, "probabilities must lie in [0, 1]");
  if (p_eeg.window_id >= 0 && p_music.window_id >= 0 && p_eeg.window_id != p_music.window_id)
    throw Error(ErrorKind::MismatchedWindows, "EEG window " + std::to_string(p_eeg.window_id) +
                                                  " fused with music window " + std::to_string(p_music.window_id));
  ClassProbabilities out;
  out.p_class1 = cfg.alpha * p_eeg.p_class1 + (1.0 - cfg.alpha) * p_music.p_class1;
  out.modality = Modality::Multimodal;
  out.window_id = p_eeg.window_id >= 0 ? p_eeg.window_id : p_music.window_id;
  return out;
}

int decide(const ClassProbabilities& p, Rng& rng) {
  if (p.p_class1 > 0.5) return 1;
  if (p.p_class1 < 0.5) return 2;
  return fair_coin(rng) ? 1 : 2;
}

int decide(const ClassProbabilities& p, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(p.window_id)}));
  return decide(p, rng);
}

std::vector<double> fuse_features(std::span<const double> eeg, std::span<const double> music) {
  if (eeg.size() != kEegFeatureCount || music.size() != kMusicFeatureCount)
    throw Error(ErrorKind::DimensionMismatch, "expected 17 EEG and 37 music features, got " + std::to_string(eeg.size()) +
                                                  " and " + std::to_string(music.size()));
  std::vector<double> out(eeg.begin(), eeg.end());
  out.insert(out.end(), music.begin(), music.end());
  return out;
}

}  // namespace emomusic
