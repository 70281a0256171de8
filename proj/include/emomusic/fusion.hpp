#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "emomusic/rng.hpp"

namespace emomusic {

enum class Modality { Eeg, Music, Multimodal };

// Probability of class 1 (high arousal / positive valence); class 2 is the
// complement. `window_id` ties a probability to the window it describes.
struct ClassProbabilities {
  double p_class1 = 0.5;
  Modality modality = Modality::Eeg;
  std::int64_t window_id = -1;  // -1: unspecified
};

struct FusionConfig {
  double alpha = 0.5;  // weight of the EEG classifier
  std::uint64_t seed = 0;
};

// Weighted decision-level fusion: alpha * p_eeg + (1 - alpha) * p_music.
// Throws MismatchedWindows when both inputs carry different window ids,
// InvalidArgument for alpha or probabilities outside [0, 1].
ClassProbabilities fuse_decision(const ClassProbabilities& p_eeg, const ClassProbabilities& p_music, const FusionConfig& cfg);

// 1 if p > 0.5, 2 if p < 0.5, a fair coin from `rng` at exactly 0.5.
int decide(const ClassProbabilities& p, Rng& rng);

// Seed-based convenience: the generator is derived from (seed, window_id).
int decide(const ClassProbabilities& p, std::uint64_t seed);

// Feature-level fusion: EEG block (17) followed by music block (37).
// Throws DimensionMismatch on other sizes.
std::vector<double> fuse_features(std::span<const double> eeg, std::span<const double> music);

}  // namespace emomusic
