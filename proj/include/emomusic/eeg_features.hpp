#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "emomusic/dataset.hpp"

namespace emomusic {

inline constexpr std::size_t kAsymmetryPairCount = 5;
inline constexpr std::size_t kEegFeatureCount = kEegChannelCount + kAsymmetryPairCount;  // 17

// (left, right) canonical channel indices: Fp1-Fp2, F3-F4, C3-C4, F7-F8, T3-T4.
inline constexpr std::array<std::pair<std::size_t, std::size_t>, kAsymmetryPairCount> kAsymmetryPairs = {
    {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {8, 9}}};

struct Band {
  double low_hz = 0.5;
  double high_hz = 60.0;
};

struct EegFeatureConfig {
  int k_max = 32;
  // Applied to the whole recording before windowing when set.
  std::optional<Band> bandpass;
};

struct EegFeatureVector {
  std::array<double, kEegChannelCount> fd{};
  std::array<double, kAsymmetryPairCount> asymmetry{};

  std::array<double, kEegFeatureCount> flatten() const;
};

// Column names in flatten() order: fd_Fp1 .. fd_Pz, asym_Fp1_Fp2 .. asym_T3_T4.
const std::array<std::string, kEegFeatureCount>& eeg_feature_names();

// Higuchi fractal dimension of `x` using delays k = 1..k_max.
// Throws TooShort (x.size() < 2*k_max or k_max < 2) or DegenerateSignal
// (some curve length is zero, e.g. constant input).
double higuchi_fd(std::span<const double> x, int k_max);

// Mean normalized curve length L(k) for k = 1..k_max (index 0 is k = 1).
std::vector<double> higuchi_curve_lengths(std::span<const double> x, int k_max);

// Zero-phase band-pass: 2nd-order Butterworth high-pass at low_hz cascaded
// with a 2nd-order Butterworth low-pass at high_hz, run forward and backward.
MultichannelSignal bandpass_filter(const MultichannelSignal& signal, double low_hz, double high_hz);
std::vector<double> bandpass_filter(std::span<const double> x, double sample_rate_hz, double low_hz, double high_hz);

// FD of each channel plus left-minus-right asymmetries. Higuchi errors are
// rethrown with the channel name in the message.
EegFeatureVector extract_eeg_features(const MultichannelSignal& window, const EegFeatureConfig& cfg);

}  // namespace emomusic
