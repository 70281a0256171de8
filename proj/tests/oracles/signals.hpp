#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "emomusic/dataset.hpp"

namespace signals {

inline emomusic::AudioSignal sine(double hz, double seconds, double amplitude = 1.0, double rate = 44100.0) {
  emomusic::AudioSignal a;
  a.sample_rate_hz = rate;
  a.samples.resize(static_cast<std::size_t>(seconds * rate));
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    a.samples[i] = amplitude * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / rate);
  return a;
}

inline emomusic::AudioSignal silence(double seconds, double rate = 44100.0) {
  return {std::vector<double>(static_cast<std::size_t>(seconds * rate), 0.0), rate};
}

// Decaying 1.5 kHz bursts at a fixed tempo.
inline emomusic::AudioSignal click_train(double bpm, double seconds, double rate = 44100.0) {
  auto a = silence(seconds, rate);
  const double beat = 60.0 / bpm;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const double t = static_cast<double>(i) / rate;
    const double since = std::fmod(t, beat);
    if (since < 0.02) a.samples[i] = 0.8 * std::exp(-since / 0.004) * std::sin(2.0 * std::numbers::pi * 1500.0 * since);
  }
  return a;
}

}  // namespace signals
