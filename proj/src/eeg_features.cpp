#include "emomusic/eeg_features.hpp"

#include <cmath>
#include <numbers>

#include "emomusic/error.hpp"
#include "emomusic/text_io.hpp"

namespace emomusic {

std::array<double, kEegFeatureCount> EegFeatureVector::flatten() const {
  std::array<double, kEegFeatureCount> out{};
  std::copy(fd.begin(), fd.end(), out.begin());
  std::copy(asymmetry.begin(), asymmetry.end(), out.begin() + kEegChannelCount);
  return out;
}

const std::array<std::string, kEegFeatureCount>& eeg_feature_names() {
  static const auto names = [] {
    std::array<std::string, kEegFeatureCount> n;
    for (std::size_t c = 0; c < kEegChannelCount; ++c) n[c] = "fd_" + std::string(kEegChannels[c]);
    for (std::size_t p = 0; p < kAsymmetryPairCount; ++p) {
      const auto [l, r] = kAsymmetryPairs[p];
      n[kEegChannelCount + p] = "asym_" + std::string(kEegChannels[l]) + "_" + std::string(kEegChannels[r]);
    }
    return n;
  }();
  return names;
}

std::vector<double> higuchi_curve_lengths(std::span<const double> x, int k_max) {
  const auto n = x.size();
  if (k_max < 2) throw Error(ErrorKind::TooShort, "k_max must be at least 2");
  if (n < 2 * static_cast<std::size_t>(k_max))
    throw Error(ErrorKind::TooShort,
                std::to_string(n) + " samples is fewer than 2*k_max = " + std::to_string(2 * k_max));

  std::vector<double> lengths(static_cast<std::size_t>(k_max));
  const double span = static_cast<double>(n - 1);
  for (std::size_t k = 1; k <= static_cast<std::size_t>(k_max); ++k) {
    double sum_over_offsets = 0.0;
    // Offset m is 1-based in the usual statement; here m is the 0-based start.
    for (std::size_t m = 0; m < k; ++m) {
      const std::size_t steps = (n - 1 - m) / k;
      double path = 0.0;
      for (std::size_t i = 1; i <= steps; ++i) path += std::abs(x[m + i * k] - x[m + (i - 1) * k]);
      const auto kd = static_cast<double>(k);
      sum_over_offsets += path * span / (static_cast<double>(steps) * kd * kd);
    }
    lengths[k - 1] = sum_over_offsets / static_cast<double>(k);
  }
  return lengths;
}

double higuchi_fd(std::span<const double> x, int k_max) {
  const auto lengths = higuchi_curve_lengths(x, k_max);

  // Least-squares slope of ln L(k) against ln(1/k).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (!(lengths[i] > 0.0))
      throw Error(ErrorKind::DegenerateSignal, "curve length is zero at k = " + std::to_string(i + 1));
    const double lx = -std::log(static_cast<double>(i + 1));
    const double ly = std::log(lengths[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const auto m = static_cast<double>(lengths.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// Filtering

namespace {

struct Biquad {
  double b0, b1, b2, a1, a2;  // a0 == 1

  // Direct form II transposed, initial state set to the steady-state response
  // to a constant input equal to x[0].
  void run(std::vector<double>& x) const {
    if (x.empty()) return;
    const double dc = (b0 + b1 + b2) / (1.0 + a1 + a2);
    const double y0 = dc * x[0];
    double z1 = y0 - b0 * x[0];
    double z2 = b2 * x[0] - a2 * y0;
    for (double& v : x) {
      const double in = v;
      const double out = b0 * in + z1;
      z1 = b1 * in - a1 * out + z2;
      z2 = b2 * in - a2 * out;
      v = out;
    }
  }
};

// Bilinear transform of the 2nd-order Butterworth prototype with prewarping.
Biquad butterworth_lowpass(double fc, double fs) {
  const double k = std::tan(std::numbers::pi * fc / fs);
  const double q = std::numbers::sqrt2;
  const double norm = 1.0 / (1.0 + q * k + k * k);
  const double b0 = k * k * norm;
  return {b0, 2 * b0, b0, 2 * (k * k - 1) * norm, (1 - q * k + k * k) * norm};
}

Biquad butterworth_highpass(double fc, double fs) {
  const double k = std::tan(std::numbers::pi * fc / fs);
  const double q = std::numbers::sqrt2;
  const double norm = 1.0 / (1.0 + q * k + k * k);
  return {norm, -2 * norm, norm, 2 * (k * k - 1) * norm, (1 - q * k + k * k) * norm};
}

// Odd extension about each end, as used by common zero-phase filtering
// routines, to suppress edge transients.
std::vector<double> odd_extend(std::span<const double> x, std::size_t pad) {
  std::vector<double> out;
  out.reserve(x.size() + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) out.push_back(2 * x.front() - x[i]);
  out.insert(out.end(), x.begin(), x.end());
  const auto n = x.size();
  for (std::size_t i = 1; i <= pad; ++i) out.push_back(2 * x.back() - x[n - 1 - i]);
  return out;
}

}  // namespace

std::vector<double> bandpass_filter(std::span<const double> x, double sample_rate_hz, double low_hz, double high_hz) {
  if (!(low_hz > 0) || !(low_hz < high_hz) || !(high_hz < sample_rate_hz / 2))
    throw Error(ErrorKind::InvalidBand, "need 0 < low < high < fs/2, got (" + text::format_double(low_hz) + ", " +
                                            text::format_double(high_hz) + ") at fs = " + text::format_double(sample_rate_hz));
  if (x.size() < 2) return {x.begin(), x.end()};

  const Biquad hp = butterworth_highpass(low_hz, sample_rate_hz);
  const Biquad lp = butterworth_lowpass(high_hz, sample_rate_hz);
  const std::size_t pad = std::min<std::size_t>(x.size() - 1, static_cast<std::size_t>(3 * sample_rate_hz / low_hz));

  auto y = odd_extend(x, pad);
  for (int pass = 0; pass < 2; ++pass) {
    hp.run(y);
    lp.run(y);
    std::reverse(y.begin(), y.end());
  }
  return {y.begin() + static_cast<std::ptrdiff_t>(pad), y.end() - static_cast<std::ptrdiff_t>(pad)};
}

MultichannelSignal bandpass_filter(const MultichannelSignal& signal, double low_hz, double high_hz) {
  MultichannelSignal out;
  out.sample_rate_hz = signal.sample_rate_hz;
  out.channels.reserve(signal.channels.size());
  for (const auto& ch : signal.channels)
    out.channels.push_back(bandpass_filter(ch, signal.sample_rate_hz, low_hz, high_hz));
  return out;
}

EegFeatureVector extract_eeg_features(const MultichannelSignal& window, const EegFeatureConfig& cfg) {
  if (window.channels.size() != kEegChannelCount)
    throw Error(ErrorKind::ChannelCountMismatch, "expected 12 channels, got " + std::to_string(window.channels.size()));
  EegFeatureVector v;
  for (std::size_t c = 0; c < kEegChannelCount; ++c) {
    try {
      v.fd[c] = higuchi_fd(window.channels[c], cfg.k_max);
    } catch (const Error& e) {
      throw Error(e.kind(), "channel " + std::string(kEegChannels[c]) + ": " + e.what());
    }
  }
  for (std::size_t p = 0; p < kAsymmetryPairCount; ++p) {
    const auto [l, r] = kAsymmetryPairs[p];
    v.asymmetry[p] = v.fd[l] - v.fd[r];
  }
  return v;
}

}  // namespace emomusic
