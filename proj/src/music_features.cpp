#include "emomusic/music_features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "emomusic/error.hpp"
#include "emomusic/spectrum.hpp"

namespace emomusic {

namespace {

constexpr double kLogFloor = 1e-10;
constexpr double kPeakPowerFraction = 0.01;
constexpr double kChromaLowHz = 55.0;
constexpr double kChromaHighHz = 2000.0;
// Envelope changes below this relative step count as flat when walking to
// the attack start/end; it keeps amplitude ripple from extending attacks.
constexpr double kEnvelopeFlatTolerance = 0.02;
// Partials further apart than this (in units of 1/(3.5 s)) contribute < e^-40.
constexpr double kDissonanceCutoff = 40.0;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

RealFft& fft_for(std::size_t n) {
  thread_local std::map<std::size_t, RealFft> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, RealFft(n)).first;
  return it->second;
}

double mean_of(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void require_min_duration(const AudioSignal& audio, double seconds) {
  if (audio.duration_s() + 1e-9 < seconds)
    throw Error(ErrorKind::TooShort, "need at least " + std::to_string(seconds) + " s of audio");
}

std::vector<double> envelope_rms(const AudioSignal& audio, std::size_t frame_len, std::size_t hop) {
  std::vector<double> env;
  const auto& x = audio.samples;
  if (x.size() < frame_len) return env;
  for (std::size_t start = 0; start + frame_len <= x.size(); start += hop) {
    double ss = 0.0;
    for (std::size_t i = 0; i < frame_len; ++i) ss += x[start + i] * x[start + i];
    env.push_back(std::sqrt(ss / static_cast<double>(frame_len)));
  }
  return env;
}

}  // namespace

void validate(const FrameConfig& cfg) {
  for (auto [len, hop, what] : {std::tuple{cfg.frame_len, cfg.hop, "frame"},
                                std::tuple{cfg.frame_len, cfg.onset_hop, "onset"},
                                std::tuple{cfg.envelope_frame_len, cfg.envelope_hop, "envelope"}}) {
    if (hop == 0 || hop > len)
      throw Error(ErrorKind::InvalidArgument, std::string(what) + " hop must satisfy 0 < hop <= frame length");
  }
  if (!is_power_of_two(cfg.frame_len) || !is_power_of_two(cfg.roughness_frame_len))
    throw Error(ErrorKind::InvalidArgument, "frame lengths must be powers of two");
  if (!(cfg.min_bpm > 0 && cfg.min_bpm < cfg.max_bpm))
    throw Error(ErrorKind::InvalidArgument, "need 0 < min_bpm < max_bpm");
}

FrameSequence analyze_frames(const AudioSignal& audio, std::size_t frame_len, std::size_t hop) {
  if (hop == 0 || hop > frame_len || !is_power_of_two(frame_len))
    throw Error(ErrorKind::InvalidArgument, "invalid frame length/hop");
  const auto& x = audio.samples;
  if (x.size() < frame_len)
    throw Error(ErrorKind::TooShort, std::to_string(x.size()) + " samples is shorter than one frame of " + std::to_string(frame_len));

  FrameSequence seq;
  seq.sample_rate_hz = audio.sample_rate_hz;
  seq.frame_len = frame_len;
  seq.hop = hop;
  const std::size_t count = 1 + (x.size() - frame_len) / hop;
  seq.magnitudes = Matrix(count, frame_len / 2 + 1);
  seq.rms.resize(count);
  seq.times_s.resize(count);

  const auto window = hann_window(frame_len);
  auto& fft = fft_for(frame_len);
  std::vector<double> buf(frame_len);
  for (std::size_t f = 0; f < count; ++f) {
    const std::size_t start = f * hop;
    double ss = 0.0;
    for (std::size_t i = 0; i < frame_len; ++i) {
      const double v = x[start + i];
      ss += v * v;
      buf[i] = v * window[i];
    }
    seq.rms[f] = std::sqrt(ss / static_cast<double>(frame_len));
    seq.times_s[f] = (static_cast<double>(start) + 0.5 * static_cast<double>(frame_len)) / audio.sample_rate_hz;
    fft.magnitude(buf, seq.magnitudes.row(f));
  }
  return seq;
}

double rms_mean(const FrameSequence& frames) {
  if (frames.frame_count() == 0) throw Error(ErrorKind::TooFewFrames, "no frames");
  return mean_of(frames.rms);
}

double zero_crossing_rate(const AudioSignal& audio, const FrameConfig& cfg) {
  const auto& x = audio.samples;
  if (x.size() < cfg.frame_len) throw Error(ErrorKind::TooShort, "shorter than one frame");
  double total = 0.0;
  std::size_t frames = 0;
  for (std::size_t start = 0; start + cfg.frame_len <= x.size(); start += cfg.hop, ++frames) {
    std::size_t crossings = 0;
    for (std::size_t i = start + 1; i < start + cfg.frame_len; ++i)
      if ((x[i - 1] < 0.0 && x[i] > 0.0) || (x[i - 1] > 0.0 && x[i] < 0.0)) ++crossings;
    total += static_cast<double>(crossings) / static_cast<double>(cfg.frame_len);
  }
  return total / static_cast<double>(frames);
}

double low_energy_rate(std::span<const double> frame_rms) {
  if (frame_rms.empty()) throw Error(ErrorKind::TooFewFrames, "no frames");
  const double mean = mean_of(frame_rms);
  // Rounding in the mean must not push equal frames "below" it.
  const double threshold = mean - 1e-12 * std::abs(mean);
  const auto below = std::count_if(frame_rms.begin(), frame_rms.end(), [&](double r) { return r < threshold; });
  return static_cast<double>(below) / static_cast<double>(frame_rms.size());
}

double spectral_flux(const FrameSequence& frames) {
  const auto n = frames.frame_count();
  if (n < 2) return 0.0;
  double total = 0.0;
  for (std::size_t f = 1; f < n; ++f) {
    const auto a = frames.magnitudes.row(f - 1);
    const auto b = frames.magnitudes.row(f);
    double ss = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) ss += (b[k] - a[k]) * (b[k] - a[k]);
    total += std::sqrt(ss);
  }
  return total / static_cast<double>(n - 1);
}

// ---------------------------------------------------------------------------
// MFCC

namespace {
double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }
}  // namespace

Matrix mel_filterbank(std::size_t frame_len, double sample_rate_hz) {
  const std::size_t bins = frame_len / 2 + 1;
  const double lo_mel = hz_to_mel(kMelLowHz);
  const double hi_mel = hz_to_mel(sample_rate_hz / 2.0);
  std::array<double, kMelBandCount + 2> edges{};
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(lo_mel + (hi_mel - lo_mel) * static_cast<double>(i) / static_cast<double>(kMelBandCount + 1));

  Matrix fb(kMelBandCount, bins);
  for (std::size_t b = 0; b < kMelBandCount; ++b) {
    const double lo = edges[b], ctr = edges[b + 1], hi = edges[b + 2];
    const double height = 2.0 / (hi - lo);
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate_hz / static_cast<double>(frame_len);
      double w = 0.0;
      if (f >= lo && f <= ctr) w = (f - lo) / (ctr - lo);
      else if (f > ctr && f <= hi) w = (hi - f) / (hi - ctr);
      fb(b, k) = w * height;
    }
  }
  return fb;
}

Matrix mfcc_frames(const FrameSequence& frames) {
  const Matrix fb = mel_filterbank(frames.frame_len, frames.sample_rate_hz);
  const auto m = static_cast<double>(kMelBandCount);
  Matrix dct(kMfccCount, kMelBandCount);
  for (std::size_t n = 1; n <= kMfccCount; ++n)
    for (std::size_t b = 0; b < kMelBandCount; ++b)
      dct(n - 1, b) = std::sqrt(2.0 / m) * std::cos(std::numbers::pi * static_cast<double>(n) * (static_cast<double>(b) + 0.5) / m);

  Matrix out(frames.frame_count(), kMfccCount);
  std::array<double, kMelBandCount> log_energy{};
  for (std::size_t f = 0; f < frames.frame_count(); ++f) {
    const auto mag = frames.magnitudes.row(f);
    for (std::size_t b = 0; b < kMelBandCount; ++b) {
      const auto w = fb.row(b);
      double e = 0.0;
      for (std::size_t k = 0; k < mag.size(); ++k) e += w[k] * mag[k] * mag[k];
      log_energy[b] = std::log(std::max(e, kLogFloor));
    }
    for (std::size_t n = 0; n < kMfccCount; ++n) {
      const auto d = dct.row(n);
      out(f, n) = std::inner_product(d.begin(), d.end(), log_energy.begin(), 0.0);
    }
  }
  return out;
}

MfccSummary mfcc_mean(const FrameSequence& frames) {
  const auto n = frames.frame_count();
  if (n < 2) throw Error(ErrorKind::TooFewFrames, "MFCC deltas need at least 2 frames");
  const Matrix c = mfcc_frames(frames);
  MfccSummary s;
  for (std::size_t j = 0; j < kMfccCount; ++j) {
    double sum = 0.0, dsum = 0.0;
    for (std::size_t f = 0; f < n; ++f) {
      sum += c(f, j);
      if (f > 0) dsum += c(f, j) - c(f - 1, j);
    }
    s.mfcc[j] = sum / static_cast<double>(n);
    s.dmfcc[j] = dsum / static_cast<double>(n - 1);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Roughness

double plomp_levelt_dissonance(double f1, double f2, double a1, double a2) {
  const double s = 0.24 / (0.021 * std::min(f1, f2) + 19.0);
  const double df = std::abs(f2 - f1);
  return a1 * a2 * (std::exp(-3.5 * s * df) - std::exp(-5.75 * s * df));
}

std::vector<SpectralPeak> spectral_peaks(const FrameSequence& frames, std::size_t frame) {
  const auto mag = frames.magnitudes.row(frame);
  const double peak = *std::max_element(mag.begin(), mag.end());
  std::vector<SpectralPeak> peaks;
  if (!(peak > 0.0)) return peaks;
  // Amplitudes are scaled so a full-scale sinusoid reads ~1.
  const double scale = 4.0 / static_cast<double>(frames.frame_len);
  const double min_power = kPeakPowerFraction * peak * peak;
  for (std::size_t k = 1; k + 1 < mag.size(); ++k) {
    if (mag[k] > mag[k - 1] && mag[k] >= mag[k + 1] && mag[k] * mag[k] >= min_power)
      peaks.push_back({frames.bin_hz(k), mag[k] * scale, k});
  }
  return peaks;
}

double roughness_mean(const FrameSequence& frames) {
  if (frames.frame_count() == 0) throw Error(ErrorKind::TooFewFrames, "no frames");
  const double bin = frames.bin_hz(1);
  double total = 0.0;
  for (std::size_t f = 0; f < frames.frame_count(); ++f) {
    const auto peaks = spectral_peaks(frames, f);  // ascending frequency, on the bin grid
    double r = 0.0;
    for (std::size_t i = 0; i < peaks.size(); ++i) {
      const double s = 0.24 / (0.021 * peaks[i].hz + 19.0);
      // Peak spacings are whole bins, so both exponentials are powers of a per-bin factor.
      const double q1 = std::exp(-3.5 * s * bin), q2 = std::exp(-5.75 * s * bin);
      double e1 = 1.0, e2 = 1.0;
      std::size_t m = 0;
      for (std::size_t j = i + 1; j < peaks.size(); ++j) {
        if (3.5 * s * (peaks[j].hz - peaks[i].hz) > kDissonanceCutoff) break;
        for (const std::size_t target = peaks[j].bin - peaks[i].bin; m < target; ++m) {
          e1 *= q1;
          e2 *= q2;
        }
        r += peaks[i].amplitude * peaks[j].amplitude * (e1 - e2);
      }
    }
    total += r;
  }
  return total / static_cast<double>(frames.frame_count());
}

// ---------------------------------------------------------------------------
// Rhythm

std::vector<double> onset_strength(const FrameSequence& frames) {
  std::vector<double> curve(frames.frame_count(), 0.0);
  for (std::size_t f = 1; f < frames.frame_count(); ++f) {
    const auto a = frames.magnitudes.row(f - 1);
    const auto b = frames.magnitudes.row(f);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += std::max(0.0, b[k] - a[k]);
    curve[f] = s;
  }
  return curve;
}

TempoEstimate tempo_from_onsets(std::span<const double> onset_curve, double frames_per_second, const FrameConfig& cfg) {
  TempoEstimate est{cfg.neutral_tempo_bpm, true};
  const auto n = onset_curve.size();
  if (n < 3) return est;

  const double mean = mean_of(onset_curve);
  std::vector<double> centred(n);
  double energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    centred[i] = onset_curve[i] - mean;
    energy += centred[i] * centred[i];
  }
  const double scale = std::max(1.0, std::abs(mean));
  if (!(energy > 1e-12 * scale * scale * static_cast<double>(n))) return est;

  const auto lag_lo = static_cast<std::size_t>(std::max(1.0, std::ceil(60.0 * frames_per_second / cfg.max_bpm)));
  const auto lag_hi = std::min<std::size_t>(n - 2, static_cast<std::size_t>(std::floor(60.0 * frames_per_second / cfg.min_bpm)));
  if (lag_lo > lag_hi) return est;

  auto autocorr = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += centred[i] * centred[i + lag];
    return s;
  };
  std::size_t best = lag_lo;
  double best_val = autocorr(lag_lo);
  for (std::size_t lag = lag_lo + 1; lag <= lag_hi; ++lag) {
    const double v = autocorr(lag);
    if (v > best_val) {
      best_val = v;
      best = lag;
    }
  }
  if (!(best_val > 0.0)) return est;

  // Parabolic refinement of the peak lag.
  double lag = static_cast<double>(best);
  if (best >= 1 && best + 1 < n) {
    const double a = autocorr(best - 1), c = autocorr(best + 1);
    const double denom = a - 2.0 * best_val + c;
    if (denom < 0.0) lag += std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  }
  est.bpm = std::clamp(60.0 * frames_per_second / lag, cfg.min_bpm, cfg.max_bpm);
  est.no_onsets = false;
  return est;
}

TempoEstimate tempo_estimate(const AudioSignal& audio, const FrameConfig& cfg) {
  require_min_duration(audio, 2.0);
  const auto frames = analyze_frames(audio, cfg.frame_len, cfg.onset_hop);
  const auto curve = onset_strength(frames);
  return tempo_from_onsets(curve, audio.sample_rate_hz / static_cast<double>(cfg.onset_hop), cfg);
}

namespace {

AttackEstimate attacks_from_onsets(const AudioSignal& audio, std::span<const double> curve, const FrameSequence& onset_frames,
                                   const FrameConfig& cfg) {
  AttackEstimate est;
  est.no_onsets = true;
  const auto n = curve.size();
  if (n < 3) return est;

  const double mean = mean_of(curve);
  double var = 0.0;
  for (double v : curve) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  if (!(sd > 0.0)) return est;
  const double threshold = mean + sd;

  const auto env = envelope_rms(audio, cfg.envelope_frame_len, cfg.envelope_hop);
  if (env.size() < 2) return est;
  const double env_rate = audio.sample_rate_hz / static_cast<double>(cfg.envelope_hop);
  auto env_index_at = [&](double t_s) {
    const double centre_offset = 0.5 * static_cast<double>(cfg.envelope_frame_len) / audio.sample_rate_hz;
    const auto j = std::llround((t_s - centre_offset) * env_rate);
    return static_cast<std::size_t>(std::clamp<long long>(j, 0, static_cast<long long>(env.size()) - 1));
  };

  double sum_time = 0.0, sum_slope = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 1; t + 1 < n; ++t) {
    if (!(curve[t] > curve[t - 1] && curve[t] >= curve[t + 1] && curve[t] > threshold)) continue;
    // Walk the envelope up to its peak, then back down to the preceding minimum.
    std::size_t end = env_index_at(onset_frames.times_s[t]);
    while (end + 1 < env.size() && env[end + 1] > env[end] * (1.0 + kEnvelopeFlatTolerance)) ++end;
    std::size_t start = end;
    while (start > 0 && env[start - 1] < env[start] * (1.0 - kEnvelopeFlatTolerance)) --start;
    if (start == end) continue;
    const double dt = static_cast<double>(end - start) / env_rate;
    sum_time += dt;
    sum_slope += (env[end] - env[start]) / dt;
    ++count;
  }
  if (count == 0) return est;
  est.time_s = sum_time / static_cast<double>(count);
  est.slope = sum_slope / static_cast<double>(count);
  est.onset_count = count;
  est.no_onsets = false;
  return est;
}

}  // namespace

AttackEstimate attack_features(const AudioSignal& audio, const FrameConfig& cfg) {
  const auto frames = analyze_frames(audio, cfg.frame_len, cfg.onset_hop);
  const auto curve = onset_strength(frames);
  return attacks_from_onsets(audio, curve, frames, cfg);
}

// ---------------------------------------------------------------------------
// Tonal

const std::array<double, 12> kMajorKeyProfile = {6.35, 2.23, 3.48, 2.33, 4.38, 4.09, 2.52, 5.19, 2.39, 3.66, 2.29, 2.88};
const std::array<double, 12> kMinorKeyProfile = {6.33, 2.68, 3.52, 5.38, 2.60, 3.53, 2.54, 4.75, 3.98, 2.69, 3.34, 3.17};

Matrix chromagram(const FrameSequence& frames) {
  // Pitch class of each bin, or -1 outside the analysed range.
  std::vector<int> pitch_class(frames.bins(), -1);
  for (std::size_t k = 1; k < frames.bins(); ++k) {
    const double f = frames.bin_hz(k);
    if (f < kChromaLowHz || f > kChromaHighHz) continue;
    const auto semis_from_a = static_cast<long>(std::lround(12.0 * std::log2(f / 440.0)));
    pitch_class[k] = static_cast<int>((((semis_from_a + 9) % 12) + 12) % 12);
  }

  Matrix chroma(frames.frame_count(), 12);
  for (std::size_t f = 0; f < frames.frame_count(); ++f) {
    const auto mag = frames.magnitudes.row(f);
    auto row = chroma.row(f);
    for (std::size_t k = 0; k < mag.size(); ++k)
      if (pitch_class[k] >= 0) row[static_cast<std::size_t>(pitch_class[k])] += mag[k] * mag[k];
    const double total = std::accumulate(row.begin(), row.end(), 0.0);
    if (total > 0.0)
      for (double& v : row) v /= total;
  }
  return chroma;
}

std::array<double, 12> mean_chroma(const Matrix& chroma) {
  std::array<double, 12> m{};
  if (chroma.rows() == 0) return m;
  for (std::size_t f = 0; f < chroma.rows(); ++f)
    for (std::size_t c = 0; c < 12; ++c) m[c] += chroma(f, c);
  for (double& v : m) v /= static_cast<double>(chroma.rows());
  return m;
}

namespace {

// Pearson correlation of x with `profile` rotated to tonic `tonic`.
double profile_correlation(std::span<const double, 12> x, const std::array<double, 12>& profile, std::size_t tonic) {
  double mx = 0, mp = 0;
  for (std::size_t i = 0; i < 12; ++i) {
    mx += x[i];
    mp += profile[i];
  }
  mx /= 12;
  mp /= 12;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < 12; ++i) {
    const double dx = x[i] - mx;
    const double dp = profile[(i + 12 - tonic) % 12] - mp;
    sxy += dx * dp;
    sxx += dx * dx;
    syy += dp * dp;
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

KeyEstimate key_clarity_mode(std::span<const double, 12> chroma) {
  const double mean = std::accumulate(chroma.begin(), chroma.end(), 0.0) / 12.0;
  double var = 0.0;
  for (double v : chroma) var += (v - mean) * (v - mean);
  if (!(var > 1e-18 * std::max(1.0, mean * mean))) return {0.0, 0.0, true};

  double best_major = -1.0, best_minor = -1.0;
  for (std::size_t tonic = 0; tonic < 12; ++tonic) {
    best_major = std::max(best_major, profile_correlation(chroma, kMajorKeyProfile, tonic));
    best_minor = std::max(best_minor, profile_correlation(chroma, kMinorKeyProfile, tonic));
  }
  return {std::max(best_major, best_minor), best_major - best_minor, false};
}

std::array<double, 6> tonal_centroid(std::span<const double> chroma) {
  // Circle of fifths, minor thirds, major thirds with radii 1, 1, 0.5.
  constexpr double kPi = std::numbers::pi;
  std::array<double, 6> z{};
  double norm = 0.0;
  for (double v : chroma) norm += std::abs(v);
  if (!(norm > 0.0)) return z;
  for (std::size_t l = 0; l < 12; ++l) {
    const double c = chroma[l] / norm;
    const double li = static_cast<double>(l);
    z[0] += c * std::sin(li * 7.0 * kPi / 6.0);
    z[1] += c * std::cos(li * 7.0 * kPi / 6.0);
    z[2] += c * std::sin(li * 3.0 * kPi / 2.0);
    z[3] += c * std::cos(li * 3.0 * kPi / 2.0);
    z[4] += c * 0.5 * std::sin(li * 2.0 * kPi / 3.0);
    z[5] += c * 0.5 * std::cos(li * 2.0 * kPi / 3.0);
  }
  return z;
}

double hcdf_mean(const Matrix& chroma) {
  const auto n = chroma.rows();
  if (n < 3) return 0.0;
  std::vector<std::array<double, 6>> centroids;
  centroids.reserve(n);
  for (std::size_t f = 0; f < n; ++f) centroids.push_back(tonal_centroid(chroma.row(f)));
  double total = 0.0;
  for (std::size_t t = 1; t + 1 < n; ++t) {
    double ss = 0.0;
    for (std::size_t d = 0; d < 6; ++d) {
      const double diff = centroids[t + 1][d] - centroids[t - 1][d];
      ss += diff * diff;
    }
    total += std::sqrt(ss);
  }
  return total / static_cast<double>(n - 2);
}

// ---------------------------------------------------------------------------

std::array<double, kMusicFeatureCount> MusicFeatureVector::flatten() const {
  std::array<double, kMusicFeatureCount> out{};
  std::size_t i = 0;
  out[i++] = rms;
  out[i++] = tempo_bpm;
  out[i++] = attack_time_s;
  out[i++] = attack_slope;
  out[i++] = roughness;
  for (double v : mfcc) out[i++] = v;
  for (double v : dmfcc) out[i++] = v;
  out[i++] = zero_cross_rate;
  out[i++] = low_energy_rate;
  out[i++] = spectral_flux;
  out[i++] = key_clarity;
  out[i++] = mode;
  out[i++] = hcdf;
  return out;
}

const std::array<std::string, kMusicFeatureCount>& music_feature_names() {
  static const auto names = [] {
    std::array<std::string, kMusicFeatureCount> n;
    std::size_t i = 0;
    for (const char* s : {"rms", "tempo", "attack_time", "attack_slope", "roughness"}) n[i++] = s;
    for (std::size_t j = 1; j <= kMfccCount; ++j) n[i++] = "mfcc_" + std::to_string(j);
    for (std::size_t j = 1; j <= kMfccCount; ++j) n[i++] = "dmfcc_" + std::to_string(j);
    for (const char* s : {"zero_cross", "low_energy", "spectral_flux", "key_clarity", "mode", "hcdf"}) n[i++] = s;
    return n;
  }();
  return names;
}

MusicFeatureVector extract_music_features(const AudioSignal& window, const FrameConfig& cfg) {
  validate(cfg);
  require_min_duration(window, 2.0);

  MusicFeatureVector v;
  const auto frames = analyze_frames(window, cfg);
  v.rms = rms_mean(frames);
  v.zero_cross_rate = zero_crossing_rate(window, cfg);
  v.low_energy_rate = low_energy_rate(frames);
  v.spectral_flux = spectral_flux(frames);
  const auto mfcc = mfcc_mean(frames);
  v.mfcc = mfcc.mfcc;
  v.dmfcc = mfcc.dmfcc;

  v.roughness = roughness_mean(analyze_frames(window, cfg.roughness_frame_len, cfg.roughness_frame_len / 2));

  const auto onset_frames = analyze_frames(window, cfg.frame_len, cfg.onset_hop);
  const auto curve = onset_strength(onset_frames);
  const auto tempo = tempo_from_onsets(curve, window.sample_rate_hz / static_cast<double>(cfg.onset_hop), cfg);
  v.tempo_bpm = tempo.bpm;
  v.tempo_no_onsets = tempo.no_onsets;
  const auto attack = attacks_from_onsets(window, curve, onset_frames, cfg);
  v.attack_time_s = attack.time_s;
  v.attack_slope = attack.slope;
  v.attack_no_onsets = attack.no_onsets;

  const auto chroma = chromagram(frames);
  const auto mean = mean_chroma(chroma);
  const auto key = key_clarity_mode(mean);
  v.key_clarity = key.key_clarity;
  v.mode = key.mode;
  v.flat_chroma = key.flat_chroma;
  v.hcdf = hcdf_mean(chroma);
  return v;
}

}  // namespace emomusic
