#include <cmath>
#include <random>

#include <doctest.h>

#include "emomusic/eeg_features.hpp"
#include "helpers.hpp"
#include "oracles/oracles.hpp"

using namespace emomusic;
using test::error_kind;

namespace {

double rms(const std::vector<double>& x, std::size_t skip = 0) {
  double s = 0.0;
  for (std::size_t i = skip; i < x.size() - skip; ++i) s += x[i] * x[i];
  return std::sqrt(s / static_cast<double>(x.size() - 2 * skip));
}

std::vector<double> sine_samples(double hz, double fs, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / fs);
  return x;
}

MultichannelSignal window_of(const std::vector<std::vector<double>>& channels) { return {channels, 250.0}; }

}  // namespace

TEST_CASE("Higuchi FD reference signals") {
  std::vector<double> ramp(1000);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
  CHECK(std::fabs(higuchi_fd(ramp, 32) - 1.0) <= 0.01);

  const auto noise = oracle::white_noise(500, 42);
  const double fd_noise = higuchi_fd(noise, 32);
  CHECK(fd_noise >= 1.90);
  CHECK(fd_noise <= 2.05);
  CHECK(fd_noise == doctest::Approx(oracle::higuchi(noise, 32)).epsilon(1e-12));

  const auto walk = oracle::random_walk(2000, 42);
  const double fd_walk = higuchi_fd(walk, 32);
  CHECK(std::fabs(fd_walk - 1.5) <= 0.1);
  CHECK(fd_walk == doctest::Approx(oracle::higuchi(walk, 32)).epsilon(1e-12));

  const double fd_sine = higuchi_fd(sine_samples(3.0, 250.0, 2000), 32);
  CHECK(fd_noise > fd_walk);
  CHECK(fd_walk > fd_sine);
}

TEST_CASE("Higuchi FD matches the direct definition") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 100 + rng() % 900;
    const int k_max = 2 + static_cast<int>(rng() % std::min<std::size_t>(40, n / 2 - 1));
    auto x = oracle::white_noise(n, rng());
    if (trial % 2) x = oracle::random_walk(n, rng());
    CHECK(std::fabs(higuchi_fd(x, k_max) - oracle::higuchi(x, k_max)) < 1e-9);
  }
}

TEST_CASE("Higuchi FD invariances") {
  const auto x = oracle::white_noise(600, 3);
  const double base = higuchi_fd(x, 32);
  for (double c : {-3.0, 0.001, 1e6}) {
    auto y = x;
    for (auto& v : y) v *= c;
    CHECK(higuchi_fd(y, 32) == doctest::Approx(base).epsilon(1e-12));
  }
  auto shifted = x;
  for (auto& v : shifted) v += 1234.5;
  CHECK(higuchi_fd(shifted, 32) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("Higuchi FD errors") {
  CHECK(error_kind([] { higuchi_fd(std::vector<double>(500, 3.0), 32); }) == ErrorKind::DegenerateSignal);
  CHECK(error_kind([] { higuchi_fd(oracle::white_noise(63, 1), 32); }) == ErrorKind::TooShort);
  CHECK(error_kind([] { higuchi_fd(oracle::white_noise(100, 1), 1); }) == ErrorKind::TooShort);
  CHECK_NOTHROW(higuchi_fd(oracle::white_noise(64, 1), 32));
}

TEST_CASE("band-pass filter follows the analytic Butterworth response") {
  const double fs = 250.0;
  const std::size_t n = 5000;
  for (double hz : {1.0, 5.0, 10.0, 30.0, 50.0, 80.0, 100.0}) {
    const auto x = sine_samples(hz, fs, n);
    const auto y = bandpass_filter(x, fs, 0.5, 60.0);
    REQUIRE(y.size() == x.size());
    const double measured = rms(y, 500) / rms(x, 500);
    CHECK(measured == doctest::Approx(oracle::bandpass_gain(hz, fs, 0.5, 60.0)).epsilon(0.02));
  }
  const auto x100 = sine_samples(100.0, fs, n);
  CHECK(rms(bandpass_filter(x100, fs, 0.5, 60.0)) < 0.1 * rms(x100));
  const auto x10 = sine_samples(10.0, fs, n);
  CHECK(std::fabs(rms(bandpass_filter(x10, fs, 0.5, 60.0)) / rms(x10) - 1.0) < 0.1);
}

TEST_CASE("band-pass filter is zero-phase") {
  const auto x = sine_samples(10.0, 250.0, 2500);
  const auto y = bandpass_filter(x, 250.0, 0.5, 60.0);
  // Peak positions of the interior are unchanged.
  double lag_corr_0 = 0, lag_corr_1 = 0;
  for (std::size_t i = 500; i < 2000; ++i) {
    lag_corr_0 += x[i] * y[i];
    lag_corr_1 += x[i + 1] * y[i];
  }
  CHECK(lag_corr_0 > lag_corr_1);
}

TEST_CASE("band-pass filter errors") {
  const auto x = sine_samples(10.0, 250.0, 500);
  CHECK(error_kind([&] { bandpass_filter(x, 250.0, 60.0, 0.5); }) == ErrorKind::InvalidBand);
  CHECK(error_kind([&] { bandpass_filter(x, 250.0, 0.5, 125.0); }) == ErrorKind::InvalidBand);
  CHECK(error_kind([&] { bandpass_filter(x, 250.0, 0.0, 60.0); }) == ErrorKind::InvalidBand);
  MultichannelSignal s{std::vector<std::vector<double>>(kEegChannelCount, x), 250.0};
  const auto f = bandpass_filter(s, 0.5, 60.0);
  CHECK(f.sample_count() == 500);
  CHECK(f.channels[3] == bandpass_filter(x, 250.0, 0.5, 60.0));
}

TEST_CASE("EEG feature vector") {
  SUBCASE("identical channels have zero asymmetry") {
    const auto x = oracle::white_noise(500, 1);
    const auto v = extract_eeg_features(window_of(std::vector<std::vector<double>>(kEegChannelCount, x)), {});
    for (double a : v.asymmetry) CHECK(a == 0.0);
    const auto flat = v.flatten();
    CHECK(flat.size() == 17);
    for (std::size_t c = 0; c < kEegChannelCount; ++c) CHECK(flat[c] > 0.0);
  }
  SUBCASE("asymmetry is left minus right and swapping pairs negates it") {
    std::vector<std::vector<double>> ch;
    for (std::size_t c = 0; c < kEegChannelCount; ++c)
      ch.push_back(c % 2 ? oracle::random_walk(500, c) : oracle::white_noise(500, c));
    const auto v = extract_eeg_features(window_of(ch), {});
    for (std::size_t p = 0; p < kAsymmetryPairCount; ++p) {
      const auto [l, r] = kAsymmetryPairs[p];
      CHECK(v.asymmetry[p] == v.fd[l] - v.fd[r]);
      CHECK(v.asymmetry[p] > 0.0);
    }
    auto swapped = ch;
    for (const auto& [l, r] : kAsymmetryPairs) std::swap(swapped[l], swapped[r]);
    const auto w = extract_eeg_features(window_of(swapped), {});
    for (std::size_t p = 0; p < kAsymmetryPairCount; ++p) CHECK(w.asymmetry[p] == -v.asymmetry[p]);
  }
  SUBCASE("errors name the channel") {
    std::vector<std::vector<double>> ch(kEegChannelCount, oracle::white_noise(500, 2));
    ch[3] = std::vector<double>(500, 1.0);
    try {
      extract_eeg_features(window_of(ch), {});
      FAIL("expected DegenerateSignal");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateSignal);
      CHECK(std::string(e.what()).find("F4") != std::string::npos);
    }
  }
  SUBCASE("names") {
    CHECK(eeg_feature_names().front() == "fd_Fp1");
    CHECK(eeg_feature_names()[12] == "asym_Fp1_Fp2");
    CHECK(eeg_feature_names().back() == "asym_T3_T4");
  }
}
