#include <random>

#include <doctest.h>

#include "emomusic/fusion.hpp"
#include "helpers.hpp"

using namespace emomusic;
using test::error_kind;

namespace {

ClassProbabilities eeg(double p, std::int64_t w = -1) { return {p, Modality::Eeg, w}; }
ClassProbabilities music(double p, std::int64_t w = -1) { return {p, Modality::Music, w}; }

}  // namespace

TEST_CASE("decision-level fusion") {
  CHECK(fuse_decision(eeg(0.8), music(0.6), {1.0, 0}).p_class1 == 0.8);
  CHECK(fuse_decision(eeg(0.8), music(0.6), {0.0, 0}).p_class1 == 0.6);
  CHECK(fuse_decision(eeg(0.8), music(0.6), {0.55, 0}).p_class1 == doctest::Approx(0.71).epsilon(1e-12));
  CHECK(fuse_decision(eeg(0.8), music(0.6), {0.5, 0}).modality == Modality::Multimodal);
  CHECK(fuse_decision(eeg(0.8, 4), music(0.6, 4), {0.5, 0}).window_id == 4);

  CHECK(error_kind([] { fuse_decision(eeg(0.8, 1), music(0.6, 2), {0.5, 0}); }) == ErrorKind::MismatchedWindows);
  CHECK(error_kind([] { fuse_decision(eeg(0.8), music(0.6), {1.5, 0}); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([] { fuse_decision(eeg(1.2), music(0.6), {0.5, 0}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("fused probability is a convex combination") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100000; ++i) {
    const double a = u(rng), pe = u(rng), pm = u(rng);
    const double p = fuse_decision(eeg(pe), music(pm), {a, 0}).p_class1;
    REQUIRE(p >= std::min(pe, pm) - 1e-15);
    REQUIRE(p <= std::max(pe, pm) + 1e-15);
  }
}

TEST_CASE("agreeing modalities decide for every alpha") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> hi(0.5000001, 1.0), a(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double pe = hi(rng), pm = hi(rng), alpha = a(rng);
    REQUIRE(decide(fuse_decision(eeg(pe), music(pm), {alpha, 0}), 1) == 1);
    REQUIRE(decide(fuse_decision(eeg(1 - pe), music(1 - pm), {alpha, 0}), 1) == 2);
  }
}

TEST_CASE("decision rule") {
  CHECK(decide(ClassProbabilities{0.71, Modality::Multimodal, 0}, 0) == 1);
  CHECK(decide(ClassProbabilities{0.2, Modality::Multimodal, 0}, 0) == 2);

  SUBCASE("ties are a fair, seeded coin") {
    int ones = 0;
    for (int w = 0; w < 10000; ++w) ones += decide(ClassProbabilities{0.5, Modality::Multimodal, w}, 42) == 1;
    CHECK(std::fabs(ones / 10000.0 - 0.5) <= 0.02);
    for (int w = 0; w < 50; ++w) {
      const ClassProbabilities p{0.5, Modality::Multimodal, w};
      CHECK(decide(p, 42) == decide(p, 42));
    }
    Rng a(7), b(7);
    for (int i = 0; i < 50; ++i) CHECK(decide(ClassProbabilities{0.5}, a) == decide(ClassProbabilities{0.5}, b));
  }
}

TEST_CASE("feature-level fusion") {
  std::vector<double> e(17), m(37);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = static_cast<double>(i);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = 100.0 + static_cast<double>(i);
  const auto f = fuse_features(e, m);
  REQUIRE(f.size() == 54);
  for (std::size_t i = 0; i < 17; ++i) CHECK(f[i] == e[i]);
  CHECK(f[17] == 100.0);
  CHECK(fuse_features(std::vector<double>(17, 0.0), std::vector<double>(37, 0.0)) == std::vector<double>(54, 0.0));
  CHECK(error_kind([] { fuse_features(std::vector<double>(16), std::vector<double>(37)); }) == ErrorKind::DimensionMismatch);
}
