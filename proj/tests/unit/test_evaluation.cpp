#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <doctest.h>

#include "emomusic/evaluation.hpp"
#include "helpers.hpp"
#include "oracles/oracles.hpp"
#include "toy_dataset.hpp"

using namespace emomusic;
using test::error_kind;
using test::toy_dataset;

namespace {

CvConfig quick(EvalModality m = EvalModality::DecisionFusion, Target t = Target::Arousal) {
  CvConfig cfg;
  cfg.modality = m;
  cfg.target = t;
  cfg.repetitions = 2;
  cfg.folds = 5;
  cfg.seed = 3;
  return cfg;
}

Matrix column(std::initializer_list<double> v) {
  Matrix m;
  for (double x : v) m.append_row(std::vector<double>{x});
  return m;
}

}  // namespace

TEST_CASE("accuracy") {
  CHECK(accuracy({5, 5, 0, 0}) == 100.0);
  CHECK(accuracy({0, 0, 5, 5}) == 0.0);
  CHECK(accuracy({6, 3, 1, 2}) == 75.0);
  CHECK(accuracy({}) == 0.0);
  ConfusionMatrix cm;
  cm.add(true, true);
  cm.add(false, true);
  cm.add(false, false);
  cm.add(true, false);
  CHECK(cm.tp == 1);
  CHECK(cm.fp == 1);
  CHECK(cm.tn == 1);
  CHECK(cm.fn == 1);
  cm += ConfusionMatrix{1, 0, 0, 0};
  CHECK(cm.total() == 5);
}

TEST_CASE("Matthews correlation") {
  CHECK(mcc({50, 50, 0, 0}) == doctest::Approx(1.0));
  CHECK(mcc({0, 0, 50, 50}) == doctest::Approx(-1.0));
  CHECK(mcc({6, 3, 1, 2}) == doctest::Approx(0.4781).epsilon(1e-4 / 0.4781));
  CHECK(mcc({6, 3, 1, 2}) == doctest::Approx(16.0 / std::sqrt(1120.0)).epsilon(1e-12));
  CHECK(mcc({10, 0, 5, 0}) == 0.0);
  CHECK(mcc({}) == 0.0);

  std::mt19937_64 rng(1000);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const ConfusionMatrix cm{static_cast<long>(rng() % 40), static_cast<long>(rng() % 40), static_cast<long>(rng() % 40),
                             static_cast<long>(rng() % 40)};
    const double m = mcc(cm);
    CHECK((m >= -1.0 && m <= 1.0));
    const bool zero_factor = cm.tp + cm.fp == 0 || cm.tp + cm.fn == 0 || cm.tn + cm.fp == 0 || cm.tn + cm.fn == 0;
    if (zero_factor) {
      CHECK(m == 0.0);
      continue;
    }
    CHECK(std::fabs(m - oracle::mcc_via_pearson(cm.tp, cm.tn, cm.fp, cm.fn)) <= 1e-9);
    ++checked;
  }
  CHECK(checked > 900);
}

TEST_CASE("chance level") {
  CHECK(chance_level(std::vector<int>{1, 1, 1, 0}) == 75.0);
  CHECK(chance_level(std::vector<int>{1, -1, 1, -1}) == 50.0);
  CHECK(chance_level(std::vector<int>{2, 2}) == 100.0);
  CHECK(error_kind([] { chance_level(std::vector<int>{}); }) == ErrorKind::EmptyInput);
}

TEST_CASE("min-max normalization") {
  const auto n = minmax_normalize(column({2, 4, 6}), NormalizationScope::Global);
  CHECK(n(0, 0) == 0.0);
  CHECK(n(1, 0) == 0.5);
  CHECK(n(2, 0) == 1.0);
  const auto c = minmax_normalize(column({5, 5}), NormalizationScope::Global);
  CHECK(c(0, 0) == 0.0);
  CHECK(c(1, 0) == 0.0);

  const std::vector<std::size_t> groups{0, 0, 0, 1, 1, 1};
  const auto p = minmax_normalize(column({1, 2, 3, 10, 30, 20}), NormalizationScope::PerSubject, groups);
  CHECK(p(0, 0) == 0.0);
  CHECK(p(2, 0) == 1.0);
  CHECK(p(3, 0) == 0.0);
  CHECK(p(4, 0) == 1.0);
  CHECK(p(5, 0) == 0.5);

  CHECK(error_kind([] { minmax_normalize(Matrix{}, NormalizationScope::Global); }) == ErrorKind::EmptyInput);
}

TEST_CASE("normalization is fit on training rows only") {
  // Canary column: test rows exceed the training range on both sides.
  const Matrix x = column({0.2, 0.4, 0.6, 0.8, -5.0, 7.0});
  const std::vector<std::size_t> train{0, 1, 2, 3}, test_rows{4, 5}, scope{0, 1, 2, 3, 4, 5};
  const auto split = normalize_split(x, train, test_rows, scope, NormalizationMode::TrainOnly);
  for (std::size_t r = 0; r < 4; ++r) CHECK((split.train(r, 0) >= 0.0 && split.train(r, 0) <= 1.0));
  CHECK(split.test(0, 0) < 0.0);
  CHECK(split.test(1, 0) > 1.0);

  const auto whole = normalize_split(x, train, test_rows, scope, NormalizationMode::WholeScope);
  CHECK(whole.test(0, 0) == 0.0);
  CHECK(whole.test(1, 0) == 1.0);
}

TEST_CASE("stratified folds") {
  SUBCASE("balanced labels put one of each class in every fold") {
    std::vector<int> labels(20);
    for (std::size_t i = 0; i < 20; ++i) labels[i] = i % 2 ? 1 : -1;
    const auto f = stratified_kfold(labels, 10, 1);
    REQUIRE(f.test_folds.size() == 10);
    for (const auto& fold : f.test_folds) {
      CHECK(fold.size() == 2);
      CHECK(labels[fold[0]] != labels[fold[1]]);
    }
  }
  SUBCASE("a single minority instance lands in exactly one fold") {
    std::vector<int> labels(10, 1);
    labels[6] = -1;
    const auto f = stratified_kfold(labels, 10, 5);
    int holding = 0;
    for (const auto& fold : f.test_folds) holding += std::count(fold.begin(), fold.end(), 6u) > 0;
    CHECK(holding == 1);
  }
  SUBCASE("partition, balance and determinism on random label vectors") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 5 + rng() % 200, k = 2 + rng() % 10;
      std::vector<int> labels(n);
      const double p = 0.1 + 0.8 * static_cast<double>(rng() % 100) / 100.0;
      for (auto& l : labels) l = static_cast<double>(rng() % 1000) / 1000.0 < p ? 1 : -1;
      const auto f = stratified_kfold(labels, k, trial);
      CHECK(f.test_folds == stratified_kfold(labels, k, trial).test_folds);
      std::vector<int> seen(n, 0);
      for (const auto& fold : f.test_folds)
        for (auto i : fold) ++seen[i];
      CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
      const double pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
      if (n >= k)
        for (const auto& fold : f.test_folds) {
          const double fold_pos = static_cast<double>(std::count_if(fold.begin(), fold.end(), [&](std::size_t i) { return labels[i] == 1; }));
          CHECK(std::fabs(fold_pos - pos / static_cast<double>(k)) <= 1.0);
          CHECK(std::fabs(static_cast<double>(fold.size()) - static_cast<double>(n) / static_cast<double>(k)) <= 1.0);
        }
    }
  }
  SUBCASE("single class degenerates to plain k-fold with a flag") {
    const auto f = stratified_kfold(std::vector<int>(30, 1), 10, 2);
    CHECK(f.single_class);
    CHECK(f.test_folds.size() == 10);
  }
}

TEST_CASE("grouped folds keep groups together") {
  std::vector<std::size_t> groups;
  for (std::size_t g = 0; g < 7; ++g)
    for (std::size_t i = 0; i < 3 + g; ++i) groups.push_back(g);
  const auto f = grouped_kfold(groups, 3, 4);
  CHECK(f.test_folds.size() == 3);
  std::set<std::size_t> all;
  for (const auto& fold : f.test_folds) {
    std::set<std::size_t> gs;
    for (auto i : fold) {
      gs.insert(groups[i]);
      all.insert(i);
    }
    for (const auto& other : f.test_folds) {
      if (&other == &fold) continue;
      for (auto i : other) CHECK(gs.count(groups[i]) == 0);
    }
  }
  CHECK(all.size() == groups.size());
}

TEST_CASE("leave one subject out") {
  const auto twelve = leave_one_subject_out(12);
  REQUIRE(twelve.size() == 12);
  for (std::size_t s = 0; s < 12; ++s) {
    CHECK(twelve[s].test_subject == s);
    CHECK(twelve[s].train_subjects.size() == 11);
    CHECK(std::count(twelve[s].train_subjects.begin(), twelve[s].train_subjects.end(), s) == 0);
  }
  CHECK(leave_one_subject_out(2).size() == 2);
  CHECK(error_kind([] { leave_one_subject_out(1); }) == ErrorKind::NotEnoughSubjects);
  CHECK(leave_one_subject_out(toy_dataset(3, 10, 1)).size() == 3);
}

TEST_CASE("configuration parsing") {
  CHECK(parse_protocol("loso") == Protocol::LeaveOneSubjectOut);
  CHECK(parse_modality("flf") == EvalModality::FeatureFusion);
  CHECK(parse_target(to_string(Target::Valence)) == Target::Valence);
  CHECK(parse_normalization("whole-scope") == NormalizationMode::WholeScope);
  CHECK(parse_fold_mode("grouped-by-song") == FoldMode::GroupedBySong);
  CHECK(error_kind([] { parse_modality("audio"); }) == ErrorKind::InvalidArgument);
  CvConfig cfg;
  cfg.folds = 1;
  CHECK(error_kind([&] { validate(cfg); }) == ErrorKind::InvalidArgument);
  cfg = {};
  cfg.repetitions = 0;
  CHECK(error_kind([&] { validate(cfg); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("subject-dependent protocol on a separable dataset") {
  const auto ds = toy_dataset(3, 60, 11);
  for (auto target : {Target::Arousal, Target::Valence})
    for (auto modality : {EvalModality::Eeg, EvalModality::Music, EvalModality::DecisionFusion, EvalModality::FeatureFusion}) {
      CAPTURE(to_string(modality));
      const auto r = run_protocol(ds, quick(modality, target)).result;
      CHECK_FALSE(r.failed);
      CHECK(r.accuracy_mean >= 90.0);
      CHECK(r.chance_mean == doctest::Approx(50.0));
      CHECK(r.subjects.size() == 3);
      CHECK(r.accuracy_per_repetition.size() == 2);
      const double mean = std::accumulate(r.accuracy_per_repetition.begin(), r.accuracy_per_repetition.end(), 0.0) / 2.0;
      CHECK(std::fabs(r.accuracy_mean - mean) <= 1e-12);
      CHECK((r.mcc_mean >= -1.0 && r.mcc_mean <= 1.0));
    }
}

TEST_CASE("shuffled labels give chance-level MCC") {
  const auto base = toy_dataset(4, 100, 21);
  auto cfg = quick();
  cfg.repetitions = 1;
  int within = 0;
  double sum = 0.0;
  const int shuffles = 100;
  for (int s = 0; s < shuffles; ++s) {
    auto ds = base;
    test::shuffle_labels(ds, 1000 + s);
    const double m = run_protocol(ds, cfg).result.mcc_mean;
    within += std::fabs(m) <= 0.15;
    sum += m;
  }
  CHECK(within >= 95);
  CHECK(std::fabs(sum / shuffles) < 0.03);
}

TEST_CASE("fusion endpoints equal the unimodal cells") {
  const auto ds = toy_dataset(2, 40, 5, 0.02);
  for (auto target : {Target::Arousal, Target::Valence}) {
    auto cfg = quick(EvalModality::DecisionFusion, target);
    cfg.alpha = 0.0;
    const auto dlf0 = run_protocol(ds, cfg).result;
    cfg.alpha = 1.0;
    const auto dlf1 = run_protocol(ds, cfg).result;
    const auto mf = run_protocol(ds, quick(EvalModality::Music, target)).result;
    const auto eeg = run_protocol(ds, quick(EvalModality::Eeg, target)).result;
    CHECK(dlf0 == mf);
    CHECK(dlf1 == eeg);
  }
}

TEST_CASE("parallel and serial runs agree") {
  const auto ds = toy_dataset(3, 40, 8, 0.05);
  auto cfg = quick();
  cfg.repetitions = 4;
  cfg.jobs = 1;
  const auto serial = run_protocol(ds, cfg).result;
  cfg.jobs = 4;
  CHECK(run_protocol(ds, cfg).result == serial);
}

TEST_CASE("degenerate and failing cells are flagged") {
  SUBCASE("a subject with a single class") {
    auto ds = toy_dataset(2, 30, 3);
    for (auto& w : ds.windows)
      if (w.subject_id == "s1") w.label.arousal = ArousalClass::High;
    const auto r = run_protocol(ds, quick()).result;
    CHECK_FALSE(r.failed);
    CHECK(r.single_class_folds > 0);
    CHECK(r.degenerate_stratification > 0);
    CHECK(r.subjects[1].chance == 100.0);
  }
  SUBCASE("LOSO with one subject") {
    auto cfg = quick();
    cfg.protocol = Protocol::LeaveOneSubjectOut;
    const auto r = run_protocol(toy_dataset(1, 30, 3), cfg).result;
    CHECK(r.failed);
    CHECK(r.mcc_mean == 0.0);
    CHECK(r.accuracy_mean == r.chance_mean);
    CHECK(r.failure.find("NotEnoughSubjects") != std::string::npos);
  }
}

TEST_CASE("subject-independent protocol") {
  auto cfg = quick(EvalModality::Eeg);
  cfg.protocol = Protocol::LeaveOneSubjectOut;
  const auto r = run_protocol(toy_dataset(4, 40, 13), cfg).result;
  CHECK_FALSE(r.failed);
  CHECK(r.subjects.size() == 4);
  CHECK(r.accuracy_mean >= 90.0);
}

TEST_CASE("grouped-by-song folds run end to end") {
  auto cfg = quick(EvalModality::Eeg);
  cfg.fold_mode = FoldMode::GroupedBySong;
  cfg.folds = 3;
  const auto r = run_protocol(toy_dataset(2, 60, 13), cfg).result;
  CHECK_FALSE(r.failed);
  CHECK(r.accuracy_mean >= 90.0);
}

TEST_CASE("window-size sweep") {
  std::map<double, WindowDataset> by_window;
  for (double w : standard_window_sizes()) by_window.emplace(w, toy_dataset(2, 20 + static_cast<std::size_t>(w), static_cast<std::uint64_t>(w), 0.05, w));
  auto cfg = quick();
  cfg.repetitions = 1;
  const auto table = sweep_windows(by_window, cfg);
  CHECK(table.axis.size() == 9);
  CHECK(table.rows.size() == 5);
  CHECK(table.targets.size() == 2);
  CHECK(table.cells.size() == 9 * 5 * 2);
  for (double w : table.axis)
    for (auto t : table.targets) {
      const auto& chance = table.at(w, "Chance", t).result;
      for (const auto& row : table.rows) CHECK(table.at(w, row, t).result.chance_mean == chance.accuracy_mean);
      CHECK(table.at(w, "MF", t).result == run_protocol(by_window.at(w), [&] {
                                                     auto c = cfg;
                                                     c.target = t;
                                                     c.window_s = w;
                                                     c.modality = EvalModality::Music;
                                                     return c;
                                                   }()).result);
    }
  cfg.jobs = 3;
  const auto again = sweep_windows(by_window, cfg);
  CHECK(sweep_to_json(again) == sweep_to_json(table));

  const auto back = sweep_from_json(sweep_to_json(table));
  CHECK(back.cells.size() == table.cells.size());
  for (std::size_t i = 0; i < back.cells.size(); ++i) CHECK(back.cells[i].result == table.cells[i].result);
  CHECK(sweep_to_json(back) == sweep_to_json(table));

  const auto text = render_sweep_table(table, Metric::Accuracy);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 10);
  CHECK(text.rfind("target,row,2,3,4,5,6,7,8,9,10\n", 0) == 0);
  CHECK(text.find("arousal,DLF_EEG,") != std::string::npos);
  CHECK(error_kind([] { sweep_from_json("[1,"); }) == ErrorKind::ParseError);
}

TEST_CASE("alpha sweep") {
  const auto ds = toy_dataset(2, 40, 17, 0.02);
  auto cfg = quick();
  const auto table = sweep_alpha(ds, cfg);
  REQUIRE(table.axis.size() == 41);
  CHECK(table.axis.front() == 0.0);
  CHECK(table.axis[1] == 0.025);
  CHECK(table.axis.back() == 1.0);
  CHECK(table.cells.size() == 82);
  for (auto t : table.targets) {
    cfg.target = t;
    cfg.modality = EvalModality::Music;
    CHECK(table.at(0.0, "DLF", t).result == run_protocol(ds, cfg).result);
    cfg.modality = EvalModality::Eeg;
    CHECK(table.at(1.0, "DLF", t).result == run_protocol(ds, cfg).result);
  }
  CHECK(sweep_to_json(sweep_alpha(ds, quick())) == sweep_to_json(table));
  const auto series = render_alpha_series(table);
  CHECK(std::count(series.begin(), series.end(), '\n') == 83);
}
