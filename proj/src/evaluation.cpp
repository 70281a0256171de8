#include "emomusic/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "emomusic/error.hpp"
#include "emomusic/fusion.hpp"
#include "emomusic/parallel.hpp"
#include "emomusic/rng.hpp"

namespace emomusic {

namespace {

// Stream tags keep derived seeds for different purposes independent.
constexpr std::uint64_t kFoldStream = 0xF01D;
constexpr std::uint64_t kSvmStream = 0x5F3;
constexpr std::uint64_t kDecisionStream = 0xDEC;

double mean_of(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample standard deviation; 0 below two values.
double stddev_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

template <std::size_t N>
Matrix stack(const WindowDataset& ds, std::array<double, N> WindowRecord::*field) {
  Matrix m(ds.windows.size(), N);
  for (std::size_t i = 0; i < ds.windows.size(); ++i) {
    const auto& v = ds.windows[i].*field;
    std::copy(v.begin(), v.end(), m.row(i).begin());
  }
  return m;
}

Matrix concat_columns(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto dst = out.row(r);
    std::copy(a.row(r).begin(), a.row(r).end(), dst.begin());
    std::copy(b.row(r).begin(), b.row(r).end(), dst.begin() + static_cast<std::ptrdiff_t>(a.cols()));
  }
  return out;
}

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::vector<std::size_t> scope;
};

std::vector<Split> make_splits(const WindowDataset& ds, const CvConfig& cfg, std::size_t rep, const std::vector<int>& labels,
                               std::size_t& degenerate_stratification) {
  const auto subject_of = ds.subject_index();
  const std::size_t subjects = ds.subjects().size();
  std::vector<std::vector<std::size_t>> rows_of(subjects);
  for (std::size_t i = 0; i < subject_of.size(); ++i) rows_of[subject_of[i]].push_back(i);

  std::vector<Split> splits;
  if (cfg.protocol == Protocol::LeaveOneSubjectOut) {
    std::vector<std::size_t> all(ds.windows.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (const auto& s : leave_one_subject_out(subjects)) {
      Split split;
      split.test = rows_of[s.test_subject];
      for (auto o : s.train_subjects) split.train.insert(split.train.end(), rows_of[o].begin(), rows_of[o].end());
      std::sort(split.train.begin(), split.train.end());
      split.scope = all;
      splits.push_back(std::move(split));
    }
    return splits;
  }

  for (std::size_t s = 0; s < subjects; ++s) {
    const auto& rows = rows_of[s];
    const auto seed = derive_seed(cfg.seed, {kFoldStream, rep, s, static_cast<std::uint64_t>(cfg.target)});
    FoldAssignment folds;
    if (cfg.fold_mode == FoldMode::GroupedBySong) {
      std::map<std::string, std::size_t> song_ids;
      std::vector<std::size_t> groups;
      for (auto r : rows) groups.push_back(song_ids.try_emplace(ds.windows[r].song_id, song_ids.size()).first->second);
      folds = grouped_kfold(groups, cfg.folds, seed);
    } else {
      std::vector<int> local(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) local[i] = labels[rows[i]];
      folds = stratified_kfold(local, cfg.folds, seed);
      if (folds.single_class) ++degenerate_stratification;
    }
    if (folds.test_folds.size() < 2) {
      ++degenerate_stratification;
      continue;  // a subject with a single fold cannot be cross-validated
    }
    for (const auto& fold : folds.test_folds) {
      Split split;
      std::vector<bool> in_test(rows.size(), false);
      for (auto i : fold) in_test[i] = true;
      for (std::size_t i = 0; i < rows.size(); ++i) (in_test[i] ? split.test : split.train).push_back(rows[i]);
      split.scope = rows;
      splits.push_back(std::move(split));
    }
  }
  return splits;
}

}  // namespace

void validate(const CvConfig& cfg) {
  if (cfg.folds < 2) throw Error(ErrorKind::InvalidArgument, "folds must be at least 2");
  if (cfg.repetitions < 1) throw Error(ErrorKind::InvalidArgument, "repetitions must be at least 1");
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in [0, 1]");
  if (!(cfg.window_s > 0.0)) throw Error(ErrorKind::InvalidArgument, "window_s must be positive");
}

int window_label(const WindowRecord& w, Target target) {
  if (target == Target::Arousal) return w.label.arousal == ArousalClass::High ? 1 : -1;
  return w.label.valence == ValenceClass::Positive ? 1 : -1;
}

SplitFeatures normalize_split(const Matrix& features, std::span<const std::size_t> train_rows,
                              std::span<const std::size_t> test_rows, std::span<const std::size_t> scope_rows,
                              NormalizationMode mode) {
  const auto scaler = MinMaxScaler::fit(features, mode == NormalizationMode::TrainOnly ? train_rows : scope_rows);
  return {scaler.transform(features, train_rows), scaler.transform(features, test_rows)};
}

ProbabilityRun compute_probabilities(const WindowDataset& ds, const CvConfig& cfg, std::size_t rep, bool with_feature_fusion) {
  validate(cfg);
  const std::size_t n = ds.windows.size();
  if (n == 0) throw Error(ErrorKind::EmptyInput, "dataset has no windows");

  ProbabilityRun run;
  run.truth.resize(n);
  for (std::size_t i = 0; i < n; ++i) run.truth[i] = window_label(ds.windows[i], cfg.target);
  run.p_eeg.assign(n, 0.5);
  run.p_music.assign(n, 0.5);
  if (with_feature_fusion) run.p_features.assign(n, 0.5);

  const Matrix eeg = stack(ds, &WindowRecord::eeg);
  const Matrix music = stack(ds, &WindowRecord::music);
  const Matrix fused = with_feature_fusion ? concat_columns(eeg, music) : Matrix{};

  const auto splits = make_splits(ds, cfg, rep, run.truth, run.degenerate_stratification);
  for (std::size_t q = 0; q < splits.size(); ++q) {
    const auto& split = splits[q];
    std::vector<int> y_train(split.train.size());
    for (std::size_t i = 0; i < split.train.size(); ++i) y_train[i] = run.truth[split.train[i]];
    const bool both = std::any_of(y_train.begin(), y_train.end(), [](int v) { return v > 0; }) &&
                      std::any_of(y_train.begin(), y_train.end(), [](int v) { return v < 0; });

    auto fill = [&](const Matrix& features, std::vector<double>& out, std::uint64_t modality_tag) {
      if (!both) {
        // Only one class to learn from: predict it with certainty.
        const double p = y_train.empty() || y_train.front() > 0 ? 1.0 : 0.0;
        for (auto r : split.test) out[r] = p;
        return;
      }
      const auto blocks = normalize_split(features, split.train, split.test, split.scope, cfg.normalization);
      auto params = cfg.svm;
      params.seed = derive_seed(cfg.seed, {kSvmStream, rep, q, modality_tag, static_cast<std::uint64_t>(cfg.target)});
      const auto svm = train_probabilistic_svm({blocks.train, y_train}, params);
      if (!svm.model.converged) ++run.unconverged_models;
      for (std::size_t i = 0; i < split.test.size(); ++i)
        out[split.test[i]] = predict_proba(svm.model, svm.calibration, blocks.test.row(i));
    };

    if (!both) ++run.single_class_folds;
    fill(eeg, run.p_eeg, 1);
    fill(music, run.p_music, 2);
    if (with_feature_fusion) fill(fused, run.p_features, 3);
  }
  return run;
}

CellResult chance_cell(const WindowDataset& ds, Target target) {
  const auto subjects = ds.subjects();
  const auto subject_of = ds.subject_index();
  std::vector<std::vector<int>> labels(subjects.size());
  for (std::size_t i = 0; i < ds.windows.size(); ++i) labels[subject_of[i]].push_back(window_label(ds.windows[i], target));

  CellResult cell;
  std::vector<double> chances;
  for (std::size_t s = 0; s < subjects.size(); ++s) {
    const double c = chance_level(labels[s]);
    chances.push_back(c);
    cell.subjects.push_back({subjects[s], c, 0.0, c});
  }
  cell.chance_mean = cell.accuracy_mean = mean_of(chances);
  cell.chance_std = cell.accuracy_std = stddev_of(chances);
  return cell;
}

CellResult summarize(const WindowDataset& ds, std::span<const ProbabilityRun> runs, const CvConfig& cfg,
                     EvalModality modality, double alpha) {
  const auto subjects = ds.subjects();
  const auto subject_of = ds.subject_index();
  const std::size_t n = ds.windows.size();

  CellResult cell = chance_cell(ds, cfg.target);
  std::vector<double> subj_acc(subjects.size(), 0.0), subj_mcc(subjects.size(), 0.0);

  for (std::size_t rep = 0; rep < runs.size(); ++rep) {
    const auto& run = runs[rep];
    if (modality == EvalModality::FeatureFusion && run.p_features.size() != n)
      throw Error(ErrorKind::InvalidArgument, "feature-fusion probabilities were not computed");
    std::vector<ConfusionMatrix> cms(subjects.size());
    for (std::size_t i = 0; i < n; ++i) {
      ClassProbabilities p{0.5, Modality::Multimodal, static_cast<std::int64_t>(i)};
      switch (modality) {
        case EvalModality::Eeg: p = {run.p_eeg[i], Modality::Eeg, p.window_id}; break;
        case EvalModality::Music: p = {run.p_music[i], Modality::Music, p.window_id}; break;
        case EvalModality::FeatureFusion: p = {run.p_features[i], Modality::Multimodal, p.window_id}; break;
        case EvalModality::DecisionFusion:
          p = fuse_decision({run.p_eeg[i], Modality::Eeg, p.window_id}, {run.p_music[i], Modality::Music, p.window_id},
                            {alpha, cfg.seed});
          break;
      }
      Rng rng(derive_seed(cfg.seed, {kDecisionStream, rep, i}));
      cms[subject_of[i]].add(run.truth[i] > 0, decide(p, rng) == 1);
    }
    std::vector<double> accs, mccs;
    for (std::size_t s = 0; s < subjects.size(); ++s) {
      accs.push_back(accuracy(cms[s]));
      mccs.push_back(mcc(cms[s]));
      subj_acc[s] += accs.back();
      subj_mcc[s] += mccs.back();
    }
    cell.accuracy_per_repetition.push_back(mean_of(accs));
    cell.mcc_per_repetition.push_back(mean_of(mccs));
    cell.single_class_folds += run.single_class_folds;
    cell.unconverged_models += run.unconverged_models;
    cell.degenerate_stratification += run.degenerate_stratification;
  }

  const auto reps = static_cast<double>(runs.size());
  for (std::size_t s = 0; s < subjects.size(); ++s) {
    subj_acc[s] /= reps;
    subj_mcc[s] /= reps;
    cell.subjects[s].accuracy = subj_acc[s];
    cell.subjects[s].mcc = subj_mcc[s];
  }
  cell.accuracy_mean = mean_of(cell.accuracy_per_repetition);
  cell.mcc_mean = mean_of(cell.mcc_per_repetition);
  cell.accuracy_std = stddev_of(subj_acc);
  cell.mcc_std = stddev_of(subj_mcc);
  return cell;
}

namespace {

CellResult failed_cell(const WindowDataset& ds, Target target, const std::string& why) {
  CellResult cell;
  try {
    cell = chance_cell(ds, target);
  } catch (const Error&) {
  }
  cell.mcc_mean = cell.mcc_std = 0.0;
  cell.failed = true;
  cell.failure = why;
  return cell;
}

}  // namespace

EvaluationReport run_protocol(const WindowDataset& ds, const CvConfig& cfg) {
  validate(cfg);
  EvaluationReport report;
  report.config = cfg;
  report.window_count = ds.windows.size();
  try {
    std::vector<ProbabilityRun> runs(cfg.repetitions);
    parallel_for(cfg.repetitions, cfg.jobs, [&](std::size_t rep) {
      runs[rep] = compute_probabilities(ds, cfg, rep, cfg.modality == EvalModality::FeatureFusion);
    });
    report.result = summarize(ds, runs, cfg, cfg.modality, cfg.alpha);
  } catch (const Error& e) {
    report.result = failed_cell(ds, cfg.target, e.what());
  }
  return report;
}

// ---------------------------------------------------------------------------

const SweepCell& SweepTable::at(double axis_value, const std::string& row, Target target) const {
  for (const auto& c : cells)
    if (std::abs(c.axis - axis_value) < 1e-9 && c.row == row && c.target == target) return c;
  throw Error(ErrorKind::InvalidArgument, "no sweep cell for " + row);
}

std::vector<double> standard_window_sizes() {
  std::vector<double> w;
  for (int s = 2; s <= 10; ++s) w.push_back(s);
  return w;
}

std::vector<double> alpha_grid() {
  std::vector<double> a;
  for (int i = 0; i <= 40; ++i) a.push_back(static_cast<double>(i) * 0.025);
  a.back() = 1.0;
  return a;
}

namespace {

// Probability runs for every (target, repetition) of one dataset; failures are
// captured per target rather than aborting the sweep.
struct TargetRuns {
  std::vector<ProbabilityRun> runs;
  std::string failure;
};

std::vector<TargetRuns> runs_for_targets(const std::vector<const WindowDataset*>& datasets, const CvConfig& base,
                                         const std::vector<Target>& targets) {
  const std::size_t reps = base.repetitions;
  std::vector<TargetRuns> out(datasets.size() * targets.size());
  for (auto& tr : out) tr.runs.resize(reps);
  std::vector<std::string> errors(out.size() * reps);

  parallel_for(out.size() * reps, base.jobs, [&](std::size_t job) {
    const std::size_t slot = job / reps, rep = job % reps;
    const auto& ds = *datasets[slot / targets.size()];
    CvConfig cfg = base;
    cfg.window_s = ds.window_s;
    cfg.target = targets[slot % targets.size()];
    try {
      out[slot].runs[rep] = compute_probabilities(ds, cfg, rep, false);
    } catch (const Error& e) {
      errors[job] = e.what();
    }
  });
  for (std::size_t job = 0; job < errors.size(); ++job)
    if (!errors[job].empty() && out[job / reps].failure.empty()) out[job / reps].failure = errors[job];
  return out;
}

}  // namespace

SweepTable sweep_windows(const std::map<double, WindowDataset>& by_window, const CvConfig& base) {
  validate(base);
  SweepTable table;
  table.axis_name = "window_s";
  table.protocol = base.protocol;
  table.rows = {"DLF_EEG", "DLF_MF", "EEG", "MF", "Chance"};
  table.targets = {Target::Arousal, Target::Valence};

  std::vector<const WindowDataset*> datasets;
  for (const auto& [w, ds] : by_window) {
    table.axis.push_back(w);
    datasets.push_back(&ds);
  }
  const auto runs = runs_for_targets(datasets, base, table.targets);

  for (std::size_t d = 0; d < datasets.size(); ++d) {
    const auto& ds = *datasets[d];
    for (std::size_t t = 0; t < table.targets.size(); ++t) {
      CvConfig cfg = base;
      cfg.window_s = ds.window_s;
      cfg.target = table.targets[t];
      const auto& tr = runs[d * table.targets.size() + t];
      auto cell = [&](EvalModality m, double alpha) {
        if (!tr.failure.empty()) return failed_cell(ds, cfg.target, tr.failure);
        return summarize(ds, tr.runs, cfg, m, alpha);
      };
      const double w = table.axis[d];
      table.cells.push_back({w, "DLF_EEG", cfg.target, cell(EvalModality::DecisionFusion, kDlfEegAlpha)});
      table.cells.push_back({w, "DLF_MF", cfg.target, cell(EvalModality::DecisionFusion, kDlfMusicAlpha)});
      table.cells.push_back({w, "EEG", cfg.target, cell(EvalModality::Eeg, 1.0)});
      table.cells.push_back({w, "MF", cfg.target, cell(EvalModality::Music, 0.0)});
      CellResult chance;
      try {
        chance = chance_cell(ds, cfg.target);
      } catch (const Error& e) {
        chance = failed_cell(ds, cfg.target, e.what());
      }
      table.cells.push_back({w, "Chance", cfg.target, chance});
    }
  }
  return table;
}

SweepTable sweep_alpha(const WindowDataset& ds, const CvConfig& base) {
  validate(base);
  SweepTable table;
  table.axis_name = "alpha";
  table.protocol = base.protocol;
  table.axis = alpha_grid();
  table.rows = {"DLF"};
  table.targets = {Target::Arousal, Target::Valence};

  const auto runs = runs_for_targets({&ds}, base, table.targets);
  for (double alpha : table.axis) {
    for (std::size_t t = 0; t < table.targets.size(); ++t) {
      CvConfig cfg = base;
      cfg.window_s = ds.window_s;
      cfg.target = table.targets[t];
      const auto& tr = runs[t];
      CellResult cell = tr.failure.empty() ? summarize(ds, tr.runs, cfg, EvalModality::DecisionFusion, alpha)
                                           : failed_cell(ds, cfg.target, tr.failure);
      table.cells.push_back({alpha, "DLF", cfg.target, std::move(cell)});
    }
  }
  return table;
}

}  // namespace emomusic
