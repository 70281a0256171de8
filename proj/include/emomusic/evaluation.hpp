#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emomusic/matrix.hpp"
#include "emomusic/svm.hpp"
#include "emomusic/window_dataset.hpp"

namespace emomusic {

// ---------------------------------------------------------------------------
// Metrics

struct ConfusionMatrix {
  long tp = 0, tn = 0, fp = 0, fn = 0;

  long total() const { return tp + tn + fp + fn; }
  // truth/predicted: true = positive class.
  void add(bool truth, bool predicted);
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
};

// Percentage of correct predictions; 0 for an empty matrix.
double accuracy(const ConfusionMatrix& cm);
// Matthews correlation; 0 when any marginal is empty.
double mcc(const ConfusionMatrix& cm);
// Percentage of the majority label. Labels are arbitrary integers.
double chance_level(std::span<const int> labels);

// ---------------------------------------------------------------------------
// Normalization

enum class NormalizationScope { PerSubject, Global };

// Min-max to [0, 1] per column; constant columns map to 0. With PerSubject,
// `groups[r]` is the subject of row r and each subject block is scaled on its own.
Matrix minmax_normalize(const Matrix& features, NormalizationScope scope, std::span<const std::size_t> groups = {});

struct MinMaxScaler {
  std::vector<double> min;
  std::vector<double> range;  // 0 for constant columns

  static MinMaxScaler fit(const Matrix& features, std::span<const std::size_t> rows);
  // Values outside the fitted range map outside [0, 1].
  Matrix transform(const Matrix& features, std::span<const std::size_t> rows) const;
};

// ---------------------------------------------------------------------------
// Splits

struct FoldAssignment {
  std::vector<std::vector<std::size_t>> test_folds;  // non-empty folds only
  bool single_class = false;                         // stratification degenerated
};

// Indices of each class are shuffled (seeded) and dealt round-robin; the fold
// cursor carries over between classes so fold sizes stay balanced.
FoldAssignment stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed);

// Whole groups (songs) are dealt to folds; used for the grouped-by-song mode.
FoldAssignment grouped_kfold(std::span<const std::size_t> groups, std::size_t k, std::uint64_t seed);

struct SubjectSplit {
  std::vector<std::size_t> train_subjects;
  std::size_t test_subject = 0;
};

// Throws NotEnoughSubjects below 2 subjects.
std::vector<SubjectSplit> leave_one_subject_out(std::size_t subject_count);
std::vector<SubjectSplit> leave_one_subject_out(const WindowDataset& dataset);

// ---------------------------------------------------------------------------
// Protocols

enum class Protocol { SubjectDependent, LeaveOneSubjectOut };
enum class EvalModality { Eeg, Music, DecisionFusion, FeatureFusion };
enum class Target { Arousal, Valence };
// TrainOnly fits min-max on the training part of every split. WholeScope
// reproduces the literal protocol: the whole subject (subject-dependent) or
// all subjects (subject-independent), test rows included.
enum class NormalizationMode { TrainOnly, WholeScope };
enum class FoldMode { Stratified, GroupedBySong };

struct CvConfig {
  Protocol protocol = Protocol::SubjectDependent;
  std::size_t folds = 10;
  std::size_t repetitions = 5;
  std::uint64_t seed = 0;
  double window_s = 2.0;
  double alpha = 0.5;
  EvalModality modality = EvalModality::DecisionFusion;
  Target target = Target::Arousal;
  NormalizationMode normalization = NormalizationMode::TrainOnly;
  FoldMode fold_mode = FoldMode::Stratified;
  SvmParams svm;
  unsigned jobs = 1;
};

void validate(const CvConfig& cfg);

std::string to_string(Protocol p);
std::string to_string(EvalModality m);
std::string to_string(Target t);
std::string to_string(NormalizationMode m);
std::string to_string(FoldMode m);
Protocol parse_protocol(const std::string& s);
EvalModality parse_modality(const std::string& s);
Target parse_target(const std::string& s);
NormalizationMode parse_normalization(const std::string& s);
FoldMode parse_fold_mode(const std::string& s);

// Class label (+1 / -1) of a window for a target.
int window_label(const WindowRecord& w, Target target);

struct SubjectResult {
  std::string subject_id;
  double accuracy = 0.0;  // mean over repetitions
  double mcc = 0.0;
  double chance = 0.0;

  friend bool operator==(const SubjectResult&, const SubjectResult&) = default;
};

struct CellResult {
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;  // across subjects
  double mcc_mean = 0.0;
  double mcc_std = 0.0;
  double chance_mean = 0.0;
  double chance_std = 0.0;
  std::vector<double> accuracy_per_repetition;
  std::vector<double> mcc_per_repetition;
  std::vector<SubjectResult> subjects;
  // Flags: number of folds trained on a single class, SVMs that hit the
  // iteration cap, folds whose stratification degenerated; `failed` marks a
  // cell that could not be evaluated at all (reported at chance, MCC 0).
  std::size_t single_class_folds = 0;
  std::size_t unconverged_models = 0;
  std::size_t degenerate_stratification = 0;
  bool failed = false;
  std::string failure;

  friend bool operator==(const CellResult&, const CellResult&) = default;
};

struct EvaluationReport {
  CvConfig config;
  std::size_t window_count = 0;
  CellResult result;
};

// Test-set probabilities of every window for one repetition.
struct ProbabilityRun {
  std::vector<double> p_eeg;
  std::vector<double> p_music;
  std::vector<double> p_features;  // feature-level fusion; empty unless requested
  std::vector<int> truth;          // +1 / -1
  std::size_t single_class_folds = 0;
  std::size_t unconverged_models = 0;
  std::size_t degenerate_stratification = 0;
};

// Trains and calibrates per-modality SVMs on every split of repetition `rep`.
ProbabilityRun compute_probabilities(const WindowDataset& dataset, const CvConfig& cfg, std::size_t rep,
                                     bool with_feature_fusion);

// Turns probability runs into metrics for one modality. Decisions are drawn
// with a generator seeded from (seed, repetition, window) only, so fused and
// unimodal cells share tie-breaks.
CellResult summarize(const WindowDataset& dataset, std::span<const ProbabilityRun> runs, const CvConfig& cfg,
                     EvalModality modality, double alpha);

// Chance level per subject, aggregated like a metric cell.
CellResult chance_cell(const WindowDataset& dataset, Target target);

EvaluationReport run_protocol(const WindowDataset& dataset, const CvConfig& cfg);

// Normalized train/test feature blocks for a split; exposed for leakage checks.
struct SplitFeatures {
  Matrix train;
  Matrix test;
};
SplitFeatures normalize_split(const Matrix& features, std::span<const std::size_t> train_rows,
                              std::span<const std::size_t> test_rows, std::span<const std::size_t> scope_rows,
                              NormalizationMode mode);

// ---------------------------------------------------------------------------
// Sweeps

inline constexpr double kDlfEegAlpha = 0.55;
inline constexpr double kDlfMusicAlpha = 0.45;

struct SweepCell {
  double axis = 0.0;
  std::string row;
  Target target = Target::Arousal;
  CellResult result;
};

struct SweepTable {
  std::string axis_name;  // "window_s" or "alpha"
  Protocol protocol = Protocol::SubjectDependent;
  std::vector<double> axis;
  std::vector<std::string> rows;
  std::vector<Target> targets;
  std::vector<SweepCell> cells;  // axis-major, then target, then row

  const SweepCell& at(double axis_value, const std::string& row, Target target) const;
};

std::vector<double> standard_window_sizes();  // 2..10 s
std::vector<double> alpha_grid();              // 0, 0.025, ..., 1

// Rows DLF_EEG, DLF_MF, EEG, MF, Chance for each window size and target.
SweepTable sweep_windows(const std::map<double, WindowDataset>& by_window, const CvConfig& base);

// 41 fusion weights at one window size, both targets; row "DLF".
SweepTable sweep_alpha(const WindowDataset& dataset, const CvConfig& base);

// ---------------------------------------------------------------------------
// Reporting

std::string report_to_json(const EvaluationReport& report);
std::string sweep_to_json(const SweepTable& table);
SweepTable sweep_from_json(const std::string& text);

// Rows: target x modality; columns: axis values; cells "mean (std)".
enum class Metric { Accuracy, Mcc };
std::string render_sweep_table(const SweepTable& table, Metric metric);
// alpha, target, accuracy mean/std, mcc mean/std; one line per point.
std::string render_alpha_series(const SweepTable& table);

}  // namespace emomusic
