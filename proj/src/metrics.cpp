#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "emomusic/error.hpp"
#include "emomusic/evaluation.hpp"
#include "emomusic/rng.hpp"

namespace emomusic {

void ConfusionMatrix::add(bool truth, bool predicted) {
  if (truth) (predicted ? tp : fn) += 1;
  else (predicted ? fp : tn) += 1;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  tn += o.tn;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

double accuracy(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total);
}

double mcc(const ConfusionMatrix& cm) {
  const double tp = static_cast<double>(cm.tp), tn = static_cast<double>(cm.tn);
  const double fp = static_cast<double>(cm.fp), fn = static_cast<double>(cm.fn);
  const double d1 = tp + fp, d2 = tp + fn, d3 = tn + fp, d4 = tn + fn;
  if (d1 == 0 || d2 == 0 || d3 == 0 || d4 == 0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(d1 * d2 * d3 * d4);
}

double chance_level(std::span<const int> labels) {
  if (labels.empty()) throw Error(ErrorKind::EmptyInput, "no labels");
  std::map<int, std::size_t> counts;
  for (int l : labels) ++counts[l];
  std::size_t majority = 0;
  for (const auto& [label, n] : counts) majority = std::max(majority, n);
  return 100.0 * static_cast<double>(majority) / static_cast<double>(labels.size());
}

// ---------------------------------------------------------------------------

MinMaxScaler MinMaxScaler::fit(const Matrix& features, std::span<const std::size_t> rows) {
  if (rows.empty() || features.cols() == 0) throw Error(ErrorKind::EmptyInput, "cannot fit min-max on no rows");
  MinMaxScaler s;
  s.min.assign(features.cols(), std::numeric_limits<double>::infinity());
  std::vector<double> max(features.cols(), -std::numeric_limits<double>::infinity());
  for (auto r : rows) {
    for (std::size_t c = 0; c < features.cols(); ++c) {
      s.min[c] = std::min(s.min[c], features(r, c));
      max[c] = std::max(max[c], features(r, c));
    }
  }
  s.range.resize(features.cols());
  for (std::size_t c = 0; c < features.cols(); ++c) s.range[c] = max[c] - s.min[c];
  return s;
}

Matrix MinMaxScaler::transform(const Matrix& features, std::span<const std::size_t> rows) const {
  Matrix out(rows.size(), features.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < features.cols(); ++c)
      out(i, c) = range[c] > 0 ? (features(rows[i], c) - min[c]) / range[c] : 0.0;
  return out;
}

Matrix minmax_normalize(const Matrix& features, NormalizationScope scope, std::span<const std::size_t> groups) {
  if (features.rows() == 0) throw Error(ErrorKind::EmptyInput, "no rows to normalize");
  std::vector<std::vector<std::size_t>> blocks;
  if (scope == NormalizationScope::Global) {
    blocks.emplace_back(features.rows());
    std::iota(blocks.back().begin(), blocks.back().end(), std::size_t{0});
  } else {
    if (groups.size() != features.rows())
      throw Error(ErrorKind::InvalidArgument, "per-subject scope needs one group id per row");
    std::map<std::size_t, std::size_t> block_of;
    for (std::size_t r = 0; r < groups.size(); ++r) {
      auto [it, inserted] = block_of.try_emplace(groups[r], blocks.size());
      if (inserted) blocks.emplace_back();
      blocks[it->second].push_back(r);
    }
  }
  Matrix out(features.rows(), features.cols());
  for (const auto& rows : blocks) {
    const auto scaled = MinMaxScaler::fit(features, rows).transform(features, rows);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto src = scaled.row(i);
      std::copy(src.begin(), src.end(), out.row(rows[i]).begin());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

FoldAssignment stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 folds");
  if (labels.empty()) throw Error(ErrorKind::EmptyInput, "no labels");

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  Rng rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t cursor = 0;
  for (auto& [label, idx] : by_class) {
    shuffle_in_place(idx, rng);
    for (auto i : idx) {
      folds[cursor].push_back(i);
      cursor = (cursor + 1) % k;
    }
  }
  FoldAssignment out;
  out.single_class = by_class.size() < 2;
  for (auto& f : folds) {
    if (f.empty()) continue;
    std::sort(f.begin(), f.end());
    out.test_folds.push_back(std::move(f));
  }
  return out;
}

FoldAssignment grouped_kfold(std::span<const std::size_t> groups, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 folds");
  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < groups.size(); ++i) members[groups[i]].push_back(i);
  std::vector<std::size_t> ids;
  for (const auto& [g, m] : members) ids.push_back(g);
  Rng rng(seed);
  shuffle_in_place(ids, rng);

  std::vector<std::vector<std::size_t>> folds(std::min(k, ids.size()));
  for (std::size_t j = 0; j < ids.size(); ++j) {
    auto& f = folds[j % folds.size()];
    f.insert(f.end(), members[ids[j]].begin(), members[ids[j]].end());
  }
  FoldAssignment out;
  for (auto& f : folds) {
    std::sort(f.begin(), f.end());
    out.test_folds.push_back(std::move(f));
  }
  return out;
}

std::vector<SubjectSplit> leave_one_subject_out(std::size_t subject_count) {
  if (subject_count < 2) throw Error(ErrorKind::NotEnoughSubjects, "leave-one-subject-out needs at least 2 subjects");
  std::vector<SubjectSplit> splits;
  for (std::size_t s = 0; s < subject_count; ++s) {
    SubjectSplit split;
    split.test_subject = s;
    for (std::size_t o = 0; o < subject_count; ++o)
      if (o != s) split.train_subjects.push_back(o);
    splits.push_back(std::move(split));
  }
  return splits;
}

std::vector<SubjectSplit> leave_one_subject_out(const WindowDataset& dataset) {
  return leave_one_subject_out(dataset.subjects().size());
}

}  // namespace emomusic
