#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emomusic/error.hpp"
#include "emomusic/evaluation.hpp"

namespace emomusic {

using nlohmann::json;

namespace {

template <class E, std::size_t N>
E parse_enum(const std::string& s, const std::pair<const char*, E> (&names)[N], const char* what) {
  for (const auto& [name, value] : names)
    if (s == name) return value;
  std::string valid;
  for (const auto& [name, value] : names) valid += (valid.empty() ? "" : ", ") + std::string(name);
  throw Error(ErrorKind::InvalidArgument, std::string("unknown ") + what + " '" + s + "' (expected " + valid + ")");
}

template <class E, std::size_t N>
std::string enum_name(E value, const std::pair<const char*, E> (&names)[N]) {
  for (const auto& [name, v] : names)
    if (v == value) return name;
  return "?";
}

const std::pair<const char*, Protocol> kProtocols[] = {{"subject-dependent", Protocol::SubjectDependent},
                                                       {"loso", Protocol::LeaveOneSubjectOut}};
const std::pair<const char*, EvalModality> kModalities[] = {{"eeg", EvalModality::Eeg},
                                                            {"music", EvalModality::Music},
                                                            {"dlf", EvalModality::DecisionFusion},
                                                            {"flf", EvalModality::FeatureFusion}};
const std::pair<const char*, Target> kTargets[] = {{"arousal", Target::Arousal}, {"valence", Target::Valence}};
const std::pair<const char*, NormalizationMode> kNormalizations[] = {{"train-only", NormalizationMode::TrainOnly},
                                                                     {"whole-scope", NormalizationMode::WholeScope}};
const std::pair<const char*, FoldMode> kFoldModes[] = {{"stratified", FoldMode::Stratified},
                                                       {"grouped-by-song", FoldMode::GroupedBySong}};

json config_json(const CvConfig& c) {
  return {{"protocol", to_string(c.protocol)},
          {"folds", c.folds},
          {"repetitions", c.repetitions},
          {"seed", c.seed},
          {"window_s", c.window_s},
          {"alpha", c.alpha},
          {"modality", to_string(c.modality)},
          {"target", to_string(c.target)},
          {"normalization", to_string(c.normalization)},
          {"fold_mode", to_string(c.fold_mode)},
          {"svm", {{"c", c.svm.c}, {"kernel_scale", c.svm.kernel_scale}, {"tol", c.svm.tol}}}};
}

json cell_json(const CellResult& r) {
  json subjects = json::array();
  for (const auto& s : r.subjects)
    subjects.push_back({{"subject_id", s.subject_id}, {"accuracy", s.accuracy}, {"mcc", s.mcc}, {"chance", s.chance}});
  json j = {{"accuracy_mean", r.accuracy_mean},
            {"accuracy_std", r.accuracy_std},
            {"mcc_mean", r.mcc_mean},
            {"mcc_std", r.mcc_std},
            {"chance_mean", r.chance_mean},
            {"chance_std", r.chance_std},
            {"accuracy_per_repetition", r.accuracy_per_repetition},
            {"mcc_per_repetition", r.mcc_per_repetition},
            {"subjects", subjects},
            {"single_class_folds", r.single_class_folds},
            {"unconverged_models", r.unconverged_models},
            {"degenerate_stratification", r.degenerate_stratification},
            {"failed", r.failed}};
  if (r.failed) j["failure"] = r.failure;
  return j;
}

CellResult cell_from_json(const json& j) {
  CellResult r;
  r.accuracy_mean = j.at("accuracy_mean");
  r.accuracy_std = j.at("accuracy_std");
  r.mcc_mean = j.at("mcc_mean");
  r.mcc_std = j.at("mcc_std");
  r.chance_mean = j.at("chance_mean");
  r.chance_std = j.at("chance_std");
  r.accuracy_per_repetition = j.at("accuracy_per_repetition").get<std::vector<double>>();
  r.mcc_per_repetition = j.at("mcc_per_repetition").get<std::vector<double>>();
  for (const auto& s : j.at("subjects")) r.subjects.push_back({s.at("subject_id"), s.at("accuracy"), s.at("mcc"), s.at("chance")});
  r.single_class_folds = j.at("single_class_folds");
  r.unconverged_models = j.at("unconverged_models");
  r.degenerate_stratification = j.at("degenerate_stratification");
  r.failed = j.at("failed");
  r.failure = j.value("failure", "");
  return r;
}

std::string format_number(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

std::string to_string(Protocol p) { return enum_name(p, kProtocols); }
std::string to_string(EvalModality m) { return enum_name(m, kModalities); }
std::string to_string(Target t) { return enum_name(t, kTargets); }
std::string to_string(NormalizationMode m) { return enum_name(m, kNormalizations); }
std::string to_string(FoldMode m) { return enum_name(m, kFoldModes); }
Protocol parse_protocol(const std::string& s) { return parse_enum(s, kProtocols, "protocol"); }
EvalModality parse_modality(const std::string& s) { return parse_enum(s, kModalities, "modality"); }
Target parse_target(const std::string& s) { return parse_enum(s, kTargets, "target"); }
NormalizationMode parse_normalization(const std::string& s) { return parse_enum(s, kNormalizations, "normalization"); }
FoldMode parse_fold_mode(const std::string& s) { return parse_enum(s, kFoldModes, "fold mode"); }

std::string report_to_json(const EvaluationReport& report) {
  json j = {{"config", config_json(report.config)}, {"window_count", report.window_count}, {"result", cell_json(report.result)}};
  return j.dump(2);
}

std::string sweep_to_json(const SweepTable& table) {
  json cells = json::array();
  for (const auto& c : table.cells)
    cells.push_back({{"axis", c.axis}, {"row", c.row}, {"target", to_string(c.target)}, {"result", cell_json(c.result)}});
  json targets = json::array();
  for (auto t : table.targets) targets.push_back(to_string(t));
  json j = {{"axis_name", table.axis_name}, {"protocol", to_string(table.protocol)},
            {"axis", table.axis},           {"rows", table.rows},
            {"targets", targets},           {"cells", cells}};
  return j.dump(2);
}

SweepTable sweep_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("sweep report: ") + e.what());
  }
  try {
    SweepTable t;
    t.axis_name = j.at("axis_name");
    t.protocol = parse_protocol(j.at("protocol"));
    t.axis = j.at("axis").get<std::vector<double>>();
    t.rows = j.at("rows").get<std::vector<std::string>>();
    for (const auto& s : j.at("targets")) t.targets.push_back(parse_target(s));
    for (const auto& c : j.at("cells"))
      t.cells.push_back({c.at("axis"), c.at("row"), parse_target(c.at("target")), cell_from_json(c.at("result"))});
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("sweep report: ") + e.what());
  }
}

std::string render_sweep_table(const SweepTable& table, Metric metric) {
  const char* fmt = metric == Metric::Accuracy ? "%.2f" : "%.4f";
  std::ostringstream out;
  out << "target,row";
  for (double a : table.axis) out << ',' << format_number("%g", a);
  out << '\n';
  for (auto target : table.targets) {
    for (const auto& row : table.rows) {
      out << to_string(target) << ',' << row;
      for (double a : table.axis) {
        const auto& r = table.at(a, row, target).result;
        const double m = metric == Metric::Accuracy ? r.accuracy_mean : r.mcc_mean;
        const double s = metric == Metric::Accuracy ? r.accuracy_std : r.mcc_std;
        out << ',' << format_number(fmt, m) << " (" << format_number(fmt, s) << ')';
        if (r.failed) out << '*';
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string render_alpha_series(const SweepTable& table) {
  std::ostringstream out;
  out << "alpha,target,accuracy_mean,accuracy_std,mcc_mean,mcc_std\n";
  for (const auto& c : table.cells) {
    out << format_number("%.3f", c.axis) << ',' << to_string(c.target) << ',' << format_number("%.4f", c.result.accuracy_mean)
        << ',' << format_number("%.4f", c.result.accuracy_std) << ',' << format_number("%.6f", c.result.mcc_mean) << ','
        << format_number("%.6f", c.result.mcc_std) << '\n';
  }
  return out.str();
}

}  // namespace emomusic
