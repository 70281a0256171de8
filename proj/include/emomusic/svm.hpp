#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "emomusic/matrix.hpp"

namespace emomusic {

// Gaussian kernel in "kernel scale" form: exp(-|u - v|^2 / s^2).
// Note this is gamma = 1/s^2, not the 1/(2 sigma^2) convention.
double rbf_kernel(std::span<const double> u, std::span<const double> v, double scale);

struct TrainingSet {
  Matrix x;            // [n x d]
  std::vector<int> y;  // +1 / -1
};

// Throws InvalidArgument (shape, labels, non-finite) or SingleClass.
void validate(const TrainingSet& data);

struct SvmParams {
  double c = 1.0;
  double kernel_scale = 3.0;
  double tol = 1e-3;
  std::uint64_t seed = 0;
  // Record the dual objective after every SMO step (for diagnostics/tests).
  bool record_objective = false;
};

struct SvmModel {
  Matrix support_vectors;
  std::vector<double> coefficients;  // alpha_i * y_i
  double bias = 0.0;
  double c = 1.0;
  double kernel_scale = 3.0;
  std::uint64_t seed = 0;

  bool converged = true;
  std::size_t iterations = 0;
  std::vector<double> alphas;            // full dual vector over the training set
  std::vector<double> objective_trace;   // only when record_objective

  friend bool operator==(const SvmModel& a, const SvmModel& b) {
    return a.support_vectors == b.support_vectors && a.coefficients == b.coefficients && a.bias == b.bias &&
           a.c == b.c && a.kernel_scale == b.kernel_scale && a.seed == b.seed;
  }
};

// Soft-margin SVM dual solved by SMO with maximal-violating-pair working set
// selection. Stops when the KKT gap falls below tol or after 100*n steps (in
// which case `converged` is false). Ties in selection follow a seeded
// permutation of the training indices.
SvmModel train_svm(const TrainingSet& data, const SvmParams& params = {});

double decision_value(const SvmModel& model, std::span<const double> x);

// Largest KKT violation of `model` (trained on `data`) over training points:
// y f(x) >= 1 at alpha = 0, = 1 for free alphas, <= 1 at alpha = C.
double max_kkt_residual(const SvmModel& model, const TrainingSet& data);

struct ProbabilityCalibration {
  double a = -1.0;
  double b = 0.0;
  bool degenerate = false;  // fit produced A >= 0 and was clamped
};

// Sigmoid fit of p(y=+1|f) = 1/(1+exp(A f + B)) on regularized targets by
// Newton's method with backtracking (at most 100 iterations).
ProbabilityCalibration fit_calibration(std::span<const double> decision_values, std::span<const int> labels);

double calibrated_probability(const ProbabilityCalibration& cal, double decision);

// Probability of class +1.
double predict_proba(const SvmModel& model, const ProbabilityCalibration& cal, std::span<const double> x);

// A model together with its calibration; the unit evaluated per modality.
struct ProbabilisticSvm {
  SvmModel model;
  ProbabilityCalibration calibration;
};

// Train, then calibrate on the training-set decision values.
ProbabilisticSvm train_probabilistic_svm(const TrainingSet& data, const SvmParams& params = {});

std::string serialize_model(const ProbabilisticSvm& svm);
ProbabilisticSvm deserialize_model(const std::string& json_text);
void save_model(const ProbabilisticSvm& svm, const std::filesystem::path& path);
ProbabilisticSvm load_model(const std::filesystem::path& path);

}  // namespace emomusic
