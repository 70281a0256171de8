#include "emomusic/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "emomusic/error.hpp"
#include "emomusic/rng.hpp"
#include "emomusic/text_io.hpp"

namespace emomusic {

namespace {
constexpr double kTau = 1e-12;           // floor for a non-positive quadratic coefficient
constexpr double kRetainAlpha = 1e-12;   // smaller multipliers are dropped from the model
}  // namespace

double rbf_kernel(std::span<const double> u, std::span<const double> v, double scale) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    d2 += d * d;
  }
  return std::exp(-d2 / (scale * scale));
}

void validate(const TrainingSet& data) {
  const auto n = data.x.rows();
  if (n != data.y.size()) throw Error(ErrorKind::InvalidArgument, "feature rows and labels differ in length");
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 training points");
  bool pos = false, neg = false;
  for (int label : data.y) {
    if (label == 1) pos = true;
    else if (label == -1) neg = true;
    else throw Error(ErrorKind::InvalidArgument, "labels must be +1 or -1");
  }
  if (!pos || !neg) throw Error(ErrorKind::SingleClass, "training set contains a single class");
  for (double v : data.x.data())
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite feature value");
}

SvmModel train_svm(const TrainingSet& data, const SvmParams& params) {
  validate(data);
  if (!(params.c > 0) || !(params.kernel_scale > 0) || !(params.tol > 0))
    throw Error(ErrorKind::InvalidArgument, "C, kernel scale and tol must be positive");

  const std::size_t n = data.x.rows();
  const double c = params.c;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<double>(data.y[i]);

  // Q_ij = y_i y_j K(x_i, x_j)
  std::vector<double> q(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    q[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = y[i] * y[j] * rbf_kernel(data.x.row(i), data.x.row(j), params.kernel_scale);
      q[i * n + j] = v;
      q[j * n + i] = v;
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(params.seed);
  shuffle_in_place(order, rng);

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 0.5 a'Qa - e'a
  auto in_up = [&](std::size_t t) { return y[t] > 0 ? alpha[t] < c : alpha[t] > 0; };
  auto in_low = [&](std::size_t t) { return y[t] > 0 ? alpha[t] > 0 : alpha[t] < c; };
  auto dual_objective = [&] {
    // e'a - 0.5 a'Qa = 0.5 * sum a_i (1 - grad_i)
    double s = 0.0;
    for (std::size_t t = 0; t < n; ++t) s += alpha[t] * (1.0 - grad[t]);
    return 0.5 * s;
  };

  SvmModel model;
  model.c = c;
  model.kernel_scale = params.kernel_scale;
  model.seed = params.seed;
  model.converged = false;

  const std::size_t max_iter = 100 * n;
  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    std::size_t i = n, j = n;
    for (std::size_t t : order) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > m_up) {
        m_up = v;
        i = t;
      }
      if (in_low(t) && v < m_low) {
        m_low = v;
        j = t;
      }
    }
    if (i == n || j == n || m_up - m_low < params.tol) {
      model.converged = true;
      break;
    }

    const double* qi = &q[i * n];
    const double* qj = &q[j * n];
    const double old_i = alpha[i], old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = qi[i] + qj[j] + 2.0 * qi[j];
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
      }
      if (diff > 0) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = c - diff; }
      } else {
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = c + diff; }
      }
    } else {
      double quad = qi[i] + qj[j] - 2.0 * qi[j];
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = sum - c; }
      } else {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
      }
      if (sum > c) {
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = sum - c; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
      }
    }

    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) grad[t] += qi[t] * di + qj[t] * dj;
    if (params.record_objective) model.objective_trace.push_back(dual_objective());
  }
  model.iterations = iter;

  // Bias from free multipliers, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= c) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (ub + lb);
  model.bias = -rho;

  model.alphas = alpha;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > kRetainAlpha) {
      model.support_vectors.append_row(data.x.row(t));
      model.coefficients.push_back(alpha[t] * y[t]);
    }
  }
  if (model.support_vectors.rows() == 0) model.support_vectors = Matrix(0, data.x.cols());
  return model;
}

double decision_value(const SvmModel& model, std::span<const double> x) {
  double f = model.bias;
  for (std::size_t i = 0; i < model.coefficients.size(); ++i)
    f += model.coefficients[i] * rbf_kernel(model.support_vectors.row(i), x, model.kernel_scale);
  return f;
}

double max_kkt_residual(const SvmModel& model, const TrainingSet& data) {
  double worst = 0.0;
  for (std::size_t t = 0; t < data.x.rows(); ++t) {
    const double yf = data.y[t] * decision_value(model, data.x.row(t));
    const double a = model.alphas.at(t);
    double r = 0.0;
    if (a <= kRetainAlpha) r = std::max(0.0, 1.0 - yf);
    else if (a >= model.c) r = std::max(0.0, yf - 1.0);
    else r = std::abs(yf - 1.0);
    worst = std::max(worst, r);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Probability calibration

ProbabilityCalibration fit_calibration(std::span<const double> f, std::span<const int> labels) {
  if (f.size() != labels.size()) throw Error(ErrorKind::InvalidArgument, "decision values and labels differ in length");
  double prior1 = 0, prior0 = 0;
  for (int l : labels) (l > 0 ? prior1 : prior0) += 1.0;
  if (prior1 == 0 || prior0 == 0) throw Error(ErrorKind::SingleClass, "calibration needs both classes");

  constexpr int kMaxIter = 100;
  constexpr double kMinStep = 1e-10;
  constexpr double kSigma = 1e-12;
  const double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo_target = 1.0 / (prior0 + 2.0);
  const std::size_t n = f.size();
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = labels[i] > 0 ? hi_target : lo_target;

  auto objective = [&](double a, double b) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = f[i] * a + b;
      v += z >= 0 ? t[i] * z + std::log1p(std::exp(-z)) : (t[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return v;
  };

  double a = 0.0, b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  double fval = objective(a, b);
  for (int it = 0; it < kMaxIter; ++it) {
    double h11 = kSigma, h22 = kSigma, h21 = 0, g1 = 0, g2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = f[i] * a + b;
      double p, q;
      if (z >= 0) {
        const double e = std::exp(-z);
        p = e / (1.0 + e);
        q = 1.0 / (1.0 + e);
      } else {
        const double e = std::exp(z);
        p = 1.0 / (1.0 + e);
        q = e / (1.0 + e);
      }
      const double d2 = p * q;
      h11 += f[i] * f[i] * d2;
      h22 += d2;
      h21 += f[i] * d2;
      const double d1 = t[i] - p;
      g1 += f[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;

    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= kMinStep) {
      const double na = a + step * da, nb = b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < kMinStep) break;
  }

  ProbabilityCalibration cal{a, b, false};
  if (!(cal.a < 0.0)) {
    cal.a = -1e-9;
    cal.degenerate = true;
  }
  return cal;
}

double calibrated_probability(const ProbabilityCalibration& cal, double decision) {
  const double z = cal.a * decision + cal.b;
  return z >= 0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
}

double predict_proba(const SvmModel& model, const ProbabilityCalibration& cal, std::span<const double> x) {
  return calibrated_probability(cal, decision_value(model, x));
}

ProbabilisticSvm train_probabilistic_svm(const TrainingSet& data, const SvmParams& params) {
  ProbabilisticSvm out;
  out.model = train_svm(data, params);
  std::vector<double> f(data.x.rows());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = decision_value(out.model, data.x.row(i));
  out.calibration = fit_calibration(f, data.y);
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

using nlohmann::json;

std::string serialize_model(const ProbabilisticSvm& svm) {
  const auto& m = svm.model;
  json sv = json::array();
  for (std::size_t i = 0; i < m.support_vectors.rows(); ++i) {
    auto r = m.support_vectors.row(i);
    sv.push_back(std::vector<double>(r.begin(), r.end()));
  }
  json doc = {{"format", "emomusic-svm/1"},
              {"dimension", m.support_vectors.cols()},
              {"support_vectors", sv},
              {"coefficients", m.coefficients},
              {"bias", m.bias},
              {"c", m.c},
              {"kernel_scale", m.kernel_scale},
              {"seed", m.seed},
              {"converged", m.converged},
              {"calibration", {{"a", svm.calibration.a}, {"b", svm.calibration.b}, {"degenerate", svm.calibration.degenerate}}}};
  return doc.dump(1);
}

ProbabilisticSvm deserialize_model(const std::string& json_text) {
  ProbabilisticSvm out;
  try {
    const auto doc = json::parse(json_text);
    auto& m = out.model;
    const auto dim = doc.at("dimension").get<std::size_t>();
    m.support_vectors = Matrix(0, dim);
    for (const auto& r : doc.at("support_vectors")) {
      const auto row = r.get<std::vector<double>>();
      if (row.size() != dim) throw Error(ErrorKind::ParseError, "support vector has wrong dimension");
      m.support_vectors.append_row(row);
    }
    m.coefficients = doc.at("coefficients").get<std::vector<double>>();
    if (m.coefficients.size() != m.support_vectors.rows())
      throw Error(ErrorKind::ParseError, "coefficient count does not match support vectors");
    m.bias = doc.at("bias").get<double>();
    m.c = doc.at("c").get<double>();
    m.kernel_scale = doc.at("kernel_scale").get<double>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.converged = doc.value("converged", true);
    const auto& cal = doc.at("calibration");
    out.calibration = {cal.at("a").get<double>(), cal.at("b").get<double>(), cal.value("degenerate", false)};
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("model document: ") + e.what());
  }
  return out;
}

void save_model(const ProbabilisticSvm& svm, const std::filesystem::path& path) {
  text::write_file(path, serialize_model(svm) + "\n");
}

ProbabilisticSvm load_model(const std::filesystem::path& path) { return deserialize_model(text::read_file(path)); }

}  // namespace emomusic
