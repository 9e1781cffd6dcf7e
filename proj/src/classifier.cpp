#include "upm/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "upm/ops.hpp"
#include "upm/random.hpp"

namespace upm {

namespace {

// Constant feature appended to every sample so the bias is learned as a weight.
constexpr double kBiasFeature = 1.0;

double primal_objective(const Matrix& x, std::span<const int> y, std::span<const double> w, double b,
                        double c) {
  double reg = b * b;
  for (double v : w) reg += v * v;
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double margin = b * kBiasFeature;
    const auto row = x.row(i);
    for (std::size_t d = 0; d < row.size(); ++d) margin += w[d] * row[d];
    loss += std::max(0.0, 1.0 - y[i] * margin);
  }
  return 0.5 * reg + c * loss;
}

}  // namespace

FusedFeature fuse_features(std::span<const Descriptor> blocks) {
  if (blocks.empty()) {
    throw Error(ErrorCode::InvalidArgument, "fuse_features needs at least one block");
  }
  FusedFeature out;
  out.block_len = blocks[0].size();
  out.blocks = blocks.size();
  out.values.reserve(out.block_len * out.blocks);
  for (const auto& b : blocks) {
    if (b.size() != out.block_len) {
      throw Error(ErrorCode::LengthMismatch, "descriptor blocks differ in length");
    }
    const auto unit = l2_normalize(b);
    out.values.insert(out.values.end(), unit.values.begin(), unit.values.end());
  }
  return out;
}

BinarySvm solve_binary_svm(const Matrix& x, std::span<const int> y, const SvmOptions& options) {
  const std::size_t n = x.rows(), dim = x.cols();
  const double c = options.c_reg;
  BinarySvm out;
  out.weights.assign(dim, 0.0);
  double& b = out.bias;

  std::vector<double> alpha(n, 0.0), q_diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sq = kBiasFeature * kBiasFeature;
    for (double v : x.row(i)) sq += v * v;
    q_diag[i] = sq;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(splitmix64(options.seed));

  auto dual = [&] {
    double reg = b * b;
    for (double v : out.weights) reg += v * v;
    return std::accumulate(alpha.begin(), alpha.end(), 0.0) - 0.5 * reg;
  };

  for (std::size_t epoch = 0; epoch < options.max_epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    for (std::size_t i : order) {
      const auto row = x.row(i);
      double margin = b * kBiasFeature;
      for (std::size_t d = 0; d < dim; ++d) margin += out.weights[d] * row[d];
      const double grad = y[i] * margin - 1.0;
      double projected = grad;
      if (alpha[i] == 0.0) projected = std::min(grad, 0.0);
      else if (alpha[i] == c) projected = std::max(grad, 0.0);
      if (std::abs(projected) <= 1e-12) continue;

      const double old = alpha[i];
      alpha[i] = std::clamp(old - grad / q_diag[i], 0.0, c);
      const double delta = (alpha[i] - old) * y[i];
      for (std::size_t d = 0; d < dim; ++d) out.weights[d] += delta * row[d];
      b += delta * kBiasFeature;
    }
    out.trace.epochs = epoch + 1;
    const double d = dual();
    out.trace.dual_objective.push_back(d);
    out.trace.primal_objective = primal_objective(x, y, out.weights, b, c);
    out.trace.duality_gap = out.trace.primal_objective - d;
    if (out.trace.duality_gap <= options.gap_tolerance) break;
  }
  if (out.trace.epochs == 0) {
    out.trace.primal_objective = primal_objective(x, y, out.weights, b, c);
    out.trace.duality_gap = out.trace.primal_objective;
  }
  return out;
}

SvmTrainingReport train_linear_svm_report(const Matrix& x, std::span<const std::string> y,
                                          const SvmOptions& options) {
  if (x.rows() == 0) throw Error(ErrorCode::EmptyTraining, "no training samples");
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, "sample and label counts differ");
  }
  if (!(options.c_reg > 0.0)) throw Error(ErrorCode::InvalidArgument, "C must be positive");
  const std::set<std::string> distinct(y.begin(), y.end());
  if (distinct.size() < 2) {
    throw Error(ErrorCode::SingleClass, "training labels contain a single class");
  }

  SvmTrainingReport report;
  report.model.classes.assign(distinct.begin(), distinct.end());
  report.model.c_reg = options.c_reg;
  std::vector<int> signs(y.size());
  for (std::size_t c = 0; c < report.model.classes.size(); ++c) {
    for (std::size_t i = 0; i < y.size(); ++i) signs[i] = y[i] == report.model.classes[c] ? 1 : -1;
    SvmOptions per_class = options;
    per_class.seed = splitmix64(options.seed + c);
    auto solved = solve_binary_svm(x, signs, per_class);
    report.model.weights.push_back(std::move(solved.weights));
    report.model.biases.push_back(solved.bias);
    report.traces.push_back(std::move(solved.trace));
  }
  return report;
}

LinearModel train_linear_svm(const Matrix& x, std::span<const std::string> y, const SvmOptions& options) {
  return train_linear_svm_report(x, y, options).model;
}

LinearModel train_linear_svm(std::span<const FusedFeature> x, std::span<const std::string> y,
                             const SvmOptions& options) {
  if (x.empty()) throw Error(ErrorCode::EmptyTraining, "no training samples");
  const std::size_t dim = x[0].values.size();
  Matrix m(x.size(), dim);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].values.size() != dim) {
      throw Error(ErrorCode::LengthMismatch, "fused features differ in length");
    }
    std::copy(x[i].values.begin(), x[i].values.end(), m.row(i).begin());
  }
  return train_linear_svm(m, y, options);
}

std::vector<double> class_scores(const LinearModel& model, std::span<const double> x) {
  if (x.size() != model.feature_length()) {
    throw Error(ErrorCode::LengthMismatch, "feature length " + std::to_string(x.size()) +
                                               " does not match model length " +
                                               std::to_string(model.feature_length()));
  }
  std::vector<double> scores;
  scores.reserve(model.classes.size());
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    double s = model.biases[c] * kBiasFeature;
    for (std::size_t d = 0; d < x.size(); ++d) s += model.weights[c][d] * x[d];
    scores.push_back(s);
  }
  return scores;
}

const std::string& predict(const LinearModel& model, std::span<const double> x) {
  const auto scores = class_scores(model, x);
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best] ||
        (scores[c] == scores[best] && model.classes[c] < model.classes[best])) {
      best = c;
    }
  }
  return model.classes[best];
}

}  // namespace upm
