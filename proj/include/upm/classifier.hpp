#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "upm/matrix.hpp"
#include "upm/tensor.hpp"

namespace upm {

/// [original ‖ object ‖ part 1 ‖ … ‖ part K], every block unit-norm.
struct FusedFeature {
  std::vector<double> values;
  std::size_t block_len = 0;
  std::size_t blocks = 0;
};

/// L2-normalizes each block and concatenates them in the given order.
/// Throws ZeroVector on an all-zero block and LengthMismatch on unequal lengths.
FusedFeature fuse_features(std::span<const Descriptor> blocks);

struct LinearModel {
  std::vector<std::string> classes;          // ascending
  std::vector<std::vector<double>> weights;  // one per class
  std::vector<double> biases;
  double c_reg = 1.0;

  std::size_t feature_length() const { return weights.empty() ? 0 : weights[0].size(); }
};

struct SvmOptions {
  double c_reg = 1.0;
  std::uint64_t seed = 0;
  double gap_tolerance = 1e-4;
  std::size_t max_epochs = 1000;
};

/// Convergence record of one binary (class-vs-rest) problem.
struct BinarySvmTrace {
  std::vector<double> dual_objective;  // after every epoch
  double primal_objective = 0.0;
  double duality_gap = 0.0;
  std::size_t epochs = 0;
};

struct BinarySvm {
  std::vector<double> weights;
  double bias = 0.0;
  BinarySvmTrace trace;
};

/// Dual coordinate descent for the L1-loss (hinge) L2-regularized SVM.
/// The bias is learned as the weight of a constant unit feature. Labels are
/// ±1. Stops when the duality gap drops to gap_tolerance or after max_epochs.
BinarySvm solve_binary_svm(const Matrix& x, std::span<const int> y, const SvmOptions& options);

struct SvmTrainingReport {
  LinearModel model;
  std::vector<BinarySvmTrace> traces;  // one per class
};

/// One-vs-rest training over the rows of `x`. Throws EmptyTraining,
/// LengthMismatch, or SingleClass.
SvmTrainingReport train_linear_svm_report(const Matrix& x, std::span<const std::string> y,
                                          const SvmOptions& options);

LinearModel train_linear_svm(const Matrix& x, std::span<const std::string> y, const SvmOptions& options);
LinearModel train_linear_svm(std::span<const FusedFeature> x, std::span<const std::string> y,
                             const SvmOptions& options);

std::vector<double> class_scores(const LinearModel& model, std::span<const double> x);

/// Highest-scoring class; ties go to the lexicographically smallest label.
const std::string& predict(const LinearModel& model, std::span<const double> x);

}  // namespace upm
