#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "upm/tensor.hpp"

namespace upm {

using Item = std::uint32_t;
using Itemset = std::vector<Item>;

/// One transaction per feature map; items are row-major grid positions
/// (row · width + column) whose activation exceeded the threshold.
struct TransactionDB {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<Itemset> transactions;

  std::size_t universe_size() const noexcept { return height * width; }
  std::size_t size() const noexcept { return transactions.size(); }
};

enum class ThresholdMode { Global, PerMap };

struct ThresholdReport {
  ThresholdMode mode = ThresholdMode::Global;
  // One entry in global mode, one per map otherwise (+inf for maps with no
  // positive activation).
  std::vector<double> alpha;
  std::size_t positive_count = 0;

  double alpha_for(std::size_t map) const { return mode == ThresholdMode::Global ? alpha.at(0) : alpha.at(map); }
};

/// Resizes `pool5` (C2×h2×w2) to the spatial size of `relu5` (C1×h×w) and
/// stacks the two along channels, relu5 first.
Tensor fuse_feature_layers(const Tensor& relu5, const Tensor& pool5);

/// α = mean of the strictly positive activations, globally or per map.
/// Throws AllZeroStack in global mode when nothing is positive.
ThresholdReport compute_threshold(const Tensor& stack, ThresholdMode mode);

/// Keeps positions with activation strictly greater than α. Empty
/// transactions are kept so the database always has one row per map.
TransactionDB build_transactions(const Tensor& stack, const ThresholdReport& thr);

/// Debug dump: one line per transaction, ascending items separated by spaces.
std::string format_transactions(const TransactionDB& db);

ThresholdMode parse_threshold_mode(const std::string& name);
std::string to_string(ThresholdMode mode);

}  // namespace upm
