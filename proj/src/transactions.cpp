#include "upm/transactions.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "upm/ops.hpp"

namespace upm {

namespace {

void require_stack(const Tensor& stack) {
  if (stack.rank() != 3) {
    throw Error(ErrorCode::ShapeMismatch, "feature stack must be rank 3 (C, h, w)");
  }
}

}  // namespace

Tensor fuse_feature_layers(const Tensor& relu5, const Tensor& pool5) {
  require_stack(relu5);
  require_stack(pool5);
  const Tensor resized = bilinear_resize(pool5, relu5.height(), relu5.width());
  std::vector<float> data(relu5.data().begin(), relu5.data().end());
  data.insert(data.end(), resized.data().begin(), resized.data().end());
  return Tensor({relu5.channels() + pool5.channels(), relu5.height(), relu5.width()}, std::move(data));
}

ThresholdReport compute_threshold(const Tensor& stack, ThresholdMode mode) {
  require_stack(stack);
  ThresholdReport report;
  report.mode = mode;
  double total = 0.0;
  for (std::size_t c = 0; c < stack.channels(); ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (float v : stack.channel(c)) {
      if (v > 0.0f) {
        sum += v;
        ++count;
      }
    }
    total += sum;
    report.positive_count += count;
    if (mode == ThresholdMode::PerMap) {
      report.alpha.push_back(count > 0 ? sum / static_cast<double>(count)
                                       : std::numeric_limits<double>::infinity());
    }
  }
  if (mode == ThresholdMode::Global) {
    if (report.positive_count == 0) {
      throw Error(ErrorCode::AllZeroStack, "no positive activation in the feature stack");
    }
    report.alpha.push_back(total / static_cast<double>(report.positive_count));
  }
  return report;
}

TransactionDB build_transactions(const Tensor& stack, const ThresholdReport& thr) {
  require_stack(stack);
  if (thr.mode == ThresholdMode::PerMap && thr.alpha.size() != stack.channels()) {
    throw Error(ErrorCode::ShapeMismatch, "per-map threshold count does not match map count");
  }
  TransactionDB db;
  db.height = stack.height();
  db.width = stack.width();
  db.transactions.resize(stack.channels());
  for (std::size_t c = 0; c < stack.channels(); ++c) {
    const double alpha = thr.alpha_for(c);
    const auto plane = stack.channel(c);
    auto& t = db.transactions[c];
    for (std::size_t i = 0; i < plane.size(); ++i) {
      if (static_cast<double>(plane[i]) > alpha) t.push_back(static_cast<Item>(i));
    }
  }
  return db;
}

std::string format_transactions(const TransactionDB& db) {
  std::ostringstream out;
  for (const auto& t : db.transactions) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) out << ' ';
      out << t[i];
    }
    out << '\n';
  }
  return out.str();
}

ThresholdMode parse_threshold_mode(const std::string& name) {
  if (name == "global") return ThresholdMode::Global;
  if (name == "per-map" || name == "per_map") return ThresholdMode::PerMap;
  throw Error(ErrorCode::ConfigError, "unknown alpha mode '" + name + "' (expected global or per-map)");
}

std::string to_string(ThresholdMode mode) {
  return mode == ThresholdMode::Global ? "global" : "per-map";
}

}  // namespace upm
