#include "upm/tensor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>

namespace upm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::UnsupportedElementType: return "UnsupportedElementType";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::ZeroExtent: return "ZeroExtent";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::AllZeroStack: return "AllZeroStack";
    case ErrorCode::ItemOutOfRange: return "ItemOutOfRange";
    case ErrorCode::InvalidBeta: return "InvalidBeta";
    case ErrorCode::UniverseTooLarge: return "UniverseTooLarge";
    case ErrorCode::EmptyMap: return "EmptyMap";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::DegenerateAffinity: return "DegenerateAffinity";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::EmptyTraining: return "EmptyTraining";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

std::size_t checked_volume(const std::vector<std::size_t>& dims) {
  if (dims.empty() || dims.size() > 3) {
    throw Error(ErrorCode::ShapeMismatch,
                "tensor rank must be 1-3, got " + std::to_string(dims.size()));
  }
  if (std::any_of(dims.begin(), dims.end(), [](std::size_t d) { return d == 0; })) {
    throw Error(ErrorCode::ZeroExtent, "tensor extents must be >= 1");
  }
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  data_.assign(checked_volume(dims_), 0.0f);
}

Tensor::Tensor(std::vector<std::size_t> dims, std::vector<float> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  if (checked_volume(dims_) != data_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "data length " + std::to_string(data_.size()) +
                                              " does not match dims volume");
  }
}

std::span<float> Tensor::channel(std::size_t c) {
  const std::size_t plane = height() * width();
  return std::span<float>(data_).subspan(c * plane, plane);
}

std::span<const float> Tensor::channel(std::size_t c) const {
  const std::size_t plane = height() * width();
  return std::span<const float>(data_).subspan(c * plane, plane);
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(values.begin(), values.end(), std::uint8_t{1}));
}

}  // namespace upm
