#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "upm/error.hpp"

namespace upm {

/// Dense row-major float tensor of rank 1 to 3. Rank-3 tensors are laid out
/// channel-first (C, h, w).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims);
  Tensor(std::vector<std::size_t> dims, std::vector<float> data);

  std::span<const std::size_t> dims() const noexcept { return dims_; }
  std::size_t rank() const noexcept { return dims_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t dim(std::size_t axis) const { return dims_.at(axis); }

  // Spatial view: rank-2 tensors are a single channel.
  std::size_t channels() const noexcept { return dims_.size() == 3 ? dims_[0] : 1; }
  std::size_t height() const noexcept { return dims_.size() >= 2 ? dims_[dims_.size() - 2] : 1; }
  std::size_t width() const noexcept { return dims_.empty() ? 0 : dims_.back(); }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  std::span<float> channel(std::size_t c);
  std::span<const float> channel(std::size_t c) const;

  float& at(std::size_t c, std::size_t y, std::size_t x) {
    return data_[(c * height() + y) * width() + x];
  }
  float at(std::size_t c, std::size_t y, std::size_t x) const {
    return data_[(c * height() + y) * width() + x];
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<float> data_;
};

/// Fixed-length feature vector, e.g. a GAP-pooled part descriptor.
struct Descriptor {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  friend bool operator==(const Descriptor&, const Descriptor&) = default;
};

/// Binary spatial mask, row-major, values 0 or 1.
struct BinaryMask {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> values;

  BinaryMask() = default;
  BinaryMask(std::size_t h, std::size_t w, std::uint8_t fill = 0)
      : height(h), width(w), values(h * w, fill) {}

  std::uint8_t& at(std::size_t y, std::size_t x) { return values[y * width + x]; }
  std::uint8_t at(std::size_t y, std::size_t x) const { return values[y * width + x]; }
  std::size_t count() const noexcept;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

/// Integer pixel box, origin top-left.
struct Box {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const Box&, const Box&) = default;
};

}  // namespace upm
