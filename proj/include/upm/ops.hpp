#pragma once

#include <cstddef>

#include "upm/tensor.hpp"

namespace upm {

/// Per-channel bilinear interpolation with corner-aligned sampling: output
/// pixel (y, x) samples the source at (y·(h−1)/(H−1), x·(w−1)/(W−1)), so the
/// source corners land exactly on the target corners. Rank 2 or 3 input.
Tensor bilinear_resize(const Tensor& t, std::size_t out_h, std::size_t out_w);

/// Channel means over the full h·w plane (masked-out zeros included).
Descriptor global_average_pool(const Tensor& t);

/// Unit-norm copy of `d`; throws ZeroVector if ‖d‖ < 1e-12.
Descriptor l2_normalize(const Descriptor& d);

/// Element-wise product with a binary mask, broadcast across channels.
Tensor masked_multiply(const Tensor& t, const BinaryMask& mask);

/// Spatial sub-window [y0, y0+h) × [x0, x0+w) of every channel.
Tensor crop(const Tensor& t, const Box& box);

/// Tight bounding box of the set pixels; a zero-size box when none are set.
Box mask_bounds(const BinaryMask& mask);

}  // namespace upm
