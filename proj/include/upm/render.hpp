#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "upm/localizer.hpp"
#include "upm/tensor.hpp"

namespace upm {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kObjectBoxColor{255, 255, 0};
inline constexpr std::array<Rgb, 6> kPartColors{{{255, 0, 0}, {0, 255, 0}, {0, 128, 255},
                                                  {255, 0, 255}, {0, 255, 255}, {255, 128, 0}}};

/// 3 × H × W float image (0..255) → clamped 8-bit interleaved RGB.
std::string to_rgb_bytes(const Tensor& image);

/// Grayscale 3-channel rendering of a support map scaled to 0..255.
Tensor support_map_image(const SupportMap& s);

/// Draws a 2-pixel rectangle border for `box`, clipped to the image.
void draw_box(Tensor& image, const Box& box, Rgb color);

/// Object box plus each part box in the fixed palette, written as binary PPM
/// (P6). Throws ShapeMismatch when the image does not match the layout frame.
void render_overlay(const Tensor& image, const PartLayout& layout, const std::filesystem::path& path);

void write_ppm(const Tensor& image, const std::filesystem::path& path);

}  // namespace upm
