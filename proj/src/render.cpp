#include "upm/render.hpp"

#include <algorithm>
#include <cmath>

#include "upm/serialize.hpp"

namespace upm {

std::string to_rgb_bytes(const Tensor& image) {
  if (image.rank() != 3 || image.channels() != 3) {
    throw Error(ErrorCode::ShapeMismatch, "overlay image must be 3 × H × W");
  }
  const std::size_t h = image.height(), w = image.width();
  std::string out(h * w * 3, '\0');
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        const float v = std::clamp(std::round(image.at(c, y, x)), 0.0f, 255.0f);
        out[(y * w + x) * 3 + c] = static_cast<char>(static_cast<std::uint8_t>(v));
      }
    }
  }
  return out;
}

Tensor support_map_image(const SupportMap& s) {
  const auto v = s.values.data();
  const float peak = v.empty() ? 0.0f : *std::max_element(v.begin(), v.end());
  Tensor img({3, s.height(), s.width()});
  for (std::size_t y = 0; y < s.height(); ++y) {
    for (std::size_t x = 0; x < s.width(); ++x) {
      const float g = peak > 0.0f ? 255.0f * s.at(y, x) / peak : 0.0f;
      for (std::size_t c = 0; c < 3; ++c) img.at(c, y, x) = g;
    }
  }
  return img;
}

void draw_box(Tensor& image, const Box& box, Rgb color) {
  if (box.width <= 0 || box.height <= 0) return;
  const long h = static_cast<long>(image.height()), w = static_cast<long>(image.width());
  const long x0 = std::max<long>(0, box.x), y0 = std::max<long>(0, box.y);
  const long x1 = std::min<long>(w - 1, static_cast<long>(box.x) + box.width - 1);
  const long y1 = std::min<long>(h - 1, static_cast<long>(box.y) + box.height - 1);
  if (x0 > x1 || y0 > y1) return;
  for (long y = y0; y <= y1; ++y) {
    for (long x = x0; x <= x1; ++x) {
      const bool border = x <= x0 + 1 || x >= x1 - 1 || y <= y0 + 1 || y >= y1 - 1;
      if (!border) continue;
      for (std::size_t c = 0; c < 3; ++c) {
        image.at(c, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) = color[c];
      }
    }
  }
}

void write_ppm(const Tensor& image, const std::filesystem::path& path) {
  const std::string pixels = to_rgb_bytes(image);
  write_text("P6\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n" + pixels,
             path);
}

void render_overlay(const Tensor& image, const PartLayout& layout, const std::filesystem::path& path) {
  if (image.rank() != 3 || image.channels() != 3) {
    throw Error(ErrorCode::ShapeMismatch, "overlay image must be 3 × H × W");
  }
  if (image.height() != layout.image_height || image.width() != layout.image_width) {
    throw Error(ErrorCode::ShapeMismatch, "image is " + std::to_string(image.width()) + "x" +
                                              std::to_string(image.height()) + " but layout frame is " +
                                              std::to_string(layout.image_width) + "x" +
                                              std::to_string(layout.image_height));
  }
  Tensor canvas = image;
  draw_box(canvas, layout.object_box, kObjectBoxColor);
  for (std::size_t i = 0; i < layout.part_boxes.size(); ++i) {
    draw_box(canvas, layout.part_boxes[i], kPartColors[i % kPartColors.size()]);
  }
  write_ppm(canvas, path);
}

}  // namespace upm
