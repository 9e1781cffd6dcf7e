#include "upm/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace upm {

namespace {

struct Sample {
  std::size_t lo;
  std::size_t hi;
  double frac;
};

std::vector<Sample> corner_aligned_samples(std::size_t in, std::size_t out) {
  std::vector<Sample> samples(out);
  const double scale = out > 1 ? static_cast<double>(in - 1) / static_cast<double>(out - 1) : 0.0;
  for (std::size_t i = 0; i < out; ++i) {
    const double src = in == out ? static_cast<double>(i) : static_cast<double>(i) * scale;
    std::size_t lo = static_cast<std::size_t>(std::floor(src));
    lo = std::min(lo, in - 1);
    const std::size_t hi = std::min(lo + 1, in - 1);
    samples[i] = {lo, hi, src - static_cast<double>(lo)};
  }
  return samples;
}

}  // namespace

Tensor bilinear_resize(const Tensor& t, std::size_t out_h, std::size_t out_w) {
  if (t.rank() < 2) {
    throw Error(ErrorCode::ShapeMismatch, "bilinear_resize needs a rank-2 or rank-3 tensor");
  }
  if (out_h == 0 || out_w == 0) {
    throw Error(ErrorCode::ZeroExtent, "bilinear_resize target extent is zero");
  }
  const std::size_t h = t.height(), w = t.width(), channels = t.channels();
  if (h == out_h && w == out_w) return t;

  const auto rows = corner_aligned_samples(h, out_h);
  const auto cols = corner_aligned_samples(w, out_w);
  std::vector<std::size_t> dims = t.rank() == 3
                                      ? std::vector<std::size_t>{channels, out_h, out_w}
                                      : std::vector<std::size_t>{out_h, out_w};
  Tensor out(std::move(dims));
  for (std::size_t c = 0; c < channels; ++c) {
    const auto src = t.channel(c);
    auto dst = out.channel(c);
    for (std::size_t y = 0; y < out_h; ++y) {
      const auto& r = rows[y];
      for (std::size_t x = 0; x < out_w; ++x) {
        const auto& q = cols[x];
        // lerp form keeps equal neighbours exact, so constant fields stay constant.
        const double top = std::lerp(double(src[r.lo * w + q.lo]), double(src[r.lo * w + q.hi]), q.frac);
        const double bottom = std::lerp(double(src[r.hi * w + q.lo]), double(src[r.hi * w + q.hi]), q.frac);
        dst[y * out_w + x] = static_cast<float>(std::lerp(top, bottom, r.frac));
      }
    }
  }
  return out;
}

Descriptor global_average_pool(const Tensor& t) {
  if (t.rank() != 3) {
    throw Error(ErrorCode::ShapeMismatch, "global_average_pool needs a rank-3 tensor");
  }
  Descriptor d;
  d.values.resize(t.channels());
  const double plane = static_cast<double>(t.height() * t.width());
  for (std::size_t c = 0; c < t.channels(); ++c) {
    double sum = 0.0;
    for (float v : t.channel(c)) sum += v;
    d.values[c] = sum / plane;
  }
  return d;
}

Descriptor l2_normalize(const Descriptor& d) {
  double sq = 0.0;
  for (double v : d.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "descriptor has non-finite entry");
    sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (norm < 1e-12) {
    throw Error(ErrorCode::ZeroVector, "descriptor norm is below 1e-12");
  }
  Descriptor out = d;
  for (double& v : out.values) v /= norm;
  return out;
}

Tensor masked_multiply(const Tensor& t, const BinaryMask& mask) {
  if (t.rank() < 2 || mask.height != t.height() || mask.width != t.width()) {
    throw Error(ErrorCode::ShapeMismatch,
                "mask " + std::to_string(mask.height) + "x" + std::to_string(mask.width) +
                    " does not match tensor spatial dims " + std::to_string(t.height()) + "x" +
                    std::to_string(t.width()));
  }
  Tensor out = t;
  for (std::size_t c = 0; c < out.channels(); ++c) {
    auto plane = out.channel(c);
    for (std::size_t i = 0; i < plane.size(); ++i) {
      if (mask.values[i] == 0) plane[i] = 0.0f;
    }
  }
  return out;
}

Tensor crop(const Tensor& t, const Box& box) {
  if (t.rank() < 2 || box.width <= 0 || box.height <= 0 || box.x < 0 || box.y < 0 ||
      static_cast<std::size_t>(box.x + box.width) > t.width() ||
      static_cast<std::size_t>(box.y + box.height) > t.height()) {
    throw Error(ErrorCode::ShapeMismatch, "crop box outside tensor bounds");
  }
  const auto bw = static_cast<std::size_t>(box.width), bh = static_cast<std::size_t>(box.height);
  std::vector<std::size_t> dims = t.rank() == 3 ? std::vector<std::size_t>{t.channels(), bh, bw}
                                                : std::vector<std::size_t>{bh, bw};
  Tensor out(std::move(dims));
  for (std::size_t c = 0; c < t.channels(); ++c) {
    for (std::size_t y = 0; y < bh; ++y) {
      for (std::size_t x = 0; x < bw; ++x) {
        out.at(c, y, x) = t.at(c, y + static_cast<std::size_t>(box.y), x + static_cast<std::size_t>(box.x));
      }
    }
  }
  return out;
}

Box mask_bounds(const BinaryMask& mask) {
  std::size_t x0 = mask.width, y0 = mask.height, x1 = 0, y1 = 0;
  bool any = false;
  for (std::size_t y = 0; y < mask.height; ++y) {
    for (std::size_t x = 0; x < mask.width; ++x) {
      if (mask.at(y, x)) {
        any = true;
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
    }
  }
  if (!any) return {};
  return {static_cast<int>(x0), static_cast<int>(y0), static_cast<int>(x1 - x0 + 1),
          static_cast<int>(y1 - y0 + 1)};
}

}  // namespace upm
