#include "upm/localizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "upm/kmeans.hpp"
#include "upm/ops.hpp"

namespace upm {

namespace {

void require_connectivity(int connectivity) {
  if (connectivity != 4 && connectivity != 8) {
    throw Error(ErrorCode::InvalidArgument,
                "connectivity must be 4 or 8, got " + std::to_string(connectivity));
  }
}

BinaryMask positive_mask(const SupportMap& s, float threshold = 0.0f, bool inclusive = false) {
  BinaryMask m(s.height(), s.width());
  const auto v = s.values.data();
  for (std::size_t i = 0; i < v.size(); ++i) {
    m.values[i] = inclusive ? (v[i] >= threshold && v[i] > 0.0f) : v[i] > threshold;
  }
  return m;
}

}  // namespace

int Components::largest() const {
  int best = -1;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (best < 0 || sizes[i] > sizes[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

Components label_components(const BinaryMask& mask, int connectivity) {
  require_connectivity(connectivity);
  const std::size_t h = mask.height, w = mask.width;
  Components out;
  out.labels.assign(h * w, -1);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < h * w; ++start) {
    if (!mask.values[start] || out.labels[start] >= 0) continue;
    const int label = static_cast<int>(out.sizes.size());
    std::size_t size = 0;
    out.labels[start] = label;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++size;
      const auto y = static_cast<long>(p / w), x = static_cast<long>(p % w);
      for (long dy = -1; dy <= 1; ++dy) {
        for (long dx = -1; dx <= 1; ++dx) {
          if ((dy == 0 && dx == 0) || (connectivity == 4 && dy != 0 && dx != 0)) continue;
          const long ny = y + dy, nx = x + dx;
          if (ny < 0 || nx < 0 || ny >= static_cast<long>(h) || nx >= static_cast<long>(w)) continue;
          const std::size_t q = static_cast<std::size_t>(ny) * w + static_cast<std::size_t>(nx);
          if (mask.values[q] && out.labels[q] < 0) {
            out.labels[q] = label;
            stack.push_back(q);
          }
        }
      }
    }
    out.sizes.push_back(size);
  }
  return out;
}

SupportMap build_support_map(const PatternSet& patterns, const TransactionDB& db) {
  if (db.height == 0 || db.width == 0) {
    throw Error(ErrorCode::ZeroExtent, "transaction database has no grid");
  }
  SupportMap s;
  s.values = Tensor({db.height, db.width});
  s.scale = MapScale::FeatureGrid;
  s.source_height = db.height;
  s.source_width = db.width;
  s.empty_patterns = patterns.empty();
  if (patterns.empty()) return s;

  std::vector<std::size_t> freq(db.universe_size(), 0);
  for (const auto& t : db.transactions) {
    for (Item i : t) ++freq[i];
  }
  auto values = s.values.data();
  for (Item i : patterns.item_union()) {
    if (i >= db.universe_size()) {
      throw Error(ErrorCode::ItemOutOfRange, "pattern item " + std::to_string(i) + " outside grid");
    }
    values[i] = static_cast<float>(freq[i]);
  }
  return s;
}

SupportMap upsample_support_map(const SupportMap& s, std::size_t image_h, std::size_t image_w) {
  SupportMap out = s;
  out.values = bilinear_resize(s.values, image_h, image_w);
  out.scale = MapScale::Image;
  return out;
}

SupportMap extract_largest_component(const SupportMap& s, int connectivity) {
  const auto comps = label_components(positive_mask(s), connectivity);
  const int keep = comps.largest();
  if (keep < 0) {
    throw Error(ErrorCode::EmptyMap, "support map has no positive pixel");
  }
  SupportMap out = s;
  auto v = out.values.data();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (comps.labels[i] != keep) v[i] = 0.0f;
  }
  return out;
}

std::vector<Point> find_part_centers(const SupportMap& s, std::size_t k, std::uint64_t seed,
                                     std::size_t restarts) {
  std::vector<std::array<double, 3>> raw;
  for (std::size_t y = 0; y < s.height(); ++y) {
    for (std::size_t x = 0; x < s.width(); ++x) {
      const float v = s.at(y, x);
      if (v > 0.0f) raw.push_back({static_cast<double>(x), static_cast<double>(y), static_cast<double>(v)});
    }
  }
  if (k == 0 || raw.size() < k) {
    throw Error(ErrorCode::TooFewPoints, "support map has " + std::to_string(raw.size()) +
                                             " positive pixels, need at least k=" + std::to_string(k));
  }

  std::array<double, 3> lo{raw[0]}, hi{raw[0]};
  for (const auto& p : raw) {
    for (std::size_t d = 0; d < 3; ++d) {
      lo[d] = std::min(lo[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }
  }
  std::vector<std::size_t> kept;
  for (std::size_t d = 0; d < 3; ++d) {
    if (hi[d] - lo[d] > 1e-12 * std::max(1.0, std::abs(hi[d]))) kept.push_back(d);
  }

  std::vector<Point> centers;
  if (kept.empty()) {
    // Every feature is constant: a single point, so every center sits on it.
    centers.assign(k, Point{lo[0], lo[1]});
    return centers;
  }

  Matrix features(raw.size(), kept.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (std::size_t j = 0; j < kept.size(); ++j) {
      const std::size_t d = kept[j];
      features(i, j) = (raw[i][d] - lo[d]) / (hi[d] - lo[d]);
    }
  }
  KMeansOptions opts;
  opts.k = k;
  opts.seed = seed;
  const auto result = kmeans_best_of(features, opts, restarts);

  for (std::size_t c = 0; c < k; ++c) {
    std::array<double, 3> full = lo;
    for (std::size_t j = 0; j < kept.size(); ++j) {
      const std::size_t d = kept[j];
      full[d] = lo[d] + result.centers(c, j) * (hi[d] - lo[d]);
    }
    centers.push_back({full[0], full[1]});
  }
  return centers;
}

BinaryMask part_mask(PixelPoint center, int side, std::size_t h, std::size_t w) {
  BinaryMask m(h, w);
  const double half = side / 2.0;
  const long x0 = std::max<long>(0, static_cast<long>(std::ceil(center.x - half)));
  const long x1 = std::min<long>(static_cast<long>(w) - 1, static_cast<long>(std::floor(center.x + half)));
  const long y0 = std::max<long>(0, static_cast<long>(std::ceil(center.y - half)));
  const long y1 = std::min<long>(static_cast<long>(h) - 1, static_cast<long>(std::floor(center.y + half)));
  for (long y = y0; y <= y1; ++y) {
    for (long x = x0; x <= x1; ++x) m.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x)) = 1;
  }
  return m;
}

PartLayout derive_part_layout(const std::vector<Point>& centers, const SupportMap& s, double lambda,
                              std::size_t image_h, std::size_t image_w) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "lambda must lie in (0, 1]");
  }
  const Box support = mask_bounds(positive_mask(s));
  if (support.width == 0) {
    throw Error(ErrorCode::EmptyMap, "support map has no positive pixel");
  }
  PartLayout layout;
  layout.image_height = image_h;
  layout.image_width = image_w;
  layout.support_box = support;
  layout.object_box = support;
  layout.side = std::max(1, static_cast<int>(std::lround(lambda * std::min(support.width, support.height))));
  for (const auto& c : centers) {
    const PixelPoint p{static_cast<int>(std::lround(c.x)), static_cast<int>(std::lround(c.y))};
    layout.centers.push_back(p);
    layout.masks.push_back(part_mask(p, layout.side, image_h, image_w));
    layout.part_boxes.push_back(mask_bounds(layout.masks.back()));
  }
  return layout;
}

Box object_box(const SupportMap& s, double frac, int connectivity) {
  if (!(frac > 0.0 && frac < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "object-box fraction must lie in (0, 1)");
  }
  const auto v = s.values.data();
  const float peak = v.empty() ? 0.0f : *std::max_element(v.begin(), v.end());
  if (!(peak > 0.0f)) {
    throw Error(ErrorCode::EmptyMap, "support map has no positive pixel");
  }
  const BinaryMask binary = positive_mask(s, static_cast<float>(frac * peak), true);
  const auto comps = label_components(binary, connectivity);
  const int keep = comps.largest();
  BinaryMask region(s.height(), s.width());
  for (std::size_t i = 0; i < region.values.size(); ++i) region.values[i] = comps.labels[i] == keep;
  return mask_bounds(region);
}

Tensor crop_region(const Tensor& image, const BinaryMask& mask, std::size_t out_size) {
  if (mask.count() == 0) {
    throw Error(ErrorCode::EmptyMask, "crop mask selects no pixel");
  }
  const Tensor masked = masked_multiply(image, mask);
  return bilinear_resize(crop(masked, mask_bounds(mask)), out_size, out_size);
}

}  // namespace upm
