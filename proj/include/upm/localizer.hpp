#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "upm/mining.hpp"
#include "upm/tensor.hpp"
#include "upm/transactions.hpp"

namespace upm {

enum class MapScale { FeatureGrid, Image };

/// Per-position activation frequency of frequent items (rank-2 values).
struct SupportMap {
  Tensor values;
  MapScale scale = MapScale::FeatureGrid;
  std::size_t source_height = 0;
  std::size_t source_width = 0;
  // Set when built from an empty pattern set (the map is then all zero).
  bool empty_patterns = false;

  std::size_t height() const noexcept { return values.height(); }
  std::size_t width() const noexcept { return values.width(); }
  float at(std::size_t y, std::size_t x) const { return values.at(0, y, x); }
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct PixelPoint {
  int x = 0;
  int y = 0;
  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

struct PartLayout {
  std::size_t image_height = 0;
  std::size_t image_width = 0;
  Box support_box;  // tight box of the support map's positive pixels
  Box object_box;   // box reported downstream; the binarized object box after run_pipeline
  std::vector<PixelPoint> centers;
  int side = 0;
  std::vector<Box> part_boxes;  // bounds of each clamped mask
  std::vector<BinaryMask> masks;

  std::size_t k() const noexcept { return centers.size(); }
};

/// Connected components of the set pixels, labelled in row-major order of
/// their first pixel.
struct Components {
  std::vector<int> labels;  // -1 for background
  std::vector<std::size_t> sizes;

  std::size_t count() const noexcept { return sizes.size(); }
  /// Label of the largest component, ties to the lowest label; -1 if none.
  int largest() const;
};

Components label_components(const BinaryMask& mask, int connectivity);

/// S(x, y) = number of transactions containing the item at (x, y) when that
/// item belongs to some mined pattern, zero otherwise.
SupportMap build_support_map(const PatternSet& patterns, const TransactionDB& db);

/// Corner-aligned bilinear upsampling to image resolution.
SupportMap upsample_support_map(const SupportMap& s, std::size_t image_h, std::size_t image_w);

/// Zeroes every positive region except the largest connected one. Throws EmptyMap.
SupportMap extract_largest_component(const SupportMap& s, int connectivity);

/// Clusters {[x, y, S(x, y)] : S > 0} into k groups and returns the (x, y)
/// of each center in pixel coordinates. Each feature is min-max scaled to
/// [0, 1] and constant features are dropped before clustering. Best of
/// `restarts` seeded runs. Throws TooFewPoints.
std::vector<Point> find_part_centers(const SupportMap& s, std::size_t k, std::uint64_t seed,
                                     std::size_t restarts = 5);

/// Part side l = round(λ · min(w_o, h_o)) (at least 1) from the support box,
/// and one square mask per center: |x − c_x| ≤ l/2 and |y − c_y| ≤ l/2,
/// clipped to the image. Centers are rounded to the nearest pixel first.
PartLayout derive_part_layout(const std::vector<Point>& centers, const SupportMap& s, double lambda,
                              std::size_t image_h, std::size_t image_w);

/// Square mask of side `side` centred on `center`, clipped to h × w.
BinaryMask part_mask(PixelPoint center, int side, std::size_t h, std::size_t w);

/// Binarizes S at frac · max(S), keeps the largest connected region and
/// returns its tight bounding box. Throws EmptyMap.
Box object_box(const SupportMap& s, double frac, int connectivity = 8);

/// Masks the image, crops to the mask's bounds and resizes to out_size².
Tensor crop_region(const Tensor& image, const BinaryMask& mask, std::size_t out_size = 224);

}  // namespace upm
