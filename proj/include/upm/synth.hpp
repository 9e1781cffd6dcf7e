#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "upm/localizer.hpp"
#include "upm/tensor.hpp"

namespace upm {

/// Feature stacks with known part structure: `groups` square blobs, laid out
/// edge to edge on a near-square arrangement so their union is one connected
/// object. Each group fires on an exact share of the maps. Within a firing,
/// a blob's center cell is always active and each further ring of cells
/// drops `ring_falloff` of the firings, so item frequency peaks at the blob
/// center. Scattered background items fire rarely.
struct PlantedOptions {
  std::size_t maps = 1024;
  std::size_t grid = 28;
  std::size_t image_size = 448;
  std::size_t groups = 4;
  std::size_t blob_cells = 5;       // blob side in grid cells
  // Zero cells between neighbouring blobs. A one-cell gap stays connected
  // after upsampling unless the gap lands exactly on a pixel.
  std::size_t gap_cells = 0;
  double min_group_freq = 0.18;     // share of maps each group fires on
  double max_group_freq = 0.24;
  double ring_falloff = 0.3;
  double noise_freq = 0.02;         // per-cell chance of a stray activation
  double baseline_fraction = 0.3;   // share of cells with weak (< α) activity
  std::uint64_t seed = 0;
};

struct PlantedFixture {
  Tensor stack;                     // maps × grid × grid, non-negative
  std::vector<Box> blobs;           // grid-cell boxes
  std::vector<double> group_freq;   // exact firing share per group (center cell)
  std::vector<Point> image_centers; // blob centers in image pixels
};

PlantedFixture make_planted_fixture(const PlantedOptions& options);

/// Grid-cell → image-pixel coordinate under corner-aligned resizing.
double grid_to_image(double cell, std::size_t grid, std::size_t image);

/// RGB image (3 × image × image, values 0..255) with each blob tinted.
Tensor render_fixture_image(const PlantedFixture& fixture, const PlantedOptions& options);

/// Conv-style features (channels × grid × grid) in which every blob lights up
/// its own block of channels, so part descriptors separate by group.
Tensor make_group_features(const PlantedFixture& fixture, const PlantedOptions& options,
                           std::size_t channels, std::uint64_t seed);

/// (blocks × block_len) descriptor matrix whose mean depends on `label`.
Tensor make_class_blocks(std::size_t label, std::size_t blocks, std::size_t block_len, std::uint64_t seed);

}  // namespace upm
