#include "upm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "upm/ops.hpp"
#include "upm/random.hpp"

namespace upm {

namespace {

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

}  // namespace

double grid_to_image(double cell, std::size_t grid, std::size_t image) {
  if (grid <= 1) return 0.0;
  return cell * static_cast<double>(image - 1) / static_cast<double>(grid - 1);
}

PlantedFixture make_planted_fixture(const PlantedOptions& o) {
  if (o.groups == 0 || o.blob_cells == 0 || o.maps == 0) {
    throw Error(ErrorCode::InvalidArgument, "planted fixture needs groups, blob size and maps");
  }
  const auto per_row = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(o.groups))));
  const std::size_t rows = (o.groups + per_row - 1) / per_row;
  const std::size_t pitch = o.blob_cells + o.gap_cells;
  const std::size_t span_x = per_row * pitch - o.gap_cells, span_y = rows * pitch - o.gap_cells;
  if (span_x + 4 > o.grid || span_y + 4 > o.grid) {
    throw Error(ErrorCode::InvalidArgument, "planted blobs do not fit in the grid");
  }

  Rng rng(splitmix64(o.seed));
  PlantedFixture f;
  const std::size_t ox = 2 + uniform_index(rng, o.grid - span_x - 3);
  const std::size_t oy = 2 + uniform_index(rng, o.grid - span_y - 3);
  for (std::size_t g = 0; g < o.groups; ++g) {
    const Box b{static_cast<int>(ox + (g % per_row) * pitch), static_cast<int>(oy + (g / per_row) * pitch),
                static_cast<int>(o.blob_cells),
                static_cast<int>(o.blob_cells)};
    f.blobs.push_back(b);
    const double cx = b.x + (b.width - 1) / 2.0, cy = b.y + (b.height - 1) / 2.0;
    f.image_centers.push_back({grid_to_image(cx, o.grid, o.image_size), grid_to_image(cy, o.grid, o.image_size)});
  }

  // Groups take consecutive slices of one shuffled map order, so their
  // firing sets only overlap once the shares add up to more than 1.
  std::vector<std::size_t> order(o.maps);
  std::iota(order.begin(), order.end(), 0);
  shuffle(std::span<std::size_t>(order), rng);
  std::vector<std::vector<std::size_t>> group_maps(o.groups);
  std::size_t cursor = 0;
  for (std::size_t g = 0; g < o.groups; ++g) {
    const double freq = uniform(rng, o.min_group_freq, o.max_group_freq);
    const auto count = std::min(o.maps, static_cast<std::size_t>(std::ceil(freq * static_cast<double>(o.maps))));
    f.group_freq.push_back(static_cast<double>(count) / static_cast<double>(o.maps));
    for (std::size_t i = 0; i < count; ++i) group_maps[g].push_back(order[(cursor + i) % o.maps]);
    cursor += count;
  }

  const std::size_t cells = o.grid * o.grid;
  std::vector<float> data(o.maps * cells, 0.0f);
  for (std::size_t m = 0; m < o.maps; ++m) {
    float* plane = data.data() + m * cells;
    for (std::size_t i = 0; i < cells; ++i) {
      if (uniform01(rng) < o.baseline_fraction) plane[i] = static_cast<float>(uniform(rng, 0.01, 0.2));
      if (uniform01(rng) < o.noise_freq) plane[i] = static_cast<float>(uniform(rng, 2.0, 4.0));
    }
  }
  const double mid = (static_cast<double>(o.blob_cells) - 1.0) / 2.0;
  for (std::size_t g = 0; g < o.groups; ++g) {
    const Box& b = f.blobs[g];
    auto maps = group_maps[g];
    for (int dy = 0; dy < b.height; ++dy) {
      for (int dx = 0; dx < b.width; ++dx) {
        const double ring = std::floor(std::max(std::abs(dx - mid), std::abs(dy - mid)));
        const double share = std::max(0.0, 1.0 - o.ring_falloff * ring);
        const auto fire = static_cast<std::size_t>(std::ceil(share * static_cast<double>(maps.size())));
        shuffle(std::span<std::size_t>(maps), rng);
        const std::size_t cell = static_cast<std::size_t>(b.y + dy) * o.grid + static_cast<std::size_t>(b.x + dx);
        for (std::size_t i = 0; i < fire; ++i) {
          data[maps[i] * cells + cell] = static_cast<float>(uniform(rng, 2.0, 4.0));
        }
      }
    }
  }
  f.stack = Tensor({o.maps, o.grid, o.grid}, std::move(data));
  return f;
}

Tensor render_fixture_image(const PlantedFixture& fixture, const PlantedOptions& o) {
  static constexpr float kTints[][3] = {{200, 60, 60}, {60, 180, 60}, {60, 90, 210}, {210, 170, 40},
                                        {170, 60, 190}, {40, 180, 180}};
  Tensor grid({3, o.grid, o.grid});
  for (std::size_t y = 0; y < o.grid; ++y) {
    for (std::size_t x = 0; x < o.grid; ++x) {
      for (std::size_t c = 0; c < 3; ++c) grid.at(c, y, x) = 90.0f + 2.0f * static_cast<float>(y);
    }
  }
  for (std::size_t g = 0; g < fixture.blobs.size(); ++g) {
    const Box& b = fixture.blobs[g];
    const auto& tint = kTints[g % std::size(kTints)];
    for (int y = b.y; y < b.y + b.height; ++y) {
      for (int x = b.x; x < b.x + b.width; ++x) {
        for (std::size_t c = 0; c < 3; ++c) {
          grid.at(c, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) = tint[c];
        }
      }
    }
  }
  return bilinear_resize(grid, o.image_size, o.image_size);
}

Tensor make_group_features(const PlantedFixture& fixture, const PlantedOptions& o, std::size_t channels,
                           std::uint64_t seed) {
  const std::size_t groups = fixture.blobs.size();
  if (channels < groups) {
    throw Error(ErrorCode::InvalidArgument, "need at least one channel per group");
  }
  Rng rng(splitmix64(seed));
  Tensor t({channels, o.grid, o.grid});
  const std::size_t per_group = channels / groups;
  for (auto& v : t.data()) v = static_cast<float>(uniform(rng, 0.0, 0.05));
  for (std::size_t g = 0; g < groups; ++g) {
    const Box& b = fixture.blobs[g];
    for (std::size_t c = g * per_group; c < (g + 1) * per_group; ++c) {
      for (int y = b.y; y < b.y + b.height; ++y) {
        for (int x = b.x; x < b.x + b.width; ++x) {
          t.at(c, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) =
              static_cast<float>(uniform(rng, 1.0, 2.0));
        }
      }
    }
  }
  return t;
}

Tensor make_class_blocks(std::size_t label, std::size_t blocks, std::size_t block_len, std::uint64_t seed) {
  Rng rng(splitmix64(seed));
  Tensor t({blocks, block_len});
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t i = 0; i < block_len; ++i) {
      // Each class owns a stripe of every block; the rest is shared noise.
      const bool own = (i % 8) == (label % 8);
      t.at(0, b, i) = static_cast<float>(uniform(rng, 0.0, 0.5) + (own ? 1.0 : 0.0));
    }
  }
  return t;
}

}  // namespace upm
