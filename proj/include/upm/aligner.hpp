#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "upm/matrix.hpp"
#include "upm/tensor.hpp"

namespace upm {

struct PartDescriptorRow {
  std::string image_id;
  std::size_t part = 0;  // part index within its image
  Descriptor descriptor;
};

/// One descriptor per (image, part) pair, rows ordered by image then part.
struct PartDescriptorTable {
  std::vector<PartDescriptorRow> rows;
  std::size_t feature_channels = 0;
  std::size_t feature_height = 0;
  std::size_t feature_width = 0;
};

struct AlignmentResult {
  std::vector<std::size_t> labels;       // group id per row
  std::vector<std::size_t> group_sizes;  // k entries

  /// Row indices of every group, ascending.
  std::vector<std::vector<std::size_t>> groups() const;
};

/// Maps each group to a part slot and picks one row per (image, group).
struct SlotAssignment {
  std::vector<std::size_t> group_slot;  // majority original part index per group
  std::vector<std::string> images;      // first-appearance order
  // rows[image][group] = chosen row index, or -1 when the image has no part in that group.
  std::vector<std::vector<long>> rows;
};

/// Reduces an image-resolution mask to h × w: a cell is set when at least
/// half of the image pixels it covers are set, or when the pixel nearest its
/// centre is set.
BinaryMask downsample_mask(const BinaryMask& mask, std::size_t h, std::size_t w);

/// GAP of the masked features (full-plane denominator). `mask` must already
/// be at feature resolution. Throws EmptyMask.
Descriptor part_descriptor(const Tensor& features, const BinaryMask& mask);

/// W_pq = max(0, cos(d_p, d_q)) for p ≠ q, zero diagonal.
Matrix cosine_affinity(const PartDescriptorTable& table);

/// L = I − D^{-1/2} W D^{-1/2}. Throws DegenerateAffinity on a zero-degree row.
Matrix normalized_laplacian(const Matrix& affinity);

/// Spectral clustering on a precomputed affinity: embed with the eigenvectors
/// of the k smallest Laplacian eigenvalues, row-normalize, then seeded k-means.
AlignmentResult spectral_cluster_affinity(const Matrix& affinity, std::size_t k, std::uint64_t seed);

/// Spectral clustering of the table's descriptors under cosine affinity.
/// Throws TooFewRows when the table has fewer than k rows.
AlignmentResult spectral_cluster(const PartDescriptorTable& table, std::size_t k, std::uint64_t seed);

/// Group→slot by majority vote of original part indices (ties to the lower
/// index); duplicate rows from one image inside a group are resolved by the
/// highest cosine similarity to the group centroid.
SlotAssignment assign_part_slots(const PartDescriptorTable& table, const AlignmentResult& result);

}  // namespace upm
