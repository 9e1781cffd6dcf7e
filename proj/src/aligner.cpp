#include "upm/aligner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "upm/eigen.hpp"
#include "upm/kmeans.hpp"
#include "upm/ops.hpp"

namespace upm {

namespace {

constexpr std::size_t kSpectralRestarts = 5;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<Descriptor> normalized_rows(const PartDescriptorTable& table) {
  std::vector<Descriptor> out;
  out.reserve(table.rows.size());
  const std::size_t len = table.rows.empty() ? 0 : table.rows[0].descriptor.size();
  for (const auto& row : table.rows) {
    if (row.descriptor.size() != len) {
      throw Error(ErrorCode::LengthMismatch, "descriptor lengths differ within the table");
    }
    out.push_back(l2_normalize(row.descriptor));
  }
  return out;
}

}  // namespace

std::vector<std::vector<std::size_t>> AlignmentResult::groups() const {
  std::vector<std::vector<std::size_t>> out(group_sizes.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[labels[i]].push_back(i);
  return out;
}

BinaryMask downsample_mask(const BinaryMask& mask, std::size_t h, std::size_t w) {
  if (h == 0 || w == 0) throw Error(ErrorCode::ZeroExtent, "mask target extent is zero");
  if (mask.height == h && mask.width == w) return mask;
  BinaryMask out(h, w);
  const double sy = static_cast<double>(mask.height) / static_cast<double>(h);
  const double sx = static_cast<double>(mask.width) / static_cast<double>(w);
  for (std::size_t y = 0; y < h; ++y) {
    const auto y0 = static_cast<std::size_t>(std::floor(y * sy));
    const auto y1 = std::max(y0 + 1, std::min(mask.height, static_cast<std::size_t>(std::ceil((y + 1) * sy))));
    const auto cy = std::min(mask.height - 1, static_cast<std::size_t>((y + 0.5) * sy));
    for (std::size_t x = 0; x < w; ++x) {
      const auto x0 = static_cast<std::size_t>(std::floor(x * sx));
      const auto x1 = std::max(x0 + 1, std::min(mask.width, static_cast<std::size_t>(std::ceil((x + 1) * sx))));
      const auto cx = std::min(mask.width - 1, static_cast<std::size_t>((x + 0.5) * sx));
      std::size_t set = 0;
      for (std::size_t yy = y0; yy < y1; ++yy) {
        for (std::size_t xx = x0; xx < x1; ++xx) set += mask.at(yy, xx);
      }
      const std::size_t area = (y1 - y0) * (x1 - x0);
      out.at(y, x) = (2 * set >= area || mask.at(cy, cx)) ? 1 : 0;
    }
  }
  return out;
}

Descriptor part_descriptor(const Tensor& features, const BinaryMask& mask) {
  if (mask.count() == 0) {
    throw Error(ErrorCode::EmptyMask, "part mask is empty at feature resolution");
  }
  return global_average_pool(masked_multiply(features, mask));
}

Matrix cosine_affinity(const PartDescriptorTable& table) {
  const auto unit = normalized_rows(table);
  const std::size_t n = unit.size();
  Matrix w(n, n);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      const double c = std::max(0.0, dot(unit[p].values, unit[q].values));
      w(p, q) = w(q, p) = c;
    }
  }
  return w;
}

Matrix normalized_laplacian(const Matrix& affinity) {
  const std::size_t n = affinity.rows();
  std::vector<double> inv_sqrt(n);
  for (std::size_t p = 0; p < n; ++p) {
    double degree = 0.0;
    for (double v : affinity.row(p)) degree += v;
    if (!(degree > 0.0)) {
      throw Error(ErrorCode::DegenerateAffinity, "row " + std::to_string(p) + " has zero degree");
    }
    inv_sqrt[p] = 1.0 / std::sqrt(degree);
  }
  Matrix l(n, n);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      l(p, q) = (p == q ? 1.0 : 0.0) - inv_sqrt[p] * affinity(p, q) * inv_sqrt[q];
    }
  }
  return l;
}

AlignmentResult spectral_cluster_affinity(const Matrix& affinity, std::size_t k, std::uint64_t seed) {
  const std::size_t n = affinity.rows();
  if (k == 0 || n < k) {
    throw Error(ErrorCode::TooFewRows,
                std::to_string(n) + " rows cannot form " + std::to_string(k) + " groups");
  }
  AlignmentResult result;
  if (k == 1) {
    result.labels.assign(n, 0);
    result.group_sizes = {n};
    return result;
  }

  const auto eig = sym_eigen(normalized_laplacian(affinity));
  Matrix embedding(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      embedding(i, j) = eig.vectors(i, j);
      norm += embedding(i, j) * embedding(i, j);
    }
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (std::size_t j = 0; j < k; ++j) embedding(i, j) /= norm;
    }
  }

  KMeansOptions opts;
  opts.k = k;
  opts.seed = seed;
  const auto km = kmeans_best_of(embedding, opts, kSpectralRestarts);
  result.labels = km.labels;
  result.group_sizes.assign(k, 0);
  for (auto l : result.labels) ++result.group_sizes[l];
  return result;
}

AlignmentResult spectral_cluster(const PartDescriptorTable& table, std::size_t k, std::uint64_t seed) {
  if (k == 0 || table.rows.size() < k) {
    throw Error(ErrorCode::TooFewRows, std::to_string(table.rows.size()) + " rows cannot form " +
                                           std::to_string(k) + " groups");
  }
  return spectral_cluster_affinity(cosine_affinity(table), k, seed);
}

SlotAssignment assign_part_slots(const PartDescriptorTable& table, const AlignmentResult& result) {
  if (result.labels.size() != table.rows.size()) {
    throw Error(ErrorCode::LengthMismatch, "alignment labels do not match table rows");
  }
  const std::size_t k = result.group_sizes.size();
  const auto unit = normalized_rows(table);
  const std::size_t dim = unit.empty() ? 0 : unit[0].size();

  SlotAssignment out;
  std::map<std::string, std::size_t> image_index;
  for (const auto& row : table.rows) {
    if (image_index.emplace(row.image_id, out.images.size()).second) out.images.push_back(row.image_id);
  }

  std::vector<std::vector<double>> centroid(k, std::vector<double>(dim, 0.0));
  std::vector<std::map<std::size_t, std::size_t>> votes(k);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto g = result.labels[r];
    for (std::size_t d = 0; d < dim; ++d) centroid[g][d] += unit[r].values[d];
    ++votes[g][table.rows[r].part];
  }
  out.group_slot.assign(k, 0);
  for (std::size_t g = 0; g < k; ++g) {
    std::size_t best = 0, best_count = 0;
    for (const auto& [part, count] : votes[g]) {  // ascending part index, so ties keep the lower
      if (count > best_count) {
        best = part;
        best_count = count;
      }
    }
    out.group_slot[g] = best;
  }

  out.rows.assign(out.images.size(), std::vector<long>(k, -1));
  std::vector<std::vector<double>> best_sim(out.images.size(), std::vector<double>(k, -2.0));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto g = result.labels[r];
    const auto img = image_index.at(table.rows[r].image_id);
    const double sim = dot(unit[r].values, centroid[g]);
    if (sim > best_sim[img][g]) {
      best_sim[img][g] = sim;
      out.rows[img][g] = static_cast<long>(r);
    }
  }
  return out;
}

}  // namespace upm
