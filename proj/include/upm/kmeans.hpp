#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "upm/matrix.hpp"

namespace upm {

struct KMeansOptions {
  std::size_t k = 4;
  std::uint64_t seed = 0;
  std::size_t max_iterations = 300;
  // Stop once no center moves farther than this (Euclidean).
  double tolerance = 1e-6;
};

struct KMeansResult {
  Matrix centers;                   // k × dim
  std::vector<std::size_t> labels;  // one per point
  double inertia = 0.0;             // within-cluster sum of squares
  // Inertia after every assignment step, ending with the returned labels.
  std::vector<double> inertia_trace;
  std::size_t iterations = 0;
};

/// k-means++ seeding followed by Lloyd iterations. Points are the rows of
/// `points`. Deterministic for a given seed. Throws TooFewPoints if k is 0 or
/// exceeds the number of points.
KMeansResult kmeans_cluster(const Matrix& points, const KMeansOptions& options);

/// Runs `restarts` seeded k-means runs (seeds derived from options.seed) and
/// keeps the lowest-inertia result; ties go to the earliest restart.
KMeansResult kmeans_best_of(const Matrix& points, const KMeansOptions& options, std::size_t restarts);

}  // namespace upm
