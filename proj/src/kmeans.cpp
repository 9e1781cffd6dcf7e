#include "upm/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "upm/error.hpp"
#include "upm/random.hpp"

namespace upm {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

Matrix seed_plus_plus(const Matrix& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.rows();
  Matrix centers(k, points.cols());
  std::size_t first = uniform_index(rng, n);
  std::copy(points.row(first).begin(), points.row(first).end(), centers.row(0).begin());

  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_distance(points.row(i), centers.row(0));

  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d : nearest) total += d;
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += nearest[i];
        if (acc > target && nearest[i] > 0.0) {
          pick = i;
          break;
        }
      }
      // Guard against rounding landing on an already-chosen point.
      while (nearest[pick] == 0.0 && pick > 0) --pick;
    } else {
      pick = uniform_index(rng, n);
    }
    std::copy(points.row(pick).begin(), points.row(pick).end(), centers.row(c).begin());
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(points.row(i), centers.row(c)));
    }
  }
  return centers;
}

// Assigns every point to its nearest center, keeping the current label on
// exact ties. Returns the resulting inertia.
double assign(const Matrix& points, const Matrix& centers, std::vector<std::size_t>& labels) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    std::size_t best = labels[i];
    double best_d = best < centers.rows() ? squared_distance(points.row(i), centers.row(best))
                                          : std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.rows(); ++c) {
      const double d = squared_distance(points.row(i), centers.row(c));
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    labels[i] = best;
    inertia += best_d;
  }
  return inertia;
}

double total_inertia(const Matrix& points, const Matrix& centers, const std::vector<std::size_t>& labels) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    inertia += squared_distance(points.row(i), centers.row(labels[i]));
  }
  return inertia;
}

}  // namespace

KMeansResult kmeans_cluster(const Matrix& points, const KMeansOptions& options) {
  const std::size_t n = points.rows(), dim = points.cols(), k = options.k;
  if (k == 0 || n < k) {
    throw Error(ErrorCode::TooFewPoints,
                "k-means needs 1 <= k <= points, got k=" + std::to_string(k) + " with " +
                    std::to_string(n) + " points");
  }
  Rng rng(splitmix64(options.seed));

  KMeansResult result;
  result.centers = seed_plus_plus(points, k, rng);
  result.labels.assign(n, std::numeric_limits<std::size_t>::max());

  std::vector<double> sums(k * dim);
  std::vector<std::size_t> sizes(k);
  while (true) {
    result.inertia_trace.push_back(assign(points, result.centers, result.labels));
    if (result.iterations >= options.max_iterations) break;
    ++result.iterations;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = points.row(i);
      const std::size_t l = result.labels[i];
      for (std::size_t d = 0; d < dim; ++d) sums[l * dim + d] += p[d];
      ++sizes[l];
    }

    Matrix next(k, dim);
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) continue;
      for (std::size_t d = 0; d < dim; ++d) {
        next(c, d) = sums[c * dim + d] / static_cast<double>(sizes[c]);
      }
    }
    // An emptied cluster takes over the point worst served by its current center.
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t worst = 0;
      double worst_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[result.labels[i]] <= 1) continue;
        const double d = squared_distance(points.row(i), next.row(result.labels[i]));
        if (d > worst_d) {
          worst_d = d;
          worst = i;
        }
      }
      --sizes[result.labels[worst]];
      result.labels[worst] = c;
      sizes[c] = 1;
      std::copy(points.row(worst).begin(), points.row(worst).end(), next.row(c).begin());
    }

    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      shift = std::max(shift, std::sqrt(squared_distance(next.row(c), result.centers.row(c))));
    }
    result.centers = std::move(next);
    if (shift < options.tolerance) {
      result.inertia_trace.push_back(assign(points, result.centers, result.labels));
      break;
    }
  }
  result.inertia = total_inertia(points, result.centers, result.labels);
  return result;
}

KMeansResult kmeans_best_of(const Matrix& points, const KMeansOptions& options, std::size_t restarts) {
  KMeansResult best;
  bool have = false;
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    KMeansOptions run = options;
    run.seed = splitmix64(options.seed ^ (0x5851f42d4c957f2dULL * (r + 1)));
    KMeansResult res = kmeans_cluster(points, run);
    if (!have || res.inertia < best.inertia) {
      best = std::move(res);
      have = true;
    }
  }
  return best;
}

}  // namespace upm
