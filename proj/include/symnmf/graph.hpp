#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "symnmf/dense.hpp"

namespace symnmf {

inline constexpr double kScaleFloor = 1e-12;
inline constexpr Index kDefaultNeighbors = 7;

template <typename Scalar>
struct PointSet {
  Matrix<Scalar> points;  // m samples x d features
  Index neighbor_count = kDefaultNeighbors;
};

namespace detail {

template <typename Scalar>
void check_points(const PointSet<Scalar>& data) {
  const Index m = data.points.rows();
  if (m < 2) throw DimensionError("build_similarity needs at least two points");
  if (data.points.cols() < 1) throw DimensionError("points have no features");
  if (data.neighbor_count < 1 || data.neighbor_count >= m) {
    throw DomainError("neighbor_count must lie in [1, m - 1]");
  }
  require_finite(data.points, "points");
}

template <typename Scalar>
Matrix<Scalar> squared_distances(const Matrix<Scalar>& p) {
  const Index m = p.rows();
  Matrix<Scalar> d(m, m);
  for (Index i = 0; i < m; ++i) {
    d(i, i) = 0;
    for (Index j = i + 1; j < m; ++j) {
      const Scalar s = (p.row(i) - p.row(j)).squaredNorm();
      d(i, j) = s;
      d(j, i) = s;
    }
  }
  return d;
}

}  // namespace detail

// Self-tuning Gaussian affinity on the kNN graph (union of both directions):
// A_ij = exp(-||p_i - p_j||^2 / (sigma_i sigma_j)) with sigma_i the distance from
// p_i to its k-th nearest neighbour, floored at kScaleFloor. A_ii = 0.
template <typename Scalar>
Matrix<Scalar> self_tuning_affinity(const PointSet<Scalar>& data) {
  detail::check_points(data);
  const Index m = data.points.rows();
  const Index k = data.neighbor_count;
  const Matrix<Scalar> dist = detail::squared_distances(data.points);

  std::vector<Scalar> sigma(m);
  std::vector<std::vector<char>> neighbor(m, std::vector<char>(m, 0));
  std::vector<Index> order;
  for (Index i = 0; i < m; ++i) {
    order.resize(m);
    std::iota(order.begin(), order.end(), Index(0));
    order.erase(order.begin() + i);
    // Ties broken by index so the graph is deterministic.
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Index a, Index b) {
      return dist(i, a) < dist(i, b) || (dist(i, a) == dist(i, b) && a < b);
    });
    for (Index t = 0; t < k; ++t) neighbor[i][order[t]] = 1;
    sigma[i] = std::max<Scalar>(std::sqrt(dist(i, order[k - 1])), Scalar(kScaleFloor));
  }

  Matrix<Scalar> a = Matrix<Scalar>::Zero(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) {
      if (!neighbor[i][j] && !neighbor[j][i]) continue;
      const Scalar w = std::exp(-dist(i, j) / (sigma[i] * sigma[j]));
      a(i, j) = w;
      a(j, i) = w;
    }
  }
  return a;
}

// X = D^{-1/2} A D^{-1/2}, D = diag(row sums of A). Rows with zero degree stay zero.
template <typename Scalar>
Matrix<Scalar> normalize_symmetric(const Matrix<Scalar>& a) {
  const Index m = a.rows();
  Vector<Scalar> inv_sqrt(m);
  for (Index i = 0; i < m; ++i) {
    const Scalar d = a.row(i).sum();
    inv_sqrt(i) = d > 0 ? Scalar(1) / std::sqrt(d) : Scalar(0);
  }
  Matrix<Scalar> x = Matrix<Scalar>::Zero(m, m);
  for (Index i = 0; i < m; ++i) {
    x(i, i) = inv_sqrt(i) * a(i, i) * inv_sqrt(i);
    for (Index j = i + 1; j < m; ++j) {
      const Scalar w = inv_sqrt(i) * a(i, j) * inv_sqrt(j);
      x(i, j) = w;
      x(j, i) = w;
    }
  }
  return x;
}

// Symmetric nonnegative similarity matrix for clustering; exactly symmetric by construction.
template <typename Scalar>
Matrix<Scalar> build_similarity(const PointSet<Scalar>& data) {
  return normalize_symmetric(self_tuning_affinity(data));
}

}  // namespace symnmf
