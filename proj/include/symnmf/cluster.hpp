#pragma once

#include <optional>
#include <vector>

#include "symnmf/dense.hpp"

namespace symnmf {

struct ClusterResult {
  std::vector<int> labels;
  std::optional<double> accuracy;
};

// Largest label alphabet accepted by clustering_accuracy.
inline constexpr std::size_t kMaxLabelAlphabet = 64;

// label_i = argmax_j U_ij, ties resolved to the lowest column.
template <typename Derived>
std::vector<int> assign_labels(const Eigen::MatrixBase<Derived>& u) {
  if (u.cols() < 1) throw DimensionError("assign_labels needs at least one column");
  std::vector<int> labels(static_cast<std::size_t>(u.rows()));
  for (Index i = 0; i < u.rows(); ++i) {
    Index best = 0;
    for (Index j = 1; j < u.cols(); ++j) {
      if (u(i, j) > u(i, best)) best = j;
    }
    labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return labels;
}

// Maximum-weight perfect matching on a square weight matrix (Hungarian method).
// Returns assignment[row] = column.
std::vector<int> max_weight_assignment(const std::vector<std::vector<long long>>& weight);

// Fraction of points whose predicted label maps to the true label under the
// best one-to-one relabeling of predicted clusters.
double clustering_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

}  // namespace symnmf
