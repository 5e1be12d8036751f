#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "symnmf/cluster.hpp"

namespace symnmf {
namespace {

TEST(AssignLabels, Examples) {
  DenseMatrix u(2, 2);
  u << 0.1, 0.9, 0.5, 0.5;
  EXPECT_EQ(assign_labels(u), (std::vector<int>{1, 0}));
  EXPECT_EQ(assign_labels(DenseMatrix::Identity(4, 4)), (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(assign_labels(DenseMatrix::Ones(3, 1)), (std::vector<int>{0, 0, 0}));
  EXPECT_THROW(assign_labels(DenseMatrix::Zero(3, 0)), DimensionError);
}

TEST(ClusteringAccuracy, Examples) {
  EXPECT_EQ(clustering_accuracy({0, 0, 1, 1}, {1, 1, 0, 0}), 1.0);
  EXPECT_EQ(clustering_accuracy({0, 0, 0, 0}, {0, 0, 1, 1}), 0.5);
  EXPECT_EQ(clustering_accuracy({0, 1, 2}, {2, 0, 1}), 1.0);
  EXPECT_THROW(clustering_accuracy({0, 1}, {0}), DimensionError);
}

TEST(ClusteringAccuracy, SelfAgreementIsOne) {
  std::mt19937_64 rng(70);
  std::uniform_int_distribution<int> label(0, 9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> x(30);
    for (auto& v : x) v = label(rng);
    EXPECT_EQ(clustering_accuracy(x, x), 1.0);
  }
}

TEST(ClusteringAccuracy, MatchesBruteForceOverPermutations) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    const int r = 1 + trial % 6;
    std::uniform_int_distribution<int> label(0, r - 1);
    std::vector<int> pred(25), truth(25);
    for (auto& v : pred) v = label(rng);
    for (auto& v : truth) v = label(rng);
    EXPECT_DOUBLE_EQ(clustering_accuracy(pred, truth), oracle::brute_force_accuracy(pred, truth, r));
  }
}

TEST(ClusteringAccuracy, InvariantUnderEveryRelabeling) {
  std::mt19937_64 rng(72);
  for (int r = 1; r <= 4; ++r) {
    std::uniform_int_distribution<int> label(0, r - 1);
    std::vector<int> pred(20), truth(20);
    for (auto& v : pred) v = label(rng);
    for (auto& v : truth) v = label(rng);
    const double base = clustering_accuracy(pred, truth);
    std::vector<int> perm(r);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::vector<int> relabeled(pred.size());
      for (std::size_t i = 0; i < pred.size(); ++i) relabeled[i] = perm[pred[i]];
      EXPECT_EQ(clustering_accuracy(relabeled, truth), base);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST(ClusteringAccuracy, SparseAndUnequalAlphabets) {
  EXPECT_EQ(clustering_accuracy({5, 5, 9, 9}, {-1, -1, 3, 3}), 1.0);
  EXPECT_DOUBLE_EQ(clustering_accuracy({0, 1, 2, 3}, {0, 0, 1, 1}), 0.5);
  std::vector<int> wide(100);
  std::iota(wide.begin(), wide.end(), 0);
  EXPECT_THROW(clustering_accuracy(wide, std::vector<int>(100, 0)), DomainError);
}

TEST(MaxWeightAssignment, MatchesBruteForce) {
  std::mt19937_64 rng(73);
  std::uniform_int_distribution<long long> w(-50, 50);
  for (int trial = 0; trial < 200; ++trial) {
    const int r = 1 + trial % 6;
    std::vector<std::vector<long long>> weight(r, std::vector<long long>(r));
    for (auto& row : weight)
      for (auto& v : row) v = w(rng);
    const auto assign = max_weight_assignment(weight);
    long long got = 0;
    std::vector<int> seen(r, 0);
    for (int i = 0; i < r; ++i) {
      got += weight[i][assign[i]];
      ++seen[assign[i]];
    }
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
    std::vector<int> perm(r);
    std::iota(perm.begin(), perm.end(), 0);
    long long best = std::numeric_limits<long long>::min();
    do {
      long long total = 0;
      for (int i = 0; i < r; ++i) total += weight[i][perm[i]];
      best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_EQ(got, best);
  }
}

}  // namespace
}  // namespace symnmf
