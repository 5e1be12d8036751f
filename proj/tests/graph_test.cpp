#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "symnmf/graph.hpp"

namespace symnmf {
namespace {

TEST(SelfTuningAffinity, IdenticalPairUsesScaleFloor) {
  PointSet<double> data{DenseMatrix::Ones(2, 3), 1};
  const DenseMatrix a = self_tuning_affinity(data);
  EXPECT_EQ(a(0, 1), 1.0);
  EXPECT_EQ(a(1, 0), 1.0);
  EXPECT_EQ(a(0, 0), 0.0);
}

TEST(SelfTuningAffinity, MatchesKernelOnNeighborGraph) {
  // Points on a line at 0, 1, 3, 7 with k = 1.
  DenseMatrix p(4, 1);
  p << 0, 1, 3, 7;
  const DenseMatrix a = self_tuning_affinity(PointSet<double>{p, 1});
  // sigma = (1, 1, 2, 4); edges 0-1, 1-2 (from 2), 2-3 (from 3).
  EXPECT_DOUBLE_EQ(a(0, 1), std::exp(-1.0));
  EXPECT_DOUBLE_EQ(a(1, 2), std::exp(-4.0 / 2));
  EXPECT_DOUBLE_EQ(a(2, 3), std::exp(-16.0 / 8));
  EXPECT_EQ(a(0, 2), 0.0);
  EXPECT_EQ(a(0, 3), 0.0);
  EXPECT_EQ(a(1, 3), 0.0);
}

// Independent construction: full sort of each distance row.
DenseMatrix reference_affinity(const DenseMatrix& p, Index k) {
  const Index m = p.rows();
  std::vector<double> sigma(m);
  std::vector<std::vector<Index>> knn(m);
  for (Index i = 0; i < m; ++i) {
    std::vector<std::pair<double, Index>> row;
    for (Index j = 0; j < m; ++j)
      if (j != i) row.emplace_back((p.row(i) - p.row(j)).norm(), j);
    std::sort(row.begin(), row.end());
    for (Index t = 0; t < k; ++t) knn[i].push_back(row[t].second);
    sigma[i] = std::max(row[k - 1].first, 1e-12);
  }
  DenseMatrix a = DenseMatrix::Zero(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j : knn[i]) {
      const double w = std::exp(-(p.row(i) - p.row(j)).squaredNorm() / (sigma[i] * sigma[j]));
      a(i, j) = a(j, i) = w;
    }
  }
  return a;
}

TEST(SelfTuningAffinity, MatchesReferenceConstruction) {
  std::mt19937_64 rng(63);
  for (Index m : {20, 60, 150}) {
    const DenseMatrix p = oracle::gaussian_matrix(m, 3, rng);
    for (Index k : {Index(1), Index(7), m - 1}) {
      const DenseMatrix a = self_tuning_affinity(PointSet<double>{p, k});
      EXPECT_LE((a - reference_affinity(p, k)).cwiseAbs().maxCoeff(), 1e-15) << m << " " << k;
    }
  }
}

TEST(BuildSimilarity, SeparatedBlobsGiveBlockStructure) {
  std::mt19937_64 rng(60);
  DenseMatrix centers(2, 2);
  centers << 0, 0, 100, 0;
  const auto blobs = oracle::gaussian_blobs(centers, 10, rng);
  const DenseMatrix x = build_similarity(PointSet<double>{blobs.points, 5});
  double in_sum = 0, off_max = 0;
  int in_count = 0;
  for (Index i = 0; i < 20; ++i) {
    for (Index j = 0; j < 20; ++j) {
      if (i == j) continue;
      if (blobs.labels[i] == blobs.labels[j]) {
        in_sum += x(i, j);
        ++in_count;
      } else {
        off_max = std::max(off_max, x(i, j));
      }
    }
  }
  EXPECT_LE(off_max, 1e-6 * in_sum / in_count);
}

TEST(BuildSimilarity, SymmetricNonnegativeBounded) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    const Index m = 3 + trial, d = 1 + trial % 4;
    DenseMatrix p = oracle::gaussian_matrix(m, d, rng);
    if (trial % 3 == 0) p.row(1) = p.row(0);
    const Index k = 1 + trial % std::min<Index>(m - 1, 9);
    const DenseMatrix x = build_similarity(PointSet<double>{p, k});
    EXPECT_EQ((x - x.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_GE(x.minCoeff(), 0.0);
    EXPECT_TRUE(x.allFinite());
    EXPECT_LE(x.maxCoeff(), 1 + 1e-12);
  }
}

TEST(BuildSimilarity, PermutationEquivariant) {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 20; ++trial) {
    const Index m = 12;
    const DenseMatrix p = oracle::gaussian_matrix(m, 3, rng);
    std::vector<Index> perm(m);
    std::iota(perm.begin(), perm.end(), Index(0));
    std::shuffle(perm.begin(), perm.end(), rng);
    const DenseMatrix pp = p(perm, Eigen::placeholders::all);
    const DenseMatrix x = build_similarity(PointSet<double>{p, 4});
    const DenseMatrix xp = build_similarity(PointSet<double>{pp, 4});
    const DenseMatrix permuted = x(perm, perm);
    EXPECT_LE((xp - permuted).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(NormalizeSymmetric, IsolatedRowsStayZero) {
  DenseMatrix a = DenseMatrix::Zero(3, 3);
  a(0, 1) = a(1, 0) = 2;
  const DenseMatrix x = normalize_symmetric(a);
  EXPECT_DOUBLE_EQ(x(0, 1), 1.0);
  EXPECT_EQ(x.row(2).squaredNorm(), 0.0);
}

TEST(BuildSimilarity, RejectsBadParameters) {
  EXPECT_THROW(build_similarity(PointSet<double>{DenseMatrix::Ones(1, 2), 1}), DimensionError);
  EXPECT_THROW(build_similarity(PointSet<double>{DenseMatrix::Ones(5, 2), 5}), DomainError);
  EXPECT_THROW(build_similarity(PointSet<double>{DenseMatrix::Ones(5, 2), 0}), DomainError);
  DenseMatrix bad = DenseMatrix::Ones(4, 2);
  bad(0, 0) = std::nan("");
  EXPECT_THROW(build_similarity(PointSet<double>{bad, 2}), DomainError);
}

}  // namespace
}  // namespace symnmf
