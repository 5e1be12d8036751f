#pragma once

// Reference computations for the unit and acceptance suites. Each one follows
// a different route from the library code it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "symnmf/dense.hpp"

namespace symnmf::oracle {

// Cyclic Jacobi rotations; returns eigenvalues in ascending order.
inline std::vector<double> jacobi_eigenvalues(DenseMatrix a) {
  const Index n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1);
        const double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (Index i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

inline double jacobi_spectral_norm(const DenseMatrix& a) {
  const DenseMatrix gram = a.transpose() * a;
  return std::sqrt(std::max(0.0, jacobi_eigenvalues(gram).back()));
}

// Minimizes 1/2 x^T Q x - c^T x over x >= 0 by trying every active set.
inline DenseVector enumerate_nnls(const DenseMatrix& q, const DenseVector& c) {
  const Index r = c.size();
  DenseVector best = DenseVector::Zero(r);
  double best_value = 0;
  for (unsigned mask = 1; mask < (1u << r); ++mask) {
    std::vector<Index> free;
    for (Index i = 0; i < r; ++i)
      if (mask & (1u << i)) free.push_back(i);
    const DenseMatrix qff = q(free, free);
    const DenseVector xf = qff.fullPivLu().solve(DenseVector(c(free)));
    if ((xf.array() < 0).any()) continue;
    DenseVector x = DenseVector::Zero(r);
    x(free) = xf;
    const double value = 0.5 * x.dot(q * x) - c.dot(x);
    if (value < best_value) {
      best_value = value;
      best = x;
    }
  }
  return best;
}

// Central differences of a scalar function of a matrix.
inline DenseMatrix central_difference(const std::function<double(const DenseMatrix&)>& f, const DenseMatrix& at,
                                      double h = 1e-6) {
  DenseMatrix g(at.rows(), at.cols());
  for (Index i = 0; i < at.rows(); ++i) {
    for (Index j = 0; j < at.cols(); ++j) {
      DenseMatrix plus = at, minus = at;
      plus(i, j) += h;
      minus(i, j) -= h;
      g(i, j) = (f(plus) - f(minus)) / (2 * h);
    }
  }
  return g;
}

// Checks U >= 0, G >= 0 and U .* G = 0 entrywise with tolerance tau.
inline bool entrywise_kkt(const DenseMatrix& u, const DenseMatrix& grad, double tau) {
  for (Index i = 0; i < u.rows(); ++i) {
    for (Index j = 0; j < u.cols(); ++j) {
      if (u(i, j) < -tau) return false;
      if (u(i, j) > tau) {
        if (std::abs(grad(i, j)) > tau) return false;
      } else if (grad(i, j) < -tau) {
        return false;
      }
    }
  }
  return true;
}

// Best agreement over every relabeling of the predicted labels 0..k-1.
inline double brute_force_accuracy(const std::vector<int>& pred, const std::vector<int>& truth, int k) {
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += perm[pred[i]] == truth[i];
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(pred.size());
}

inline DenseMatrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0, 1);
  DenseMatrix a(rows, cols);
  for (Index i = 0; i < a.size(); ++i) a.data()[i] = n(rng);
  return a;
}

inline DenseMatrix uniform_matrix(Index rows, Index cols, std::mt19937_64& rng, double lo = 0, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  DenseMatrix a(rows, cols);
  for (Index i = 0; i < a.size(); ++i) a.data()[i] = u(rng);
  return a;
}

inline DenseMatrix random_symmetric(Index n, std::mt19937_64& rng) {
  const DenseMatrix g = gaussian_matrix(n, n, rng);
  return (g + g.transpose()) / 2;
}

inline DenseMatrix random_spd(Index n, std::mt19937_64& rng, double shift = 0.1) {
  const DenseMatrix c = gaussian_matrix(n, n, rng);
  DenseMatrix q = c * c.transpose();
  q.diagonal().array() += shift;
  return q;
}

// m points split across `centers`, each coordinate N(center, 1).
struct Blobs {
  DenseMatrix points;
  std::vector<int> labels;
};

inline Blobs gaussian_blobs(const DenseMatrix& centers, Index per_blob, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0, 1);
  Blobs b;
  b.points.resize(centers.rows() * per_blob, centers.cols());
  for (Index c = 0; c < centers.rows(); ++c) {
    for (Index i = 0; i < per_blob; ++i) {
      const Index row = c * per_blob + i;
      for (Index d = 0; d < centers.cols(); ++d) b.points(row, d) = centers(c, d) + n(rng);
      b.labels.push_back(static_cast<int>(c));
    }
  }
  return b;
}

}  // namespace symnmf::oracle
