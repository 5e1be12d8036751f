#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <thread>
#include <vector>

#include "symnmf/dense.hpp"

namespace symnmf {

// min_{u >= 0} 1/2 u^T Q u - c^T u with Q = V^T V + lambda I symmetric positive definite.
template <typename Scalar>
struct NnlsSubproblem {
  Matrix<Scalar> gram;
  Vector<Scalar> rhs;
};

struct NnlsOptions {
  // Full-block exchanges tolerated without reducing the infeasible count
  // before switching to single-variable exchange.
  int full_exchange_retries = 3;
  // Pivot budget as a multiple of r; past it the projected-gradient fallback runs.
  std::size_t pivot_factor = 10;
  std::size_t fallback_max_iterations = 200000;
};

struct NnlsReport {
  std::size_t pivots = 0;
  bool used_fallback = false;
};

namespace detail {

template <typename Scalar>
Scalar nnls_dual_tolerance(const Vector<Scalar>& rhs) {
  const Scalar scale = rhs.size() ? std::max<Scalar>(1, rhs.cwiseAbs().maxCoeff()) : Scalar(1);
  return Scalar(1e-12) * scale;
}

// Solves Q_FF x_F = c_F with x_G = 0 for the passive set F.
template <typename Scalar>
Vector<Scalar> solve_passive(const Matrix<Scalar>& q, const Vector<Scalar>& c,
                             const std::vector<Index>& passive) {
  Vector<Scalar> x = Vector<Scalar>::Zero(c.size());
  if (passive.empty()) return x;
  const Matrix<Scalar> qff = q(passive, passive);
  const Vector<Scalar> cf = c(passive);
  const Vector<Scalar> xf = qff.llt().solve(cf);
  x(passive) = xf;
  return x;
}

template <typename Scalar>
bool is_optimal(const Matrix<Scalar>& q, const Vector<Scalar>& c, const Vector<Scalar>& x, Scalar tol) {
  const Vector<Scalar> y = q * x - c;
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i) < 0) return false;
    if (x(i) == 0 && y(i) < -tol) return false;
  }
  return true;
}

}  // namespace detail

// Projected gradient with step 1/sigma_1(Q), polished by an exact solve on the
// recovered support. Linear convergence follows from strong convexity.
template <typename Scalar>
Vector<Scalar> projected_gradient_nnls(const NnlsSubproblem<Scalar>& sub, std::size_t max_iterations = 200000,
                                       Scalar tol = Scalar(1e-15)) {
  const auto& q = sub.gram;
  const auto& c = sub.rhs;
  const Scalar step = Scalar(1) / largest_eigenvalue(q);
  Vector<Scalar> x = Vector<Scalar>::Zero(c.size());
  for (std::size_t it = 0; it < max_iterations; ++it) {
    const Vector<Scalar> next = (x - step * (q * x - c)).cwiseMax(Scalar(0));
    const Scalar moved = (next - x).norm();
    x = next;
    if (moved <= tol * std::max<Scalar>(1, x.norm())) break;
  }
  std::vector<Index> support;
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i) > 0) support.push_back(i);
  }
  const Vector<Scalar> polished = detail::solve_passive(q, c, support);
  if (detail::is_optimal(q, c, polished, detail::nnls_dual_tolerance(c))) return polished;
  return x;
}

// Block principal pivoting. `full_llt`, when given, is a factorization of
// sub.gram shared across calls with the same gram.
template <typename Scalar>
Vector<Scalar> bpp_solve(const NnlsSubproblem<Scalar>& sub, const Eigen::LLT<Matrix<Scalar>>* full_llt,
                         const NnlsOptions& options = {}, NnlsReport* report = nullptr) {
  const auto& q = sub.gram;
  const auto& c = sub.rhs;
  const Index r = c.size();
  if (q.rows() != r || q.cols() != r) {
    throw DimensionError("gram must be " + std::to_string(r) + "x" + std::to_string(r));
  }
  if (!q.allFinite() || !c.allFinite()) {
    throw DomainError("NNLS subproblem has non-finite entries");
  }
  NnlsReport local;
  NnlsReport& rep = report ? *report : local;
  rep = {};

  if (r == 0 || (c.array() <= 0).all()) {
    return Vector<Scalar>::Zero(r);
  }

  // Unconstrained minimizer; if feasible it is the answer.
  Vector<Scalar> x;
  if (full_llt) {
    x = full_llt->solve(c);
  } else {
    const Eigen::LLT<Matrix<Scalar>> llt(q);
    if (llt.info() != Eigen::Success) throw DomainError("NNLS gram is not positive definite");
    x = llt.solve(c);
  }
  if ((x.array() >= 0).all()) return x;

  const Scalar dual_tol = detail::nnls_dual_tolerance(c);
  std::vector<char> in_passive(r);
  for (Index i = 0; i < r; ++i) in_passive[i] = x(i) > 0;

  std::size_t best_infeasible = static_cast<std::size_t>(r) + 1;
  int retries = options.full_exchange_retries;
  const std::size_t max_pivots = options.pivot_factor * static_cast<std::size_t>(r);
  std::vector<Index> passive;
  std::vector<Index> infeasible;

  for (std::size_t pivot = 0; pivot <= max_pivots; ++pivot) {
    passive.clear();
    for (Index i = 0; i < r; ++i) {
      if (in_passive[i]) passive.push_back(i);
    }
    x = detail::solve_passive(q, c, passive);
    const Vector<Scalar> y = q * x - c;

    infeasible.clear();
    for (Index i = 0; i < r; ++i) {
      if (in_passive[i] ? x(i) < 0 : y(i) < -dual_tol) infeasible.push_back(i);
    }
    if (infeasible.empty()) {
      rep.pivots = pivot;
      return x;
    }
    if (pivot == max_pivots) break;

    if (infeasible.size() < best_infeasible) {
      best_infeasible = infeasible.size();
      retries = options.full_exchange_retries;
      for (Index i : infeasible) in_passive[i] = !in_passive[i];
    } else if (retries > 0) {
      --retries;
      for (Index i : infeasible) in_passive[i] = !in_passive[i];
    } else {
      const Index i = infeasible.back();
      in_passive[i] = !in_passive[i];
    }
  }

  rep.pivots = max_pivots;
  rep.used_fallback = true;
  return projected_gradient_nnls(sub, options.fallback_max_iterations);
}

template <typename Scalar>
Vector<Scalar> bpp_solve(const NnlsSubproblem<Scalar>& sub) {
  return bpp_solve<Scalar>(sub, nullptr);
}

// argmin_{U >= 0} 1/2 ||X - U V^T||_F^2 + lambda/2 ||U - V||_F^2, solved as n
// independent row problems with gram V^T V + lambda I and rhs V^T x_i + lambda v_i.
// Rows are written to disjoint locations, so `threads > 1` gives the same result.
template <typename DX, typename DV>
Matrix<typename DX::Scalar> solve_rows(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DV>& v,
                                       typename DX::Scalar lambda, unsigned threads = 1,
                                       std::size_t* fallback_count = nullptr) {
  using Scalar = typename DX::Scalar;
  if (x.rows() != x.cols()) throw DimensionError("X must be square");
  if (v.rows() != x.rows()) throw DimensionError("V rows must match X");
  if (!(lambda > 0)) throw DomainError("lambda must be positive");
  const Index n = x.rows();
  const Index r = v.cols();

  NnlsSubproblem<Scalar> shared;
  shared.gram = v.transpose() * v;
  shared.gram.diagonal().array() += lambda;
  const Eigen::LLT<Matrix<Scalar>> llt(shared.gram);
  if (llt.info() != Eigen::Success) throw DomainError("V^T V + lambda I is not positive definite");
  const Matrix<Scalar> rhs = x * v + lambda * v;

  Matrix<Scalar> u(n, r);
  std::vector<std::size_t> fallbacks(std::max(1u, threads), 0);

  auto work = [&](unsigned worker, Index begin, Index end) {
    NnlsSubproblem<Scalar> sub{shared.gram, Vector<Scalar>(r)};
    NnlsReport rep;
    for (Index i = begin; i < end; ++i) {
      sub.rhs = rhs.row(i).transpose();
      u.row(i) = bpp_solve(sub, &llt, NnlsOptions{}, &rep).transpose();
      fallbacks[worker] += rep.used_fallback;
    }
  };

  if (threads <= 1 || n < 2) {
    work(0, 0, n);
  } else {
    const unsigned count = std::min<unsigned>(threads, static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    const Index chunk = (n + count - 1) / count;
    for (unsigned t = 0; t < count; ++t) {
      const Index begin = t * chunk;
      const Index end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(work, t, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  if (fallback_count) {
    *fallback_count = 0;
    for (auto f : fallbacks) *fallback_count += f;
  }
  return u;
}

}  // namespace symnmf
