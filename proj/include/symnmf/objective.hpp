#pragma once

#include <cmath>
#include <string>

#include "symnmf/dense.hpp"

namespace symnmf {

// Entries of a factor down to -kNegativeSlack are accepted as rounding noise.
inline constexpr double kNegativeSlack = 1e-12;

// Band below which a factor entry counts as sitting on the boundary U_ij = 0.
inline constexpr double kBoundaryTolerance = 1e-10;

// min_{U,V >= 0} 1/2 ||X - U V^T||_F^2 + lambda/2 ||U - V||_F^2
template <typename Scalar>
struct PenalizedProblem {
  Matrix<Scalar> X;
  Scalar lambda;
  Index rank;

  Index n() const { return X.rows(); }
};

template <typename Scalar>
struct GradientPair {
  Matrix<Scalar> grad_u;
  Matrix<Scalar> grad_v;
};

template <typename Derived>
PenalizedProblem<typename Derived::Scalar> make_problem(const Eigen::MatrixBase<Derived>& x,
                                                        typename Derived::Scalar lambda, Index rank) {
  require_nonempty(x, "X");
  require_finite(x, "X");
  if (!(lambda > 0) || !std::isfinite(static_cast<double>(lambda))) {
    throw DomainError("lambda must be positive and finite");
  }
  if (rank < 1 || rank > x.rows()) {
    throw DimensionError("rank must lie in [1, n]");
  }
  return {symmetrized(x), lambda, rank};
}

namespace detail {

template <typename Scalar, typename DU>
void check_factor(const PenalizedProblem<Scalar>& p, const Eigen::MatrixBase<DU>& f, const char* name) {
  if (f.rows() != p.n() || f.cols() != p.rank) {
    throw DimensionError(std::string(name) + " must be " + std::to_string(p.n()) + "x" +
                         std::to_string(p.rank) + ", got " + std::to_string(f.rows()) + "x" +
                         std::to_string(f.cols()));
  }
}

template <typename D>
void check_nonnegative(const Eigen::MatrixBase<D>& f, const char* name) {
  if (f.size() > 0 && f.minCoeff() < -kNegativeSlack) {
    throw DomainError(std::string(name) + " has negative entries beyond tolerance");
  }
}

template <typename DX, typename DU>
void check_symmetric_pair(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DU>& u) {
  if (x.rows() != x.cols()) throw DimensionError("X must be square");
  if (u.rows() != x.rows()) {
    throw DimensionError("factor has " + std::to_string(u.rows()) + " rows, X has " +
                         std::to_string(x.rows()));
  }
}

}  // namespace detail

// g(U, V) = 1/2 ||X - U V^T||_F^2 + lambda/2 ||U - V||_F^2. The nonnegativity
// indicators are preconditions, so the value is always finite.
template <typename Scalar, typename DU, typename DV>
Scalar eval_penalized(const PenalizedProblem<Scalar>& p, const Eigen::MatrixBase<DU>& u,
                      const Eigen::MatrixBase<DV>& v) {
  detail::check_factor(p, u, "U");
  detail::check_factor(p, v, "V");
  detail::check_nonnegative(u, "U");
  detail::check_nonnegative(v, "V");
  const Scalar fit = (p.X - u * v.transpose()).squaredNorm();
  const Scalar gap = (u - v).squaredNorm();
  return Scalar(0.5) * fit + Scalar(0.5) * p.lambda * gap;
}

// h(U) = 1/2 ||X - U U^T||_F^2
template <typename DX, typename DU>
typename DX::Scalar eval_symmetric(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DU>& u) {
  using Scalar = typename DX::Scalar;
  detail::check_symmetric_pair(x, u);
  detail::check_nonnegative(u, "U");
  return Scalar(0.5) * (x - u * u.transpose()).squaredNorm();
}

// Gradient of the smooth part g:
//   grad_u = (U V^T - X) V + lambda (U - V)
//   grad_v = (U V^T - X)^T U - lambda (U - V)
template <typename Scalar, typename DU, typename DV>
GradientPair<Scalar> grad_smooth(const PenalizedProblem<Scalar>& p, const Eigen::MatrixBase<DU>& u,
                                 const Eigen::MatrixBase<DV>& v) {
  detail::check_factor(p, u, "U");
  detail::check_factor(p, v, "V");
  const Matrix<Scalar> residual = u * v.transpose() - p.X;
  const Matrix<Scalar> diff = u - v;
  GradientPair<Scalar> g;
  g.grad_u = residual * v + p.lambda * diff;
  g.grad_v = residual.transpose() * u - p.lambda * diff;
  return g;
}

// Entrywise projected gradient: interior entries keep the gradient, boundary
// entries keep only its negative part. Zero exactly at KKT points.
template <typename DF, typename DG>
Matrix<typename DF::Scalar> projected_gradient(const Eigen::MatrixBase<DF>& factor,
                                               const Eigen::MatrixBase<DG>& grad,
                                               double tau = kBoundaryTolerance) {
  using Scalar = typename DF::Scalar;
  Matrix<Scalar> out(factor.rows(), factor.cols());
  for (Index i = 0; i < factor.rows(); ++i) {
    for (Index j = 0; j < factor.cols(); ++j) {
      const Scalar g = grad(i, j);
      out(i, j) = factor(i, j) > Scalar(tau) ? g : std::min(g, Scalar(0));
    }
  }
  return out;
}

template <typename Scalar, typename DU, typename DV>
Scalar kkt_residual(const PenalizedProblem<Scalar>& p, const Eigen::MatrixBase<DU>& u,
                    const Eigen::MatrixBase<DV>& v, double tau = kBoundaryTolerance) {
  detail::check_nonnegative(u, "U");
  detail::check_nonnegative(v, "V");
  const auto g = grad_smooth(p, u, v);
  const Scalar ru = projected_gradient(u, g.grad_u, tau).squaredNorm();
  const Scalar rv = projected_gradient(v, g.grad_v, tau).squaredNorm();
  return std::sqrt(ru + rv);
}

// grad h(U) = 2 (U U^T - X) U for symmetric X.
template <typename DX, typename DU>
Matrix<typename DX::Scalar> symmetric_gradient(const Eigen::MatrixBase<DX>& x,
                                               const Eigen::MatrixBase<DU>& u) {
  detail::check_symmetric_pair(x, u);
  using Scalar = typename DX::Scalar;
  const Matrix<Scalar> residual = u * u.transpose() - x;
  return Scalar(2) * (residual * u);
}

// Projected-gradient norm of h at U; the symmetric-NMF criticality measure.
template <typename DX, typename DU>
typename DX::Scalar symmetric_kkt_residual(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DU>& u,
                                           double tau = kBoundaryTolerance) {
  detail::check_nonnegative(u, "U");
  return projected_gradient(u, symmetric_gradient(x, u), tau).norm();
}

// E = ||X - U U^T||_F^2 / ||X||_F^2
template <typename DX, typename DU>
typename DX::Scalar fitting_error(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DU>& u) {
  detail::check_symmetric_pair(x, u);
  const auto denom = x.squaredNorm();
  if (!(denom > 0)) {
    throw DomainError("fitting error is undefined for X = 0");
  }
  return (x - u * u.transpose()).squaredNorm() / denom;
}

// 1/2 (||X||_2 + ||X - U0 U0^T||_F - sigma_n(X)). Any lambda strictly above this
// value makes every limit point of a descending run started at V0 = U0 symmetric.
template <typename DX, typename DU>
typename DX::Scalar lambda_threshold(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DU>& u0) {
  using Scalar = typename DX::Scalar;
  detail::check_symmetric_pair(x, u0);
  const Scalar fit = (x - u0 * u0.transpose()).norm();
  return Scalar(0.5) * (spectral_norm(x) + fit - smallest_eigenvalue(x));
}

// B0 = (1/lambda + 2 sqrt(r)) ||X - U0 U0^T||_F^2 + 2 sqrt(r) ||X||_F bounds
// ||U_k||_F^2 + ||V_k||_F^2 along any descending run started at V0 = U0.
template <typename DX, typename DU>
typename DX::Scalar iterate_bound_b0(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DU>& u0,
                                     typename DX::Scalar lambda) {
  using Scalar = typename DX::Scalar;
  if (!(lambda > 0)) throw DomainError("lambda must be positive");
  detail::check_symmetric_pair(x, u0);
  const Scalar root_r = std::sqrt(static_cast<Scalar>(u0.cols()));
  const Scalar fit_sq = (x - u0 * u0.transpose()).squaredNorm();
  return (Scalar(1) / lambda + 2 * root_r) * fit_sq + 2 * root_r * x.norm();
}

// Lipschitz constant 2B + lambda + ||X||_F of grad g on the ball ||U||^2 + ||V||^2 <= B.
template <typename DX>
typename DX::Scalar lipschitz_bound(typename DX::Scalar b, typename DX::Scalar lambda,
                                    const Eigen::MatrixBase<DX>& x) {
  if (b < 0) throw DomainError("B must be nonnegative");
  if (!(lambda > 0)) throw DomainError("lambda must be positive");
  return 2 * b + lambda + x.norm();
}

// Lipschitz constant of grad h on the sublevel set {h <= h(U0)}. On that set
// ||U||_F^2 <= sqrt(r) ||U U^T||_F <= sqrt(r) (||X||_F + ||X - U0 U0^T||_F) =: B,
// and ||Hess h|| <= 6B + 2||X||_F.
template <typename DX, typename DU>
typename DX::Scalar symmetric_lipschitz_bound(const Eigen::MatrixBase<DX>& x,
                                              const Eigen::MatrixBase<DU>& u0) {
  using Scalar = typename DX::Scalar;
  detail::check_symmetric_pair(x, u0);
  const Scalar root_r = std::sqrt(static_cast<Scalar>(u0.cols()));
  const Scalar b = root_r * (x.norm() + (x - u0 * u0.transpose()).norm());
  return 6 * b + 2 * x.norm();
}

}  // namespace symnmf
