#pragma once

#include <cmath>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "symnmf/errors.hpp"

namespace symnmf {

// Row-major storage throughout: the row-wise NNLS subproblems read rows of X
// and of the factors contiguously.
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using DenseMatrix = Matrix<double>;
using DenseVector = Vector<double>;

using Index = Eigen::Index;

template <typename Scalar>
struct SpectralSummary {
  Scalar spectral_norm;
  Scalar smallest_eigenvalue;
  Scalar frobenius_norm;
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& a) {
  return a.allFinite();
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& a, const char* what) {
  if (!a.allFinite()) {
    throw DomainError(std::string(what) + " contains non-finite entries");
  }
}

template <typename Derived>
void require_nonempty(const Eigen::MatrixBase<Derived>& a, const char* what) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw DimensionError(std::string(what) + " is empty");
  }
}

// Builds a matrix from row-major data, validating the length and finiteness.
template <typename Scalar = double>
Matrix<Scalar> make_matrix(Index rows, Index cols, std::span<const Scalar> data) {
  if (rows <= 0 || cols <= 0) {
    throw DimensionError("matrix dimensions must be positive");
  }
  if (static_cast<Index>(data.size()) != rows * cols) {
    throw DimensionError("data length " + std::to_string(data.size()) + " != " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
  Matrix<Scalar> out = Eigen::Map<const Matrix<Scalar>>(data.data(), rows, cols);
  require_finite(out, "matrix");
  return out;
}

template <typename Derived>
typename Derived::RealScalar frobenius_norm(const Eigen::MatrixBase<Derived>& a) {
  return a.norm();
}

// Largest singular value.
template <typename Derived>
typename Derived::RealScalar spectral_norm(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  require_nonempty(a, "spectral_norm operand");
  require_finite(a, "spectral_norm operand");
  Eigen::BDCSVD<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> svd(a.derived());
  return svd.singularValues()(0);
}

// Relative asymmetry ||S - S^T||_F / ||S||_F (zero for the zero matrix).
template <typename Derived>
typename Derived::RealScalar relative_asymmetry(const Eigen::MatrixBase<Derived>& s) {
  using Real = typename Derived::RealScalar;
  if (s.rows() != s.cols()) {
    throw DimensionError("matrix is not square");
  }
  const Real scale = s.norm();
  if (scale == Real(0)) return Real(0);
  return (s - s.transpose()).norm() / scale;
}

// Returns (S + S^T)/2. Inputs whose relative asymmetry exceeds `tolerance` are
// rejected rather than silently averaged.
template <typename Derived>
Matrix<typename Derived::Scalar> symmetrized(const Eigen::MatrixBase<Derived>& s,
                                             typename Derived::RealScalar tolerance = 1e-12) {
  if (s.rows() != s.cols()) {
    throw DimensionError("expected a square matrix, got " + std::to_string(s.rows()) + "x" +
                         std::to_string(s.cols()));
  }
  if (relative_asymmetry(s) > tolerance) {
    throw DomainError("matrix is not symmetric");
  }
  Matrix<typename Derived::Scalar> out = s;
  out = (out + out.transpose().eval()) / 2;
  return out;
}

template <typename Derived>
Vector<typename Derived::Scalar> symmetric_eigenvalues(const Eigen::MatrixBase<Derived>& s) {
  require_nonempty(s, "eigenvalue operand");
  require_finite(s, "eigenvalue operand");
  const auto sym = symmetrized(s);
  // Tridiagonalization followed by implicit QL; eigenvalues come back ascending.
  Eigen::SelfAdjointEigenSolver<Matrix<typename Derived::Scalar>> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw DomainError("symmetric eigensolver did not converge");
  }
  return solver.eigenvalues();
}

// Algebraically smallest eigenvalue of (S + S^T)/2; negative for indefinite S.
template <typename Derived>
typename Derived::Scalar smallest_eigenvalue(const Eigen::MatrixBase<Derived>& s) {
  return symmetric_eigenvalues(s)(0);
}

template <typename Derived>
typename Derived::Scalar largest_eigenvalue(const Eigen::MatrixBase<Derived>& s) {
  const auto ev = symmetric_eigenvalues(s);
  return ev(ev.size() - 1);
}

template <typename Derived>
SpectralSummary<typename Derived::Scalar> spectral_summary(const Eigen::MatrixBase<Derived>& s) {
  return {spectral_norm(s), smallest_eigenvalue(s), frobenius_norm(s)};
}

}  // namespace symnmf
