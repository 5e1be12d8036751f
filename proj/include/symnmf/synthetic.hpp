#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "symnmf/dense.hpp"

namespace symnmf {

template <typename Scalar>
struct SyntheticInstance {
  Matrix<Scalar> x;
  Matrix<Scalar> u_star;
};

// U* = |N(0, 1)| entrywise, X = U* U*^T (nonnegative, PSD, rank r).
template <typename Scalar = double>
SyntheticInstance<Scalar> synthetic_instance(Index n, Index r, std::uint64_t seed) {
  if (r < 1 || n < r) throw DimensionError("synthetic instance needs n >= r >= 1");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0u};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  SyntheticInstance<Scalar> out;
  out.u_star.resize(n, r);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < r; ++j) out.u_star(i, j) = static_cast<Scalar>(std::abs(normal(rng)));
  }
  out.x = out.u_star * out.u_star.transpose();
  // The product is symmetric up to rounding in the summation order; make it exact.
  out.x = ((out.x + out.x.transpose()) / 2).eval();
  return out;
}

}  // namespace symnmf
