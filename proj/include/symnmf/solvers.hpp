#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "symnmf/dense.hpp"
#include "symnmf/nnls.hpp"
#include "symnmf/objective.hpp"

namespace symnmf {

enum class PgdStep { lipschitz, backtracking };

enum class Termination { step_tol, kkt_tol, max_iters, diverged };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::step_tol: return "step_tol";
    case Termination::kkt_tol: return "kkt_tol";
    case Termination::max_iters: return "max_iters";
    case Termination::diverged: return "diverged";
  }
  return "unknown";
}

struct SolverConfig {
  double lambda_multiplier = 1.01;
  std::size_t max_iterations = 5000;
  // Stop when ||W_{k+1} - W_k||_F <= tol_step * max(1, ||W_k||_F), W = (U, V).
  double tol_step = 1e-9;
  // Stop when the projected-gradient (KKT) residual drops to tol_kkt.
  double tol_kkt = 1e-8;
  std::uint64_t seed = 0;
  // User-supplied U0; when empty U0 is drawn i.i.d. uniform(0, 1) from `seed`.
  std::optional<DenseMatrix> initial_factor;
  PgdStep pgd_step = PgdStep::backtracking;
  // Fixed step for unconstrained gradient descent; <= 0 selects 1/L.
  double gd_step = 0.0;
  // Record every trace_stride-th iteration; 0 picks 1 for n <= 2000, else 10.
  std::size_t trace_stride = 0;
  unsigned threads = 1;
  bool record_elapsed = true;
};

struct IterationRecord {
  std::size_t k = 0;
  double f_value = 0;
  double fitting_error = 0;
  double symmetry_gap = 0;
  double step_norm_sq = 0;
  double elapsed_seconds = 0;
};

template <typename Scalar>
struct SolveResult {
  Matrix<Scalar> u_final;
  Matrix<Scalar> v_final;
  std::vector<IterationRecord> trace;
  Termination termination = Termination::max_iters;
  std::size_t iterations = 0;
  Scalar lambda = 0;
  Scalar kkt_residual_final = 0;
  // ||U - V||_F^2
  Scalar symmetry_gap_final = 0;
  // Projected-gradient norm of 1/2 ||X - U U^T||_F^2 at u_final.
  Scalar symmetric_kkt_final = 0;
};

struct DecreaseReport {
  double max_violation = 0;
  std::size_t worst_k = 0;
  bool passed = true;
};

// Called with (k, U_k, V_k) for k = 0 (the initial point) and every iteration after.
template <typename Scalar>
using IterateObserver = std::function<void(std::size_t, const Matrix<Scalar>&, const Matrix<Scalar>&)>;

inline constexpr double kDecreaseSlack = 1e-8;

// Default trace / lambda floor when the threshold degenerates to zero.
inline constexpr double kMinimumLambda = 1e-8;

template <typename Scalar = double>
Matrix<Scalar> uniform_factor(Index n, Index r, std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 1u};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Matrix<Scalar> u(n, r);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < r; ++j) u(i, j) = static_cast<Scalar>(dist(rng));
  }
  return u;
}

template <typename Scalar = double>
Matrix<Scalar> initial_factor(Index n, Index r, const SolverConfig& config) {
  if (config.initial_factor) {
    const auto& u0 = *config.initial_factor;
    if (u0.rows() != n || u0.cols() != r) {
      throw DimensionError("initial factor must be " + std::to_string(n) + "x" + std::to_string(r));
    }
    require_finite(u0, "initial factor");
    if (u0.minCoeff() < 0) throw DomainError("initial factor must be nonnegative");
    return u0.template cast<Scalar>();
  }
  return uniform_factor<Scalar>(n, r, config.seed);
}

// lambda_multiplier * lambda_threshold(X, U0), floored at kMinimumLambda.
template <typename DX, typename DU>
typename DX::Scalar default_lambda(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DU>& u0,
                                   double multiplier) {
  using Scalar = typename DX::Scalar;
  if (!(multiplier > 0)) throw DomainError("lambda multiplier must be positive");
  return std::max<Scalar>(Scalar(multiplier) * lambda_threshold(x, u0), Scalar(kMinimumLambda));
}

// max((Xi v + lambda v) / (||v||^2 + lambda), 0): the exact minimizer over one
// column of 1/2 ||Xi - u v^T||_F^2 + lambda/2 ||u - v||^2 subject to u >= 0.
template <typename DX, typename DV>
Vector<typename DX::Scalar> hals_column_update(const Eigen::MatrixBase<DX>& xi, const Eigen::MatrixBase<DV>& v,
                                               typename DX::Scalar lambda) {
  using Scalar = typename DX::Scalar;
  if (xi.rows() != xi.cols() || xi.cols() != v.size()) {
    throw DimensionError("hals_column_update: Xi must be n x n with n = len(v)");
  }
  const Scalar denom = v.squaredNorm() + lambda;
  if (!(denom > 0)) throw DomainError("hals_column_update: ||v||^2 + lambda must be positive");
  return ((xi * v + lambda * v) / denom).cwiseMax(Scalar(0));
}

// One SymHALS sweep over columns 0..r-1 with the running residual
// R = X - U V^T: add back u_i v_i^T, update u_i then v_i, subtract the new term.
// With lambda = 0 a zero column is redrawn from uniform(0, 1) * 1e-3.
template <typename Scalar, typename Rng>
void sym_hals_sweep(Matrix<Scalar>& residual, Matrix<Scalar>& u, Matrix<Scalar>& v, Scalar lambda, Rng& rng) {
  const Index n = u.rows();
  std::uniform_real_distribution<double> redraw(0.0, 1.0);
  auto revive = [&](auto&& column) {
    for (Index j = 0; j < n; ++j) column(j) = static_cast<Scalar>(1e-3 * redraw(rng));
  };
  for (Index i = 0; i < u.cols(); ++i) {
    residual.noalias() += u.col(i) * v.col(i).transpose();
    if (v.col(i).squaredNorm() + lambda <= 0) revive(v.col(i));
    u.col(i) = hals_column_update(residual, v.col(i), lambda);
    if (u.col(i).squaredNorm() + lambda <= 0) revive(u.col(i));
    // The v-subproblem sees the residual transposed; R is symmetric only when U V^T is.
    v.col(i) = hals_column_update(residual.transpose(), u.col(i), lambda);
    residual.noalias() -= u.col(i) * v.col(i).transpose();
  }
}

namespace detail {

enum class StepStatus { ok, failed, diverged };

template <typename Scalar>
Scalar half_fit(const Matrix<Scalar>& x, const Matrix<Scalar>& u) {
  return Scalar(0.5) * (x - u * u.transpose()).squaredNorm();
}

template <typename Scalar>
double trace_fitting_error(const Matrix<Scalar>& x, const Matrix<Scalar>& u, Scalar x_norm_sq) {
  // X = 0 has no normalized error; the raw residual is recorded instead.
  const Scalar num = (x - u * u.transpose()).squaredNorm();
  return static_cast<double>(x_norm_sq > 0 ? num / x_norm_sq : num);
}

inline std::size_t resolve_stride(const SolverConfig& config, Index n) {
  if (config.trace_stride > 0) return config.trace_stride;
  return n <= 2000 ? 1 : 10;
}

template <typename Scalar>
void require_symmetric_input(const Matrix<Scalar>& x) {
  if (x.rows() != x.cols()) throw DimensionError("X must be square");
  if (relative_asymmetry(x) > Scalar(1e-12)) throw DomainError("X must be symmetric");
}

// Shared run loop. `paired` solvers iterate (U, V); the others keep V = U.
template <typename Scalar, typename Step, typename Objective, typename Stationarity>
SolveResult<Scalar> run_loop(const Matrix<Scalar>& x, Matrix<Scalar> u, Matrix<Scalar> v, bool paired,
                             const SolverConfig& config, Step&& step, Objective&& objective,
                             Stationarity&& stationarity, const IterateObserver<Scalar>* observer) {
  if (config.max_iterations < 1) throw DomainError("max_iterations must be >= 1");
  if (config.tol_step < 0 || config.tol_kkt < 0) throw DomainError("tolerances must be nonnegative");

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const Scalar x_norm_sq = x.squaredNorm();
  const std::size_t stride = resolve_stride(config, x.rows());

  auto elapsed = [&] {
    if (!config.record_elapsed) return 0.0;
    return std::chrono::duration<double>(clock::now() - start).count();
  };
  auto make_record = [&](std::size_t k, Scalar f, double step_sq) {
    IterationRecord rec;
    rec.k = k;
    rec.f_value = static_cast<double>(f);
    rec.fitting_error = trace_fitting_error(x, u, x_norm_sq);
    rec.symmetry_gap = paired ? static_cast<double>((u - v).squaredNorm()) : 0.0;
    rec.step_norm_sq = step_sq;
    rec.elapsed_seconds = elapsed();
    return rec;
  };

  SolveResult<Scalar> result;
  Scalar f = objective(u, v);
  const Scalar f0 = f;
  result.trace.push_back(make_record(0, f, 0.0));
  if (observer && *observer) (*observer)(0, u, v);

  Matrix<Scalar> u_prev, v_prev;
  std::size_t k = 0;
  Termination why = Termination::max_iters;
  while (true) {
    u_prev = u;
    if (paired) v_prev = v;
    const StepStatus status = step(u, v);
    ++k;
    if (status == StepStatus::failed) {
      u = u_prev;
      if (paired) v = v_prev;
      why = Termination::max_iters;
      break;
    }
    if (!paired) v = u;
    f = objective(u, v);
    if (status == StepStatus::diverged || !u.allFinite() || !std::isfinite(static_cast<double>(f)) ||
        (!paired && f > Scalar(1e12) * (f0 + 1))) {
      result.trace.push_back(make_record(k, f, std::numeric_limits<double>::infinity()));
      why = Termination::diverged;
      break;
    }
    const Scalar step_sq = (u - u_prev).squaredNorm() + (paired ? (v - v_prev).squaredNorm() : Scalar(0));
    const Scalar prev_norm = std::sqrt(u_prev.squaredNorm() + (paired ? v_prev.squaredNorm() : Scalar(0)));

    bool stop = false;
    if (stationarity(u, v) <= Scalar(config.tol_kkt)) {
      why = Termination::kkt_tol;
      stop = true;
    } else if (std::sqrt(step_sq) <= Scalar(config.tol_step) * std::max<Scalar>(1, prev_norm)) {
      why = Termination::step_tol;
      stop = true;
    } else if (k >= config.max_iterations) {
      why = Termination::max_iters;
      stop = true;
    }
    if (stop || k % stride == 0) {
      result.trace.push_back(make_record(k, f, static_cast<double>(step_sq)));
    }
    if (observer && *observer) (*observer)(k, u, v);
    if (stop) break;
  }

  result.iterations = k;
  result.termination = why;
  result.u_final = std::move(u);
  result.v_final = std::move(v);
  result.symmetry_gap_final = (result.u_final - result.v_final).squaredNorm();
  return result;
}

template <typename Scalar>
void check_problem(const PenalizedProblem<Scalar>& p) {
  require_symmetric_input(p.X);
  require_finite(p.X, "X");
  if (!(p.lambda > 0)) throw DomainError("lambda must be positive");
  if (p.rank < 1 || p.rank > p.n()) throw DimensionError("rank must lie in [1, n]");
}

template <typename Scalar>
void finish_penalized(const PenalizedProblem<Scalar>& p, SolveResult<Scalar>& result) {
  result.lambda = p.lambda;
  result.kkt_residual_final = kkt_residual(p, result.u_final, result.v_final);
  result.symmetric_kkt_final = symmetric_kkt_residual(p.X, result.u_final);
}

}  // namespace detail

// Alternating exact solves: U_k = argmin_{U >= 0} g(U, V_{k-1}), then
// V_k = argmin_{V >= 0} g(U_k, V). Since X = X^T, the V-update is solve_rows(X, U_k).
template <typename Scalar>
SolveResult<Scalar> sym_anls(const PenalizedProblem<Scalar>& p, const SolverConfig& config,
                             const IterateObserver<Scalar>& observer = {}) {
  detail::check_problem(p);
  const Matrix<Scalar> u0 = initial_factor<Scalar>(p.n(), p.rank, config);
  auto step = [&](Matrix<Scalar>& u, Matrix<Scalar>& v) {
    u = solve_rows(p.X, v, p.lambda, config.threads);
    v = solve_rows(p.X, u, p.lambda, config.threads);
    return detail::StepStatus::ok;
  };
  auto objective = [&](const Matrix<Scalar>& u, const Matrix<Scalar>& v) { return eval_penalized(p, u, v); };
  auto stationarity = [&](const Matrix<Scalar>& u, const Matrix<Scalar>& v) { return kkt_residual(p, u, v); };
  auto result = detail::run_loop<Scalar>(p.X, u0, u0, true, config, step, objective, stationarity, &observer);
  detail::finish_penalized(p, result);
  return result;
}

template <typename Scalar>
SolveResult<Scalar> sym_hals(const PenalizedProblem<Scalar>& p, const SolverConfig& config,
                             const IterateObserver<Scalar>& observer = {}) {
  detail::check_problem(p);
  const Matrix<Scalar> u0 = initial_factor<Scalar>(p.n(), p.rank, config);
  Matrix<Scalar> residual = p.X - u0 * u0.transpose();
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed), 2u};
  std::mt19937_64 rng(seq);
  auto step = [&](Matrix<Scalar>& u, Matrix<Scalar>& v) {
    sym_hals_sweep(residual, u, v, p.lambda, rng);
    return detail::StepStatus::ok;
  };
  auto objective = [&](const Matrix<Scalar>& u, const Matrix<Scalar>& v) { return eval_penalized(p, u, v); };
  auto stationarity = [&](const Matrix<Scalar>& u, const Matrix<Scalar>& v) { return kkt_residual(p, u, v); };
  auto result = detail::run_loop<Scalar>(p.X, u0, u0, true, config, step, objective, stationarity, &observer);
  detail::finish_penalized(p, result);
  return result;
}

// Projected gradient on 1/2 ||X - U U^T||_F^2 with either the fixed step 1/L or
// Armijo backtracking along the projection arc.
template <typename Scalar>
SolveResult<Scalar> pgd_symmetric(const Matrix<Scalar>& x, Index rank, const SolverConfig& config,
                                  const IterateObserver<Scalar>& observer = {}) {
  detail::require_symmetric_input(x);
  require_finite(x, "X");
  if (rank < 1 || rank > x.rows()) throw DimensionError("rank must lie in [1, n]");
  const Matrix<Scalar> u0 = initial_factor<Scalar>(x.rows(), rank, config);
  const Scalar lipschitz = symmetric_lipschitz_bound(x, u0);
  Scalar eta = Scalar(1) / lipschitz;
  constexpr Scalar kArmijo = Scalar(0.01);
  constexpr int kMaxHalvings = 60;

  auto step = [&](Matrix<Scalar>& u, Matrix<Scalar>&) {
    const Matrix<Scalar> grad = symmetric_gradient(x, u);
    if (config.pgd_step == PgdStep::lipschitz) {
      u = (u - eta * grad).cwiseMax(Scalar(0));
      return detail::StepStatus::ok;
    }
    const Scalar h = detail::half_fit(x, u);
    eta *= 2;
    for (int t = 0; t < kMaxHalvings; ++t, eta /= 2) {
      Matrix<Scalar> trial = (u - eta * grad).cwiseMax(Scalar(0));
      const Scalar decrease = (grad.array() * (trial - u).array()).sum();
      if (detail::half_fit(x, trial) - h <= kArmijo * decrease) {
        u = std::move(trial);
        return detail::StepStatus::ok;
      }
    }
    return detail::StepStatus::failed;
  };
  auto objective = [&](const Matrix<Scalar>& u, const Matrix<Scalar>&) { return detail::half_fit(x, u); };
  auto stationarity = [&](const Matrix<Scalar>& u, const Matrix<Scalar>&) {
    return symmetric_kkt_residual(x, u);
  };
  auto result = detail::run_loop<Scalar>(x, u0, u0, false, config, step, objective, stationarity, &observer);
  result.kkt_residual_final = symmetric_kkt_residual(x, result.u_final);
  result.symmetric_kkt_final = result.kkt_residual_final;
  return result;
}

// Plain gradient descent on 1/2 ||X - U U^T||_F^2 without the sign constraint.
template <typename Scalar>
SolveResult<Scalar> gd_matrix_factorization(const Matrix<Scalar>& x, Index rank, const SolverConfig& config,
                                            const IterateObserver<Scalar>& observer = {}) {
  detail::require_symmetric_input(x);
  require_finite(x, "X");
  if (rank < 1 || rank > x.rows()) throw DimensionError("rank must lie in [1, n]");
  const Matrix<Scalar> u0 = initial_factor<Scalar>(x.rows(), rank, config);
  const Scalar eta = config.gd_step > 0 ? Scalar(config.gd_step) : Scalar(1) / symmetric_lipschitz_bound(x, u0);

  auto step = [&](Matrix<Scalar>& u, Matrix<Scalar>&) {
    u -= eta * symmetric_gradient(x, u);
    return detail::StepStatus::ok;
  };
  auto objective = [&](const Matrix<Scalar>& u, const Matrix<Scalar>&) { return detail::half_fit(x, u); };
  auto stationarity = [&](const Matrix<Scalar>& u, const Matrix<Scalar>&) {
    return symmetric_gradient(x, u).norm();
  };
  auto result = detail::run_loop<Scalar>(x, u0, u0, false, config, step, objective, stationarity, &observer);
  if (result.u_final.allFinite()) {
    result.kkt_residual_final = symmetric_gradient(x, result.u_final).norm();
  } else {
    result.kkt_residual_final = std::numeric_limits<Scalar>::infinity();
  }
  result.symmetric_kkt_final = result.kkt_residual_final;
  return result;
}

// Largest violation of f_k - f_{k+1} >= lambda/2 * step_norm_sq_{k+1} over consecutive records.
inline DecreaseReport verify_sufficient_decrease(const std::vector<IterationRecord>& trace, double lambda,
                                                 double slack = kDecreaseSlack) {
  if (trace.empty()) throw DomainError("verify_sufficient_decrease: empty trace");
  DecreaseReport report;
  for (std::size_t k = 1; k < trace.size(); ++k) {
    const double drop = trace[k - 1].f_value - trace[k].f_value;
    const double violation = 0.5 * lambda * trace[k].step_norm_sq - drop;
    if (k == 1 || violation > report.max_violation) {
      report.max_violation = violation;
      report.worst_k = trace[k].k;
    }
  }
  if (trace.size() == 1) report.max_violation = 0;
  report.passed = report.max_violation <= slack;
  return report;
}

}  // namespace symnmf
