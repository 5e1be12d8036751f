#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "symnmf/graph.hpp"
#include "symnmf/io.hpp"
#include "symnmf/solvers.hpp"

namespace symnmf::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kMaxIterations = 2, kNumericFailure = 3 };

enum class SolverKind { symanls, symhals, pgd, gdmf };

SolverKind parse_solver(const std::string& name);
const char* to_string(SolverKind kind);

struct SynthSpec {
  Index n = 50;
  Index rank = 5;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  MatrixFormat format = MatrixFormat::matrixmarket_array;
};

// Exactly one of `input` and `synth_n` selects the data source.
struct RunSpec {
  std::optional<std::string> input;
  std::optional<Index> synth_n;
  Index rank = 5;
  SolverKind solver = SolverKind::symhals;
  std::optional<double> lambda;
  std::optional<std::string> init_path;
  SolverConfig config;
  std::string out_dir = ".";
};

struct ClusterSpec {
  std::optional<std::string> points_path;
  std::optional<std::string> similarity_path;
  std::optional<std::string> truth_path;
  Index neighbors = kDefaultNeighbors;
  Index rank = 2;
  SolverKind solver = SolverKind::symanls;
  std::optional<double> lambda;
  SolverConfig config;
  std::string out_dir = ".";
};

// Solver output plus the lambda bookkeeping the certificate reports.
struct FactorizationOutcome {
  SolveResult<double> result;
  double lambda = 0;
  double lambda_threshold = 0;
  double iterate_bound = 0;
};

FactorizationOutcome factorize(const DenseMatrix& x, Index rank, SolverKind solver,
                               std::optional<double> lambda, const SolverConfig& config);

int exit_code_for(Termination t);

// Writes X.<ext> and U_star.<ext> into spec.out_dir.
int cmd_synth(const SynthSpec& spec);
// Writes trace.csv, U.mtx, V.mtx and certificate.json into spec.out_dir.
int cmd_factorize(const RunSpec& spec);
// Writes labels.txt, trace.csv, U.mtx and certificate.json into spec.out_dir.
int cmd_cluster(const ClusterSpec& spec);

// Parses argv and dispatches; returns the process exit code.
int run(int argc, char** argv);

}  // namespace symnmf::cli
