#include "symnmf/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "symnmf/cluster.hpp"
#include "symnmf/objective.hpp"
#include "symnmf/synthetic.hpp"

namespace symnmf::cli {

namespace fs = std::filesystem;

namespace {

std::shared_ptr<spdlog::logger> logger() {
  static auto log = [] {
    auto l = spdlog::stderr_color_st("symnmf");
    l->set_pattern("[%l] %v");
    l->set_level(spdlog::level::off);
    return l;
  }();
  return log;
}

void configure_logging() {
  const char* env = std::getenv("SYMNMF_LOG");
  const std::string level = env ? env : "off";
  if (level == "off") {
    logger()->set_level(spdlog::level::off);
  } else if (level == "info") {
    logger()->set_level(spdlog::level::info);
  } else if (level == "debug") {
    logger()->set_level(spdlog::level::debug);
  } else {
    logger()->set_level(spdlog::level::warn);
    logger()->warn("ignoring SYMNMF_LOG='{}' (expected off, info or debug)", level);
    logger()->set_level(spdlog::level::off);
  }
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

nlohmann::ordered_json certificate(const FactorizationOutcome& o, const DenseMatrix& x, SolverKind solver,
                                   const SolverConfig& config) {
  const auto& r = o.result;
  nlohmann::ordered_json doc;
  doc["solver"] = to_string(solver);
  doc["termination"] = to_string(r.termination);
  doc["iterations"] = r.iterations;
  doc["n"] = x.rows();
  doc["rank"] = r.u_final.cols();
  doc["seed"] = config.seed;
  doc["lambda"] = o.lambda;
  doc["lambda_threshold"] = o.lambda_threshold;
  doc["iterate_bound_b0"] = o.iterate_bound;
  doc["kkt_residual"] = r.kkt_residual_final;
  doc["symmetry_gap"] = r.symmetry_gap_final;
  doc["symmetric_kkt_residual"] = r.symmetric_kkt_final;
  doc["f_value"] = r.trace.empty() ? 0.0 : r.trace.back().f_value;
  doc["fitting_error"] = r.trace.empty() ? 0.0 : r.trace.back().fitting_error;
  return doc;
}

void log_trace(const std::vector<IterationRecord>& trace) {
  if (!logger()->should_log(spdlog::level::debug)) return;
  for (const auto& rec : trace) {
    logger()->debug("k={} f={:.6e} E={:.6e} gap={:.3e} step={:.3e}", rec.k, rec.f_value, rec.fitting_error,
                    rec.symmetry_gap, rec.step_norm_sq);
  }
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    std::cerr << "symnmf: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "symnmf: " << e.what() << '\n';
    return kUsage;
  } catch (const DimensionError& e) {
    std::cerr << "symnmf: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "symnmf: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "symnmf: numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  }
}

SolverConfig with_init(SolverConfig config, const std::optional<std::string>& init_path) {
  if (init_path) config.initial_factor = read_matrix(*init_path);
  return config;
}

}  // namespace

SolverKind parse_solver(const std::string& name) {
  if (name == "symanls") return SolverKind::symanls;
  if (name == "symhals") return SolverKind::symhals;
  if (name == "pgd") return SolverKind::pgd;
  if (name == "gdmf") return SolverKind::gdmf;
  throw DomainError("unknown solver '" + name + "' (expected symanls, symhals, pgd or gdmf)");
}

const char* to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::symanls: return "symanls";
    case SolverKind::symhals: return "symhals";
    case SolverKind::pgd: return "pgd";
    case SolverKind::gdmf: return "gdmf";
  }
  return "unknown";
}

int exit_code_for(Termination t) {
  switch (t) {
    case Termination::step_tol:
    case Termination::kkt_tol: return kSuccess;
    case Termination::max_iters: return kMaxIterations;
    case Termination::diverged: return kNumericFailure;
  }
  return kNumericFailure;
}

FactorizationOutcome factorize(const DenseMatrix& x_in, Index rank, SolverKind solver,
                               std::optional<double> lambda, const SolverConfig& config) {
  const DenseMatrix x = symmetrized(x_in);
  if (rank < 1 || rank > x.rows()) throw DimensionError("rank must lie in [1, n]");
  const DenseMatrix u0 = initial_factor(x.rows(), rank, config);

  FactorizationOutcome out;
  out.lambda_threshold = lambda_threshold(x, u0);
  out.lambda = lambda ? *lambda : default_lambda(x, u0, config.lambda_multiplier);
  if (!(out.lambda > 0)) throw DomainError("lambda must be positive");
  out.iterate_bound = iterate_bound_b0(x, u0, out.lambda);
  logger()->info("n={} rank={} solver={} lambda={:.6g} threshold={:.6g}", x.rows(), rank, to_string(solver),
                 out.lambda, out.lambda_threshold);

  switch (solver) {
    case SolverKind::symanls:
      out.result = sym_anls(make_problem(x, out.lambda, rank), config);
      break;
    case SolverKind::symhals:
      out.result = sym_hals(make_problem(x, out.lambda, rank), config);
      break;
    case SolverKind::pgd:
      out.result = pgd_symmetric(x, rank, config);
      break;
    case SolverKind::gdmf:
      out.result = gd_matrix_factorization(x, rank, config);
      break;
  }
  logger()->info("terminated by {} after {} iterations", to_string(out.result.termination),
                 out.result.iterations);
  log_trace(out.result.trace);
  return out;
}

int cmd_synth(const SynthSpec& spec) {
  return guarded([&] {
    const auto inst = synthetic_instance(spec.n, spec.rank, spec.seed);
    const fs::path dir = prepare_dir(spec.out_dir);
    const std::string ext = spec.format == MatrixFormat::csv ? ".csv" : ".mtx";
    write_matrix((dir / ("X" + ext)).string(), inst.x, spec.format);
    write_matrix((dir / ("U_star" + ext)).string(), inst.u_star, spec.format);
    logger()->info("wrote synthetic instance n={} r={} seed={} to {}", spec.n, spec.rank, spec.seed,
                   dir.string());
    return static_cast<int>(kSuccess);
  });
}

int cmd_factorize(const RunSpec& spec) {
  return guarded([&] {
    if (spec.input.has_value() == spec.synth_n.has_value()) {
      throw DomainError("factorize needs exactly one of --input and --synth");
    }
    const DenseMatrix x =
        spec.input ? read_matrix(*spec.input) : synthetic_instance(*spec.synth_n, spec.rank, spec.config.seed).x;
    const SolverConfig config = with_init(spec.config, spec.init_path);
    const auto outcome = factorize(x, spec.rank, spec.solver, spec.lambda, config);

    const fs::path dir = prepare_dir(spec.out_dir);
    write_trace((dir / "trace.csv").string(), outcome.result.trace);
    write_matrix((dir / "U.mtx").string(), outcome.result.u_final, MatrixFormat::matrixmarket_array);
    write_matrix((dir / "V.mtx").string(), outcome.result.v_final, MatrixFormat::matrixmarket_array);
    write_json(dir / "certificate.json", certificate(outcome, x, spec.solver, config));
    return exit_code_for(outcome.result.termination);
  });
}

int cmd_cluster(const ClusterSpec& spec) {
  return guarded([&] {
    if (spec.points_path.has_value() == spec.similarity_path.has_value()) {
      throw DomainError("cluster needs exactly one of --points and --similarity");
    }
    if (spec.truth_path && !fs::exists(*spec.truth_path)) {
      throw IoError("ground-truth file '" + *spec.truth_path + "' does not exist");
    }
    DenseMatrix x;
    if (spec.points_path) {
      x = build_similarity(PointSet<double>{read_matrix(*spec.points_path), spec.neighbors});
    } else {
      x = read_matrix(*spec.similarity_path);
    }
    const auto outcome = factorize(x, spec.rank, spec.solver, spec.lambda, spec.config);

    ClusterResult clusters;
    clusters.labels = assign_labels(outcome.result.u_final);
    if (spec.truth_path) {
      const auto truth = read_labels(*spec.truth_path);
      clusters.accuracy = clustering_accuracy(clusters.labels, truth);
      logger()->info("clustering accuracy {:.4f}", *clusters.accuracy);
    }

    const fs::path dir = prepare_dir(spec.out_dir);
    write_labels((dir / "labels.txt").string(), clusters.labels);
    write_trace((dir / "trace.csv").string(), outcome.result.trace);
    write_matrix((dir / "U.mtx").string(), outcome.result.u_final, MatrixFormat::matrixmarket_array);
    auto doc = certificate(outcome, x, spec.solver, spec.config);
    if (clusters.accuracy) {
      doc["accuracy"] = *clusters.accuracy;
    } else {
      doc["accuracy"] = nullptr;
    }
    write_json(dir / "certificate.json", doc);
    return exit_code_for(outcome.result.termination);
  });
}

namespace {

struct SolverFlags {
  std::string solver;
  double lambda_mult = 1.01;
  std::optional<double> lambda;
  std::size_t max_iters = 5000;
  double tol_step = 1e-9;
  double tol_kkt = 1e-8;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t trace_stride = 0;
  bool timing = false;
  std::string pgd_step = "backtracking";
  double gd_step = 0;

  void attach(CLI::App* app, const std::string& default_solver) {
    solver = default_solver;
    app->add_option("--solver", solver, "symanls | symhals | pgd | gdmf")->capture_default_str();
    app->add_option("--lambda-mult", lambda_mult, "multiplier on the lambda threshold")->capture_default_str();
    app->add_option("--lambda", lambda, "absolute lambda (overrides --lambda-mult)");
    app->add_option("--max-iters", max_iters, "iteration cap")->capture_default_str();
    app->add_option("--tol-step", tol_step, "relative step-norm tolerance")->capture_default_str();
    app->add_option("--tol-kkt", tol_kkt, "KKT residual tolerance")->capture_default_str();
    app->add_option("--seed", seed, "random seed")->capture_default_str();
    app->add_option("--threads", threads, "worker threads for row-parallel NNLS")->capture_default_str();
    app->add_option("--trace-stride", trace_stride, "record every k-th iteration (0 = auto)");
    app->add_option("--pgd-step", pgd_step, "pgd step policy: lipschitz | backtracking")->capture_default_str();
    app->add_option("--gd-step", gd_step, "fixed gdmf step (0 = 1/L)");
    app->add_flag("--timing", timing, "record wall-clock time in the trace (breaks byte-identical output)");
  }

  SolverConfig config() const {
    SolverConfig c;
    c.lambda_multiplier = lambda_mult;
    c.max_iterations = max_iters;
    c.tol_step = tol_step;
    c.tol_kkt = tol_kkt;
    c.seed = seed;
    c.threads = threads;
    c.trace_stride = trace_stride;
    c.record_elapsed = timing;
    c.gd_step = gd_step;
    if (pgd_step == "lipschitz") {
      c.pgd_step = PgdStep::lipschitz;
    } else if (pgd_step == "backtracking") {
      c.pgd_step = PgdStep::backtracking;
    } else {
      throw DomainError("unknown --pgd-step '" + pgd_step + "'");
    }
    return c;
  }
};

}  // namespace

int run(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Symmetric NMF through a penalized nonsymmetric splitting"};
  app.require_subcommand(1);

  SynthSpec synth;
  std::string synth_format = "mtx";
  auto* synth_cmd = app.add_subcommand("synth", "generate X = U* U*^T with U* = |N(0,1)|");
  synth_cmd->add_option("--n", synth.n, "rows of U*")->capture_default_str();
  synth_cmd->add_option("--rank", synth.rank, "columns of U*")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "random seed")->capture_default_str();
  synth_cmd->add_option("--format", synth_format, "mtx | csv")->capture_default_str();
  synth_cmd->add_option("--out", synth.out_dir, "output directory")->capture_default_str();

  RunSpec fact;
  SolverFlags fact_flags;
  std::string fact_input;
  Index fact_synth = 0;
  std::string fact_init;
  auto* fact_cmd = app.add_subcommand("factorize", "run one solver and write trace, factors and certificate");
  auto* input_opt = fact_cmd->add_option("--input", fact_input, "matrix file (.mtx or .csv)");
  auto* synth_opt = fact_cmd->add_option("--synth", fact_synth, "generate a synthetic n x n instance instead");
  input_opt->excludes(synth_opt);
  fact_cmd->add_option("--rank", fact.rank, "factorization rank")->capture_default_str();
  fact_cmd->add_option("--init", fact_init, "initial factor U0 (default uniform(0,1) from --seed)");
  fact_cmd->add_option("--out", fact.out_dir, "output directory")->capture_default_str();
  fact_flags.attach(fact_cmd, "symhals");

  ClusterSpec clus;
  SolverFlags clus_flags;
  std::string clus_points, clus_sim, clus_truth;
  auto* clus_cmd = app.add_subcommand("cluster", "graph -> symmetric NMF -> argmax labels");
  auto* points_opt = clus_cmd->add_option("--points", clus_points, "data matrix, one sample per row");
  auto* sim_opt = clus_cmd->add_option("--similarity", clus_sim, "precomputed similarity matrix");
  points_opt->excludes(sim_opt);
  clus_cmd->add_option("--truth", clus_truth, "ground-truth labels, one integer per line");
  clus_cmd->add_option("--neighbors", clus.neighbors, "kNN parameter of the similarity graph")
      ->capture_default_str();
  clus_cmd->add_option("--rank", clus.rank, "number of clusters")->capture_default_str();
  clus_cmd->add_option("--out", clus.out_dir, "output directory")->capture_default_str();
  clus_flags.attach(clus_cmd, "symanls");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kUsage;
  }

  return guarded([&] {
    if (synth_cmd->parsed()) {
      if (synth_format == "csv") {
        synth.format = MatrixFormat::csv;
      } else if (synth_format != "mtx") {
        throw DomainError("unknown --format '" + synth_format + "'");
      }
      return cmd_synth(synth);
    }
    if (fact_cmd->parsed()) {
      if (input_opt->count()) fact.input = fact_input;
      if (synth_opt->count()) fact.synth_n = fact_synth;
      if (!fact_init.empty()) fact.init_path = fact_init;
      fact.solver = parse_solver(fact_flags.solver);
      fact.lambda = fact_flags.lambda;
      fact.config = fact_flags.config();
      return cmd_factorize(fact);
    }
    if (points_opt->count()) clus.points_path = clus_points;
    if (sim_opt->count()) clus.similarity_path = clus_sim;
    if (!clus_truth.empty()) clus.truth_path = clus_truth;
    clus.solver = parse_solver(clus_flags.solver);
    clus.lambda = clus_flags.lambda;
    clus.config = clus_flags.config();
    return cmd_cluster(clus);
  });
}

}  // namespace symnmf::cli
