#pragma once

// Monte-Carlo harness for the robust matrix completion table and RPCA runs.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lrsp/instance.hpp"
#include "lrsp/solvers.hpp"

namespace lrsp {

enum class SolverKind { sparcs, alps };

std::string_view to_string(SolverKind kind);
/// Accepts "sparcs" and "alps" (also "matrix-alps"); throws ArgumentError otherwise.
SolverKind parse_solver_kind(std::string_view name);

SolverResult run_solver(SolverKind kind, const ProblemSpec& problem, const SolverConfig& config,
                        const std::optional<GroundTruth>& truth = std::nullopt);

/// One row of the completion table: an m x n rank-k matrix observed on a uniform
/// fraction of its entries with noise of the given norm.
struct CompletionConfig {
  Index rows = 200;
  Index cols = 400;
  Index rank = 5;
  double noise_norm = 0.0;
  Index sparsity = 0;
  double fraction = 0.3;

  /// e.g. "200x400_k5_e0".
  std::string label() const;
  /// Parses `m,n,k,noise` (optionally `,s` and `,fraction`).
  static CompletionConfig parse(std::string_view text);
};

struct BenchmarkOptions {
  std::vector<CompletionConfig> configs;
  std::vector<SolverKind> solvers{SolverKind::sparcs, SolverKind::alps};
  int reps = 11;
  std::uint64_t seed = 0;
  SolverConfig solver;
  /// Wall-clock columns are left empty unless set, so reports are reproducible byte for byte.
  bool record_time = false;
};

struct RunRecord {
  std::string config;
  int rep = 0;
  std::string solver;
  std::uint64_t instance_hash = 0;
  int iterations = 0;
  double rel_error = 0.0;
  double seconds = 0.0;
  bool hit_cap = false;
  bool failed = false;
  std::string failure;
};

struct ReportRow {
  std::string config;
  std::string solver;
  double median_iters = 0.0;
  double median_rel_err = 0.0;
  double median_secs = 0.0;
  int reps = 0;
  int failures = 0;
  int capped = 0;  // completed runs that stopped at max_iterations
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  std::vector<RunRecord> runs;
  bool record_time = false;

  const ReportRow* find(std::string_view config, std::string_view solver) const;

  /// `config,solver,median_iters,median_rel_err,median_secs,reps,failures`.
  void write_csv(std::ostream& out) const;
  /// Per-run detail: `config,rep,solver,instance_hash,iters,rel_err,secs,hit_cap,failed`.
  void write_runs_csv(std::ostream& out) const;
};

/// Median of the values; the mean of the two middle values for even counts.
double median(std::vector<double> values);

/// Every solver sees the same instance within a (config, rep) cell; per-rep seeds derive
/// from the master seed so results do not depend on execution order.
ExperimentReport run_completion_benchmark(const BenchmarkOptions& options);

struct RpcaOptions {
  Index rank = 1;
  Index sparsity = 1;
  SolverKind solver = SolverKind::alps;
  SolverConfig config;
};

struct RpcaResult {
  Matrix low_rank;
  Matrix sparse;
  SolverTrace trace;
  RunRecord run;  // rel_error is against the planted truth when one is given, else NaN
  std::optional<double> low_rank_error;
  std::optional<double> sparse_error;
};

/// Decomposes fully observed data Y into L + M with the given budgets.
RpcaResult run_rpca(const Matrix& data, const RpcaOptions& options,
                    const std::optional<GroundTruth>& truth = std::nullopt);

/// Synthetic variant; the instance must be observed through the identity operator.
RpcaResult run_rpca(const SyntheticInstance& instance, const RpcaOptions& options);

/// Frames-as-columns: frame j (h x w, row-major) becomes column j of an (h*w) x frames matrix.
Matrix stack_frames(const std::vector<Matrix>& frames);
std::vector<Matrix> unstack_frames(const Matrix& stacked, Index height, Index width);

}  // namespace lrsp
