#include "lrsp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "lrsp/errors.hpp"
#include "lrsp/random.hpp"

namespace lrsp {
namespace {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string_view to_string(SolverKind kind) {
  return kind == SolverKind::sparcs ? "SpaRCS" : "MatrixALPS";
}

SolverKind parse_solver_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "sparcs") return SolverKind::sparcs;
  if (lower == "alps" || lower == "matrix-alps" || lower == "matrixalps") return SolverKind::alps;
  throw ArgumentError("unknown solver '" + std::string(name) + "' (expected sparcs or alps)");
}

SolverResult run_solver(SolverKind kind, const ProblemSpec& problem, const SolverConfig& config,
                        const std::optional<GroundTruth>& truth) {
  return kind == SolverKind::sparcs ? sparcs_solve(problem, config, truth)
                                    : alps_solve(problem, config, truth);
}

std::string CompletionConfig::label() const {
  std::ostringstream out;
  out << rows << 'x' << cols << "_k" << rank << "_e" << format_number(noise_norm);
  if (sparsity > 0) out << "_s" << sparsity;
  if (fraction != 0.3) out << "_f" << format_number(fraction);
  return out.str();
}

CompletionConfig CompletionConfig::parse(std::string_view text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  if (parts.size() < 4 || parts.size() > 6) {
    throw ArgumentError("config '" + std::string(text) + "': expected m,n,k,noise[,s[,fraction]]");
  }
  CompletionConfig c;
  try {
    std::size_t used = 0;
    auto whole = [&](const std::string& s) {
      const long long v = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return static_cast<Index>(v);
    };
    auto real = [&](const std::string& s) {
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    };
    c.rows = whole(parts[0]);
    c.cols = whole(parts[1]);
    c.rank = whole(parts[2]);
    c.noise_norm = real(parts[3]);
    if (parts.size() > 4) c.sparsity = whole(parts[4]);
    if (parts.size() > 5) c.fraction = real(parts[5]);
  } catch (const std::logic_error&) {
    throw ArgumentError("config '" + std::string(text) + "': malformed number");
  }
  if (c.rows < 1 || c.cols < 1 || c.rank < 1 || c.noise_norm < 0.0 || c.sparsity < 0) {
    throw ArgumentError("config '" + std::string(text) + "': out-of-range value");
  }
  return c;
}

const ReportRow* ExperimentReport::find(std::string_view config, std::string_view solver) const {
  for (const auto& r : rows) {
    if (r.config == config && r.solver == solver) return &r;
  }
  return nullptr;
}

void ExperimentReport::write_csv(std::ostream& out) const {
  out << "config,solver,median_iters,median_rel_err,median_secs,reps,failures\n";
  for (const auto& r : rows) {
    const bool any = r.failures < r.reps;
    out << r.config << ',' << r.solver << ',';
    if (any) out << format_number(r.median_iters);
    out << ',';
    if (any) out << format_number(r.median_rel_err);
    out << ',';
    if (any && record_time) out << format_number(r.median_secs);
    out << ',' << r.reps << ',' << r.failures << '\n';
  }
}

void ExperimentReport::write_runs_csv(std::ostream& out) const {
  out << "config,rep,solver,instance_hash,iters,rel_err,secs,hit_cap,failed\n";
  char hash[24];
  for (const auto& r : runs) {
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.instance_hash));
    out << r.config << ',' << r.rep << ',' << r.solver << ',' << hash << ',';
    if (!r.failed) out << r.iterations;
    out << ',';
    if (!r.failed) out << format_number(r.rel_error);
    out << ',';
    if (!r.failed && record_time) out << format_number(r.seconds);
    out << ',' << (r.hit_cap ? 1 : 0) << ',' << (r.failed ? 1 : 0) << '\n';
  }
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ExperimentReport run_completion_benchmark(const BenchmarkOptions& options) {
  if (options.reps < 1) throw ArgumentError("benchmark needs at least one repetition");
  if (options.solvers.empty()) throw ArgumentError("benchmark needs at least one solver");
  options.solver.validate();

  ExperimentReport report;
  report.record_time = options.record_time;
  for (std::size_t ci = 0; ci < options.configs.size(); ++ci) {
    const CompletionConfig& cfg = options.configs[ci];
    const std::string label = cfg.label();
    const std::uint64_t config_seed = mix_seed(options.seed, ci);

    std::vector<std::vector<RunRecord>> per_solver(options.solvers.size());
    for (int rep = 0; rep < options.reps; ++rep) {
      InstanceParams params;
      params.rows = cfg.rows;
      params.cols = cfg.cols;
      params.rank = cfg.rank;
      params.sparsity = cfg.sparsity;
      params.model = ObservationModel::mask(cfg.fraction);
      params.noise_norm = cfg.noise_norm;
      params.seed = mix_seed(config_seed, static_cast<std::uint64_t>(rep));
      const SyntheticInstance inst = generate_instance(params);
      const std::uint64_t hash = inst.fingerprint();
      const Matrix truth = inst.truth();

      SolverConfig solver_cfg = options.solver;
      solver_cfg.projector.seed = mix_seed(params.seed, 0xA11CE);

      for (std::size_t si = 0; si < options.solvers.size(); ++si) {
        RunRecord run;
        run.config = label;
        run.rep = rep;
        run.solver = std::string(to_string(options.solvers[si]));
        run.instance_hash = hash;
        const auto start = std::chrono::steady_clock::now();
        try {
          const SolverResult res = run_solver(options.solvers[si], inst.problem(), solver_cfg);
          run.seconds = seconds_since(start);
          run.iterations = res.trace.iterations();
          run.rel_error = relative_error(res.state.estimate, truth);
          run.hit_cap = !res.trace.converged;
        } catch (const SolverFailure& e) {
          run.failed = true;
          run.failure = e.what();
        } catch (const ConvergenceError& e) {
          run.failed = true;
          run.failure = e.what();
        }
        per_solver[si].push_back(run);
      }
    }

    for (std::size_t si = 0; si < options.solvers.size(); ++si) {
      ReportRow row;
      row.config = label;
      row.solver = std::string(to_string(options.solvers[si]));
      row.reps = options.reps;
      std::vector<double> iters;
      std::vector<double> errs;
      std::vector<double> secs;
      for (const auto& run : per_solver[si]) {
        if (run.failed) {
          ++row.failures;
          continue;
        }
        if (run.hit_cap) ++row.capped;
        iters.push_back(run.iterations);
        errs.push_back(run.rel_error);
        secs.push_back(run.seconds);
      }
      row.median_iters = median(iters);
      row.median_rel_err = median(errs);
      row.median_secs = median(secs);
      report.rows.push_back(row);
      report.runs.insert(report.runs.end(), per_solver[si].begin(), per_solver[si].end());
    }
  }
  return report;
}

RpcaResult run_rpca(const Matrix& data, const RpcaOptions& options,
                    const std::optional<GroundTruth>& truth) {
  if (!data.allFinite()) throw ArgumentError("rpca: data contains NaN or Inf");
  const MeasurementOperator op = make_identity_operator(data.rows(), data.cols());
  const Eigen::Map<const Vector> y(data.data(), data.size());
  ProblemSpec problem{op, Vector(y), options.rank, options.sparsity};

  const auto start = std::chrono::steady_clock::now();
  SolverResult res = run_solver(options.solver, problem, options.config, truth);

  RpcaResult out;
  out.run.config = std::to_string(data.rows()) + "x" + std::to_string(data.cols()) + "_k" +
                   std::to_string(options.rank) + "_s" + std::to_string(options.sparsity);
  out.run.solver = std::string(to_string(options.solver));
  out.run.seconds = seconds_since(start);
  out.run.iterations = res.trace.iterations();
  out.run.hit_cap = !res.trace.converged;
  if (truth) {
    out.run.rel_error = relative_error(res.state.estimate, truth->low_rank + truth->sparse);
    out.low_rank_error = relative_error(res.state.low_rank, truth->low_rank);
    if (truth->sparse.norm() > 0.0) {
      out.sparse_error = relative_error(res.state.sparse, truth->sparse);
    }
  } else {
    out.run.rel_error = relative_error(res.state.estimate, data);
  }
  out.low_rank = std::move(res.state.low_rank);
  out.sparse = std::move(res.state.sparse);
  out.trace = std::move(res.trace);
  return out;
}

RpcaResult run_rpca(const SyntheticInstance& instance, const RpcaOptions& options) {
  if (instance.op.kind() != OperatorKind::identity) {
    throw ArgumentError("rpca requires fully observed data (identity operator), got " +
                        std::string(to_string(instance.op.kind())));
  }
  // Y = L* + M* + noise, reshaped back to the matrix grid.
  Matrix data(instance.params.rows, instance.params.cols);
  Eigen::Map<Vector>(data.data(), data.size()) = instance.observations;
  RpcaResult out = run_rpca(data, options, instance.ground_truth());
  out.run.instance_hash = instance.fingerprint();
  return out;
}

Matrix stack_frames(const std::vector<Matrix>& frames) {
  if (frames.empty()) throw ArgumentError("stack_frames: no frames");
  const Index h = frames.front().rows();
  const Index w = frames.front().cols();
  Matrix out(h * w, static_cast<Index>(frames.size()));
  for (std::size_t j = 0; j < frames.size(); ++j) {
    if (frames[j].rows() != h || frames[j].cols() != w) {
      throw ArgumentError("stack_frames: frame " + std::to_string(j) + " has a different size");
    }
    out.col(static_cast<Index>(j)) = Eigen::Map<const Vector>(frames[j].data(), h * w);
  }
  return out;
}

std::vector<Matrix> unstack_frames(const Matrix& stacked, Index height, Index width) {
  if (height * width != stacked.rows()) {
    throw ArgumentError("unstack_frames: frame size does not match stacked rows");
  }
  std::vector<Matrix> frames;
  frames.reserve(static_cast<std::size_t>(stacked.cols()));
  for (Index j = 0; j < stacked.cols(); ++j) {
    Matrix f(height, width);
    Eigen::Map<Vector>(f.data(), f.size()) = stacked.col(j);
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace lrsp
