#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lrsp/analysis.hpp"
#include "lrsp/errors.hpp"
#include "lrsp/experiment.hpp"
#include "lrsp/matrix_io.hpp"
#include "lrsp/random.hpp"
#include "problem_dir.hpp"

namespace lrsp::cli {
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kProjectorStream = 0xA11CE;

struct Globals {
  std::uint64_t seed = 0;
  double eta = 1e-4;
  int max_iters = 700;
  double tau = 0.25;
  std::string projector = "exact";
  fs::path out = ".";
};

SolverConfig solver_config(const Globals& g) {
  SolverConfig c;
  c.tolerance = g.eta;
  c.max_iterations = g.max_iters;
  c.momentum = g.tau;
  c.projector.kind = g.projector == "randomized" ? ProjectorKind::randomized : ProjectorKind::exact;
  c.projector.seed = mix_seed(g.seed, kProjectorStream);
  return c;
}

std::string num(double v, const char* fmt = "%.10g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw ArgumentError("cannot write " + path.string());
  return f;
}

void write_trace(const fs::path& path, const SolverTrace& trace) {
  auto f = open_out(path);
  trace.write_csv(f);
}

ObservationModel observation_model(const std::string& kind, double fraction, Index measurements,
                                   Index rows, Index cols) {
  if (kind == "mask") return ObservationModel::mask(fraction);
  if (kind == "identity") return ObservationModel::identity();
  // Gaussian default: half as many measurements as entries.
  return ObservationModel::gaussian(measurements > 0 ? measurements : rows * cols / 2);
}

SparseScaleReference sparse_reference(const std::string& name) {
  return name == "max" ? SparseScaleReference::max : SparseScaleReference::rms;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  Index rows = 200;
  Index cols = 400;
  Index rank = 5;
  Index sparsity = 0;
  std::string observe = "mask";
  double fraction = 0.3;
  Index measurements = 0;
  double noise = 0.0;
  double sparse_scale = 10.0;
  std::string sparse_ref = "rms";
};

int cmd_generate(const Globals& g, const GenerateArgs& a, std::ostream& out) {
  InstanceParams p;
  p.rows = a.rows;
  p.cols = a.cols;
  p.rank = a.rank;
  p.sparsity = a.sparsity;
  p.model = observation_model(a.observe, a.fraction, a.measurements, a.rows, a.cols);
  p.noise_norm = a.noise;
  p.sparse_scale = a.sparse_scale;
  p.sparse_reference = sparse_reference(a.sparse_ref);
  p.seed = g.seed;
  const SyntheticInstance inst = generate_instance(p);
  write_problem_dir(g.out, inst);
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(inst.fingerprint()));
  out << "wrote " << g.out.string() << " fingerprint=" << hash << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SolveArgs {
  fs::path problem;
  std::string solver = "alps";
  Index rank = -1;
  Index sparsity = -1;
  std::string format = "bin";
};

int cmd_solve(const Globals& g, const SolveArgs& a, std::ostream& out) {
  LoadedProblem loaded = read_problem_dir(a.problem);
  if (a.rank >= 0) loaded.problem.rank = a.rank;
  if (a.sparsity >= 0) loaded.problem.sparsity = a.sparsity;
  const SolverKind kind = parse_solver_kind(a.solver);
  const SolverResult res = run_solver(kind, loaded.problem, solver_config(g), loaded.truth);

  fs::create_directories(g.out);
  const MatrixFormat fmt = a.format == "csv" ? MatrixFormat::csv : MatrixFormat::bin;
  write_matrix(g.out / ("L_hat." + a.format), res.state.low_rank, fmt);
  write_matrix(g.out / ("M_hat." + a.format), res.state.sparse, fmt);
  write_trace(g.out / "trace.csv", res.trace);

  out << to_string(kind) << " iterations=" << res.trace.iterations()
      << " converged=" << (res.trace.converged ? 1 : 0);
  if (loaded.truth) {
    out << " rel_err="
        << num(relative_error(res.state.estimate, loaded.truth->low_rank + loaded.truth->sparse));
  }
  out << '\n';
  for (const auto& w : res.trace.warnings) out << "warning: " << w << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::vector<std::string> configs{"200,400,5,0", "200,400,5,0.01", "200,400,10,0",
                                   "200,400,15,0"};
  std::vector<std::string> solvers{"sparcs", "alps"};
  int reps = 11;
  bool timing = false;
};

int cmd_bench(const Globals& g, const BenchArgs& a, std::ostream& out) {
  BenchmarkOptions opts;
  for (const auto& c : a.configs) opts.configs.push_back(CompletionConfig::parse(c));
  opts.solvers.clear();
  for (const auto& s : a.solvers) opts.solvers.push_back(parse_solver_kind(s));
  opts.reps = a.reps;
  opts.seed = g.seed;
  opts.solver = solver_config(g);
  opts.record_time = a.timing;

  const ExperimentReport report = run_completion_benchmark(opts);
  fs::create_directories(g.out);
  {
    auto f = open_out(g.out / "report.csv");
    report.write_csv(f);
  }
  {
    auto f = open_out(g.out / "runs.csv");
    report.write_runs_csv(f);
  }
  report.write_csv(out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct RpcaArgs {
  fs::path input;
  std::vector<fs::path> frames;
  Index rows = 100;
  Index cols = 100;
  Index rank = 2;
  Index sparsity = 100;
  double noise = 0.0;
  double sparse_scale = 10.0;
  std::string sparse_ref = "rms";
  std::string solver = "alps";
  std::string format = "bin";
  bool timing = false;
};

int cmd_rpca(const Globals& g, const RpcaArgs& a, std::ostream& out) {
  RpcaOptions opts;
  opts.rank = a.rank;
  opts.sparsity = a.sparsity;
  opts.solver = parse_solver_kind(a.solver);
  opts.config = solver_config(g);

  RpcaResult res;
  if (!a.input.empty() || !a.frames.empty()) {
    Matrix data;
    if (!a.input.empty()) {
      data = read_matrix(a.input);
    } else {
      std::vector<Matrix> frames;
      for (const auto& f : a.frames) frames.push_back(read_matrix(f));
      data = stack_frames(frames);
    }
    res = run_rpca(data, opts);
  } else {
    InstanceParams p;
    p.rows = a.rows;
    p.cols = a.cols;
    p.rank = a.rank;
    p.sparsity = a.sparsity;
    p.model = ObservationModel::identity();
    p.noise_norm = a.noise;
    p.sparse_scale = a.sparse_scale;
    p.sparse_reference = sparse_reference(a.sparse_ref);
    p.seed = g.seed;
    res = run_rpca(generate_instance(p), opts);
  }

  fs::create_directories(g.out);
  const MatrixFormat fmt = a.format == "csv" ? MatrixFormat::csv : MatrixFormat::bin;
  write_matrix(g.out / ("L_hat." + a.format), res.low_rank, fmt);
  write_matrix(g.out / ("M_hat." + a.format), res.sparse, fmt);
  write_trace(g.out / "trace.csv", res.trace);

  std::ostringstream row;
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(res.run.instance_hash));
  row << "config,solver,instance_hash,iters,rel_err,err_L,err_M,secs,hit_cap\n"
      << res.run.config << ',' << res.run.solver << ',' << hash << ',' << res.run.iterations
      << ',' << num(res.run.rel_error) << ',';
  if (res.low_rank_error) row << num(*res.low_rank_error);
  row << ',';
  if (res.sparse_error) row << num(*res.sparse_error);
  row << ',';
  if (a.timing) row << num(res.run.seconds);
  row << ',' << (res.run.hit_cap ? 1 : 0) << '\n';
  {
    auto f = open_out(g.out / "rpca.csv");
    f << row.str();
  }
  out << row.str();
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct MomentumArgs {
  double delta_4k = 0.09;
  double delta_4s = 0.095;
  double joint = 0.095;
  double delta_3k = -1.0;  // negative: substitute delta_4k
  double delta_3s = -1.0;
  int iters = 2000;
};

struct GreedyArgs {
  double noise = 1.0;
};

struct RipArgs {
  Index rows = 30;
  Index cols = 40;
  std::string observe = "gaussian";
  double fraction = 0.3;
  Index measurements = 0;
  Index rank = 1;
  Index sparsity = 1;
  int trials = 200;
};

using Quantities = std::vector<std::pair<std::string, double>>;

void emit_analysis(const Globals& g, const Quantities& q, double rho, std::ostream& out) {
  fs::create_directories(g.out);
  {
    auto f = open_out(g.out / "analysis.csv");
    write_quantities_csv(f, q);
  }
  write_quantities_csv(out, q);
  out << stability_verdict(rho) << '\n';
}

void add_contraction(const ContractionMatrices& c, int iters, Quantities& q, double& rho) {
  rho = companion_spectral_radius(c.delta, c.tau);
  q.emplace_back("alpha", c.alpha());
  q.emplace_back("beta", c.beta());
  q.emplace_back("zeta", c.zeta());
  q.emplace_back("gamma", c.gamma());
  q.emplace_back("rho_delta", spectral_radius(c.delta));
  q.emplace_back("rho_delta_hat", rho);
  q.emplace_back("rho_delta_hat_eigensolver", spectral_radius(c.delta_hat));
  const RecursionEnvelope env = simulate_recursion(c.delta_hat, Vector::Ones(4), iters);
  q.emplace_back("steps_to_1e-6", env.steps_to_fraction(1e-6));
}

int cmd_momentum(const Globals& g, const MomentumArgs& a, std::ostream& out) {
  RipProfile rip = RipProfile::from_order4(a.delta_4k, a.delta_4s, a.joint);
  if (a.delta_3k >= 0.0) rip.delta_3k = a.delta_3k;
  if (a.delta_3s >= 0.0) rip.delta_3s = a.delta_3s;
  const ContractionMatrices c = theorem2_contraction(rip, g.tau);
  Quantities q{{"delta_3k", rip.delta_3k},
               {"delta_4k", rip.delta_4k},
               {"delta_3s", rip.delta_3s},
               {"delta_4s", rip.delta_4s},
               {"delta_3k3s", rip.delta_joint_3k3s},
               {"delta_3k4s", rip.delta_joint_3k4s},
               {"tau", g.tau}};
  double rho = 0.0;
  add_contraction(c, a.iters, q, rho);
  emit_analysis(g, q, rho, out);
  return kExitOk;
}

int cmd_greedy(const Globals& g, const GreedyArgs& a, std::ostream& out) {
  const Theorem1Constants t = Theorem1Constants::published();
  const double rho = spectral_radius(t.coupling());
  const Vector floor = noise_floor(t, a.noise);
  Quantities q{{"rho_1L", t.rho_1L}, {"rho_1M", t.rho_1M}, {"rho_2L", t.rho_2L},
               {"rho_2M", t.rho_2M}, {"gamma_1", t.gamma_1}, {"gamma_2", t.gamma_2},
               {"noise_norm", a.noise}, {"rho", rho},
               {"floor_L", floor(0)}, {"floor_M", floor(1)}};
  emit_analysis(g, q, rho, out);
  return kExitOk;
}

int cmd_rip(const Globals& g, const RipArgs& a, std::ostream& out) {
  const std::uint64_t op_seed = mix_seed(g.seed, 3);
  MeasurementOperator op;
  if (a.observe == "mask") {
    op = make_mask_operator(a.rows, a.cols, a.fraction, op_seed);
  } else if (a.observe == "identity") {
    op = make_identity_operator(a.rows, a.cols);
  } else {
    op = make_gaussian_operator(a.rows, a.cols,
                                a.measurements > 0 ? a.measurements : a.rows * a.cols / 2, op_seed);
  }
  const RipProfile rip = estimate_rip_profile(op, a.rank, a.sparsity, a.trials, g.seed);
  Quantities q{{"delta_3k", rip.delta_3k},
               {"delta_4k", rip.delta_4k},
               {"delta_3s", rip.delta_3s},
               {"delta_4s", rip.delta_4s},
               {"delta_3k3s", rip.delta_joint_3k3s},
               {"delta_3k4s", rip.delta_joint_3k4s},
               {"cross_s_k", estimate_cross_rip(op, a.sparsity, a.rank, a.trials, g.seed)},
               {"tau", g.tau}};
  double rho = std::numeric_limits<double>::infinity();
  const bool violated = rip_violated(rip.delta_3k) || rip_violated(rip.delta_4k) ||
                        rip_violated(rip.delta_3s) || rip_violated(rip.delta_4s) ||
                        rip_violated(rip.delta_joint_3k3s) || rip_violated(rip.delta_joint_3k4s);
  if (!violated) add_contraction(theorem2_contraction(rip, g.tau), 2000, q, rho);
  emit_analysis(g, q, rho, out);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Low-rank plus sparse recovery: instance generation, solvers, benchmarks, analysis",
               "lrsp"};
  app.fallthrough();
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--eta", g.eta, "Relative-change stopping tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--max-iters", g.max_iters, "Iteration cap")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--tau", g.tau, "Momentum step (MatrixALPS)")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--projector", g.projector, "Rank-k projector")
      ->capture_default_str()
      ->check(CLI::IsMember({"exact", "randomized"}));
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  const auto formats = CLI::IsMember({"bin", "csv"});
  const auto solvers = CLI::IsMember({"alps", "sparcs", "matrix-alps"}, CLI::ignore_case);
  const auto observations = CLI::IsMember({"mask", "gaussian", "identity"});
  const auto references = CLI::IsMember({"rms", "max"});

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic problem directory");
  generate->add_option("--rows", gen.rows)->capture_default_str();
  generate->add_option("--cols", gen.cols)->capture_default_str();
  generate->add_option("--rank", gen.rank)->capture_default_str();
  generate->add_option("--sparsity", gen.sparsity)->capture_default_str();
  generate->add_option("--observe", gen.observe)->capture_default_str()->check(observations);
  generate->add_option("--fraction", gen.fraction, "Observed fraction (mask)")->capture_default_str();
  generate->add_option("--measurements", gen.measurements, "p (gaussian; default mn/2)");
  generate->add_option("--noise", gen.noise, "Noise norm")->capture_default_str();
  generate->add_option("--sparse-scale", gen.sparse_scale, "Gross entry scale relative to L*")
      ->capture_default_str();
  generate->add_option("--sparse-ref", gen.sparse_ref, "rms: RMS entry of L*, max: max |L*_ij|")
      ->capture_default_str()
      ->check(references);

  SolveArgs sol;
  auto* solve = app.add_subcommand("solve", "Run a solver on a problem directory");
  solve->add_option("--problem", sol.problem, "Problem directory")->required();
  solve->add_option("--solver", sol.solver)->capture_default_str()->check(solvers);
  solve->add_option("--rank", sol.rank, "Override the rank budget");
  solve->add_option("--sparsity", sol.sparsity, "Override the sparsity budget");
  solve->add_option("--format", sol.format)->capture_default_str()->check(formats);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Matrix completion benchmark");
  bench_cmd->add_option("--config", bench.configs, "m,n,k,noise[,s[,fraction]] (repeatable)")
      ->capture_default_str();
  bench_cmd->add_option("--solvers", bench.solvers)->capture_default_str()->delimiter(',')->check(solvers);
  bench_cmd->add_option("--reps", bench.reps)->capture_default_str()->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--timing", bench.timing, "Record wall-clock columns");

  RpcaArgs rp;
  auto* rpca = app.add_subcommand("rpca", "Low-rank plus sparse split of fully observed data");
  auto* input_opt = rpca->add_option("--input", rp.input, "Data matrix (csv/bin)");
  rpca->add_option("--frames", rp.frames, "Frame matrices, stacked as columns")
      ->excludes(input_opt);
  rpca->add_option("--rows", rp.rows, "Synthetic rows")->capture_default_str();
  rpca->add_option("--cols", rp.cols, "Synthetic cols")->capture_default_str();
  rpca->add_option("--rank", rp.rank)->capture_default_str();
  rpca->add_option("--sparsity", rp.sparsity)->capture_default_str();
  rpca->add_option("--noise", rp.noise, "Synthetic noise norm")->capture_default_str();
  rpca->add_option("--sparse-scale", rp.sparse_scale)->capture_default_str();
  rpca->add_option("--sparse-ref", rp.sparse_ref)->capture_default_str()->check(references);
  rpca->add_option("--solver", rp.solver)->capture_default_str()->check(solvers);
  rpca->add_option("--format", rp.format)->capture_default_str()->check(formats);
  rpca->add_flag("--timing", rp.timing, "Record wall-clock seconds");

  auto* analyze = app.add_subcommand("analyze", "Convergence analysis");
  analyze->require_subcommand(1);
  MomentumArgs t2;
  auto* momentum = analyze->add_subcommand("momentum", "Contraction of the momentum solver");
  momentum->add_option("--delta-4k", t2.delta_4k)->capture_default_str();
  momentum->add_option("--delta-4s", t2.delta_4s)->capture_default_str();
  momentum->add_option("--joint", t2.joint, "Joint rank/sparse constants")->capture_default_str();
  momentum->add_option("--delta-3k", t2.delta_3k, "Default: delta-4k");
  momentum->add_option("--delta-3s", t2.delta_3s, "Default: delta-4s");
  momentum->add_option("--iters", t2.iters, "Recursion steps to simulate")->capture_default_str();
  GreedyArgs t1;
  auto* greedy = analyze->add_subcommand("greedy", "Published coupling of the greedy solver");
  greedy->add_option("--noise", t1.noise, "Noise norm")->capture_default_str();
  RipArgs ra;
  auto* rip = analyze->add_subcommand("rip", "Monte-Carlo RIP lower bounds for an operator");
  rip->add_option("--rows", ra.rows)->capture_default_str();
  rip->add_option("--cols", ra.cols)->capture_default_str();
  rip->add_option("--observe", ra.observe)->capture_default_str()->check(observations);
  rip->add_option("--fraction", ra.fraction)->capture_default_str();
  rip->add_option("--measurements", ra.measurements, "p (gaussian; default mn/2)");
  rip->add_option("--rank", ra.rank)->capture_default_str();
  rip->add_option("--sparsity", ra.sparsity)->capture_default_str();
  rip->add_option("--trials", ra.trials)->capture_default_str()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) return cmd_generate(g, gen, out);
    if (*solve) return cmd_solve(g, sol, out);
    if (*bench_cmd) return cmd_bench(g, bench, out);
    if (*rpca) return cmd_rpca(g, rp, out);
    if (*momentum) return cmd_momentum(g, t2, out);
    if (*greedy) return cmd_greedy(g, t1, out);
    if (*rip) return cmd_rip(g, ra, out);
  } catch (const SolverFailure& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolverFailure;
  } catch (const ConvergenceError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolverFailure;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace lrsp::cli
