#include "problem_dir.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lrsp/errors.hpp"
#include "lrsp/matrix_io.hpp"

namespace lrsp::cli {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kProblemFile = "problem.json";
constexpr const char* kObservationsFile = "observations.csv";
constexpr const char* kLowRankFile = "L_star.bin";
constexpr const char* kSparseFile = "M_star.bin";

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_observations(const fs::path& path, const SyntheticInstance& inst) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write " + path.string());
  const auto& y = inst.observations;
  switch (inst.op.kind()) {
    case OperatorKind::mask: {
      out << "row,col,value\n";
      const SupportSet& omega = inst.op.observed();
      for (Index i = 0; i < omega.size(); ++i) {
        const auto [r, c] = omega.entry(i);
        out << r << ',' << c << ',' << num17(y(i)) << '\n';
      }
      break;
    }
    case OperatorKind::identity:
      out << "row,col,value\n";
      for (Index i = 0; i < y.size(); ++i) {
        out << i / inst.params.cols << ',' << i % inst.params.cols << ',' << num17(y(i)) << '\n';
      }
      break;
    case OperatorKind::gaussian:
      out << "index,value\n";
      for (Index i = 0; i < y.size(); ++i) out << i << ',' << num17(y(i)) << '\n';
      break;
  }
}

// Rows of numeric fields; a non-numeric first line is taken as a header.
std::vector<std::vector<double>> read_numeric_csv(const fs::path& path, std::size_t fields) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        if (used != cell.size()) numeric = false;
      } catch (const std::logic_error&) {
        numeric = false;
      }
    }
    if (!numeric && lineno == 1) continue;
    if (!numeric || vals.size() != fields) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(fields) + " numeric fields");
    }
    rows.push_back(std::move(vals));
  }
  return rows;
}

Index as_index(double v, const fs::path& path) {
  if (v < 0 || v != static_cast<double>(static_cast<Index>(v))) {
    throw ParseError(path.string() + ": index " + num17(v) + " is not a nonnegative integer");
  }
  return static_cast<Index>(v);
}

}  // namespace

void write_problem_dir(const fs::path& dir, const SyntheticInstance& inst) {
  fs::create_directories(dir);
  const InstanceParams& p = inst.params;
  json op{{"kind", std::string(to_string(inst.op.kind()))}, {"p", inst.op.output_dim()}};
  if (inst.op.kind() == OperatorKind::mask) op["fraction"] = p.model.fraction;
  if (inst.op.kind() == OperatorKind::gaussian) op["seed"] = inst.op.seed();

  json doc{{"rows", p.rows},
           {"cols", p.cols},
           {"rank", p.rank},
           {"sparsity", p.sparsity},
           {"noise_norm", p.noise_norm},
           {"sparse_scale", p.sparse_scale},
           {"sparse_reference", p.sparse_reference == SparseScaleReference::max ? "max" : "rms"},
           {"seed", p.seed},
           {"operator", op},
           {"observations", kObservationsFile},
           {"low_rank_truth", kLowRankFile},
           {"sparse_truth", kSparseFile},
           {"fingerprint", hex64(inst.fingerprint())}};
  std::ofstream(dir / kProblemFile) << doc.dump(2) << '\n';
  write_observations(dir / kObservationsFile, inst);
  write_matrix(dir / kLowRankFile, inst.low_rank, MatrixFormat::bin);
  write_matrix(dir / kSparseFile, inst.sparse, MatrixFormat::bin);
}

LoadedProblem read_problem_dir(const fs::path& dir) {
  const fs::path meta = dir / kProblemFile;
  std::ifstream in(meta);
  if (!in) throw ParseError("cannot open " + meta.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(meta.string() + ": " + e.what());
  }

  LoadedProblem out;
  try {
    const Index rows = doc.at("rows").get<Index>();
    const Index cols = doc.at("cols").get<Index>();
    const json& op = doc.at("operator");
    const std::string kind = op.at("kind").get<std::string>();
    const fs::path obs_path = dir / doc.value("observations", std::string(kObservationsFile));
    if (rows < 1 || cols < 1) throw ParseError(meta.string() + ": invalid shape");

    if (kind == "gaussian") {
      const auto data = read_numeric_csv(obs_path, 2);
      const Index p = op.at("p").get<Index>();
      out.problem.op = make_gaussian_operator(rows, cols, p, op.at("seed").get<std::uint64_t>());
      out.problem.observations = ObservationVector::Zero(p);
      for (const auto& r : data) {
        const Index i = as_index(r[0], obs_path);
        if (i >= p) throw ParseError(obs_path.string() + ": index out of range");
        out.problem.observations(i) = r[1];
      }
    } else if (kind == "mask" || kind == "identity") {
      const auto data = read_numeric_csv(obs_path, 3);
      std::vector<std::pair<Index, double>> by_position;
      by_position.reserve(data.size());
      for (const auto& r : data) {
        const Index i = as_index(r[0], obs_path);
        const Index j = as_index(r[1], obs_path);
        if (i >= rows || j >= cols) {
          throw ParseError(obs_path.string() + ": entry (" + std::to_string(i) + "," +
                           std::to_string(j) + ") outside " + std::to_string(rows) + "x" +
                           std::to_string(cols));
        }
        by_position.emplace_back(i * cols + j, r[2]);
      }
      std::sort(by_position.begin(), by_position.end());
      std::vector<Index> linear;
      linear.reserve(by_position.size());
      for (const auto& [pos, v] : by_position) linear.push_back(pos);
      if (std::adjacent_find(linear.begin(), linear.end()) != linear.end()) {
        throw ParseError(obs_path.string() + ": duplicate entry");
      }
      ObservationVector y(static_cast<Index>(by_position.size()));
      for (std::size_t i = 0; i < by_position.size(); ++i) y(static_cast<Index>(i)) = by_position[i].second;
      if (kind == "identity") {
        if (y.size() != rows * cols) throw ParseError(obs_path.string() + ": incomplete data");
        out.problem.op = make_identity_operator(rows, cols);
      } else {
        out.problem.op = MeasurementOperator::mask(SupportSet::from_linear(rows, cols, linear));
      }
      out.problem.observations = std::move(y);
    } else {
      throw ParseError(meta.string() + ": unknown operator kind '" + kind + "'");
    }
    out.problem.rank = doc.value("rank", Index{1});
    out.problem.sparsity = doc.value("sparsity", Index{0});

    const fs::path lr = dir / doc.value("low_rank_truth", std::string(kLowRankFile));
    const fs::path sp = dir / doc.value("sparse_truth", std::string(kSparseFile));
    if (fs::exists(lr) && fs::exists(sp)) {
      out.truth = GroundTruth{read_matrix(lr), read_matrix(sp)};
    }
  } catch (const json::exception& e) {
    throw ParseError(meta.string() + ": " + e.what());
  }
  return out;
}

}  // namespace lrsp::cli
