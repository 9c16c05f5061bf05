#pragma once

// On-disk problem layout written by `lrsp generate` and read by `lrsp solve`:
//
//   problem.json      shape, budgets, operator description, seeds
//   observations.csv  mask/identity: row,col,value   gaussian: index,value
//   L_star.bin        planted components (optional; enable error tracking)
//   M_star.bin

#include <filesystem>
#include <optional>

#include "lrsp/instance.hpp"

namespace lrsp::cli {

struct LoadedProblem {
  ProblemSpec problem;
  std::optional<GroundTruth> truth;
};

void write_problem_dir(const std::filesystem::path& dir, const SyntheticInstance& inst);
LoadedProblem read_problem_dir(const std::filesystem::path& dir);

}  // namespace lrsp::cli
