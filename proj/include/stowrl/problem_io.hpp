#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stowrl/core_model.hpp"

namespace stowrl {

inline constexpr int kProblemFormatVersion = 1;

/// Problem file: JSON object with `version`, `id`, `slots` (0 = EMPTY),
/// `yard` (stacks bottom to top, masks >= 1) and optional
/// `max_stack_height` (default 7). Throws FormatError.
ProblemInstance parse_problem(const std::string& text);
std::string serialize_problem(const ProblemInstance& problem);

ProblemInstance read_problem(const std::filesystem::path& path);
void write_problem(const ProblemInstance& problem, const std::filesystem::path& path);

/// Every `*.json` file of a directory, sorted by file name.
std::vector<ProblemInstance> read_problem_dir(const std::filesystem::path& dir);

}  // namespace stowrl
