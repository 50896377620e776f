#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "stowrl/core_model.hpp"
#include "stowrl/environment.hpp"

namespace stowrl {

struct SolveResult {
  std::vector<ContainerRef> plan;
  int total_shuffles = 0;
  std::uint64_t nodes_explored = 0;
  std::chrono::duration<double> elapsed{0};
  bool optimal = false;
};

/// Uniform choice among the matching candidates at every slot.
SolveResult random_policy(const ProblemInstance& problem, Rng& rng);

/// Greedy solve scoring each candidate by its shuffle cost plus the cheapest
/// completion of the next `k` non-empty slots. Ties go to the lower stack.
SolveResult lookahead(const ProblemInstance& problem, int k);

/// Order in which exact_solve descends into the candidates of a slot.
enum class BranchOrder {
  cheapest_first,  // immediate cost ascending, then stack index
  stack_ascending,
  stack_descending,
};

struct ExactOptions {
  std::uint64_t node_budget = 50'000'000;
  BranchOrder order = BranchOrder::cheapest_first;
  /// Skip a (slot, yard) state already reached at an equal or lower cost.
  bool memoize = true;
};

inline constexpr std::uint64_t kDefaultNodeBudget = 50'000'000;

/// Depth-first branch and bound over per-slot candidate choices. Branches
/// whose accumulated cost reaches the incumbent are pruned. `optimal` is set
/// only when the search finished inside the node budget.
SolveResult exact_solve(const ProblemInstance& problem, const ExactOptions& options = {});
SolveResult exact_solve(const ProblemInstance& problem, std::uint64_t node_budget);

}  // namespace stowrl
