#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stowrl/baselines.hpp"
#include "stowrl/core_model.hpp"
#include "stowrl/policy_net.hpp"
#include "stowrl/trainer.hpp"

namespace stowrl {

// ---------------------------------------------------------------------------
// Instance generation
// ---------------------------------------------------------------------------

struct GenSpec {
  int n_slots = 23;
  int n_fill = 15;
  int n_stacks = 7;
  int stack_height = 7;
  int n_mask_ids = 6;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Uniform slot positions and masks; a full yard of uniform masks repaired
/// so every mask has at least as many containers as slots. Deterministic per
/// seed.
ProblemInstance generate(const GenSpec& spec);

/// Instance i is generated with seed `spec.seed + i`.
std::vector<ProblemInstance> generate_batch(const GenSpec& spec, std::size_t count);
std::vector<ProblemInstance> generate_batch_serial(const GenSpec& spec, std::size_t count);

// ---------------------------------------------------------------------------
// Batch solving
// ---------------------------------------------------------------------------

enum class PolicyKind { random, lookahead, exact, checkpoint };

struct PolicySpec {
  PolicyKind kind = PolicyKind::exact;
  int k = 0;
  std::filesystem::path checkpoint;

  std::string name() const;
};

/// "random", "lookahead:<k>", "exact", "checkpoint:<path>" or a bare path to
/// a checkpoint file.
PolicySpec parse_policy(const std::string& text);

struct SolveOptions {
  std::uint64_t seed = 0;                      // random policy / env seeds
  std::uint64_t node_budget = kDefaultNodeBudget;
  int eval_episodes = 1;                       // checkpoint rollouts per instance
  int max_mask_id = 6;
};

/// Solve one instance. `index` keys the per-instance random streams so the
/// parallel and serial batch kernels agree.
SolveResult solve_with(const PolicySpec& policy, const ProblemInstance& problem,
                       std::size_t index, const SolveOptions& options,
                       const PolicyNet* net = nullptr);

/// OpenMP fan-out over instances.
std::vector<SolveResult> solve_batch(const PolicySpec& policy,
                                     const std::vector<ProblemInstance>& problems,
                                     const SolveOptions& options = {});
/// Reference loop with identical per-instance semantics.
std::vector<SolveResult> solve_batch_serial(const PolicySpec& policy,
                                            const std::vector<ProblemInstance>& problems,
                                            const SolveOptions& options = {});

// ---------------------------------------------------------------------------
// Evaluation tables
// ---------------------------------------------------------------------------

struct EvalRow {
  std::string policy_name;
  std::vector<int> totals;
  int lt_0step = 0, le_0step = 0, lt_1step = 0, le_1step = 0;
  int gt_optimal = 0, eq_optimal = 0;
  double pct_lt_0step = 0, pct_le_0step = 0;
  double pct_lt_1step = 0, pct_le_1step = 0;
  double pct_gt_optimal = 0, pct_eq_optimal = 0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::vector<int> zero_step;
  std::vector<int> one_step;
  std::vector<int> oracle;
  std::vector<bool> oracle_optimal;
  std::size_t excluded = 0;  // instances whose oracle did not finish
};

/// Run every policy over the test set and tabulate it against the 0-step,
/// 1-step and exact totals. Instances without a proven optimum are left out
/// of the optimality columns.
EvalReport evaluate(const std::vector<PolicySpec>& policies,
                    const std::vector<ProblemInstance>& testset, const SolveOptions& options = {});

/// Percentage columns from raw per-instance totals.
EvalRow tabulate(const std::string& name, const std::vector<int>& totals,
                 const std::vector<int>& zero_step, const std::vector<int>& one_step,
                 const std::vector<int>& oracle, const std::vector<bool>& oracle_optimal);

std::string format_table(const EvalReport& report);
std::string table_csv(const EvalReport& report);

// ---------------------------------------------------------------------------
// Plot data
// ---------------------------------------------------------------------------

struct PolicyBars {
  std::string problem_id;
  int random = 0;
  int zero_step = 0;
  int one_step = 0;
  int optimal = 0;
  std::optional<int> rl;
};

/// Minimum shuffle counts per problem: random is the best of `random_runs`
/// draws, RL comes from the training metrics when the problem appears there.
std::vector<PolicyBars> policy_bars(const std::vector<ProblemInstance>& problems,
                                    const TrainMetrics* metrics, int random_runs,
                                    const SolveOptions& options = {});

/// Writes threshold_<problem>.csv (episode,theta) per trained problem and
/// min_shuffles.csv. Returns the written paths.
std::vector<std::filesystem::path> emit_plots(const TrainMetrics& metrics,
                                              const std::vector<PolicyBars>& bars,
                                              const std::filesystem::path& out_dir);

}  // namespace stowrl
