#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "stowrl/core_model.hpp"

namespace stowrl {

using Rng = std::mt19937_64;

class EpisodeFinished : public Error {
 public:
  using Error::Error;
};

enum class Action : int { agree = 0, disagree = 1 };

enum class RewardMode { delayed_only, intermediate_and_delayed };

enum class ThetaInit {
  zero_step_plus_one,  // 0-step lookahead total + 1
  constant,
};

/// Fixed geometry of the observation vector. Problems larger than the layout
/// are rejected at reset.
struct ObsLayout {
  int stacks = 7;
  int height = 7;
  int slots = 23;

  int yard_cells() const noexcept { return stacks * height; }
  int size() const noexcept { return 2 * yard_cells() + 2 * slots; }
};

inline constexpr int kDefaultObservationSize = 144;

struct EnvConfig {
  double gamma = 0.99;
  ThetaInit theta0_rule = ThetaInit::zero_step_plus_one;
  double theta0_constant = 0.0;
  RewardMode reward_mode = RewardMode::intermediate_and_delayed;
  std::uint64_t rng_seed = 0;
  /// Divisor for mask-id entries. The effective scale is the larger of this
  /// and the problem's largest mask-id.
  int max_mask_id = 6;
  ObsLayout layout{};
};

/// Yard mask block (stack-major, tier-minor, zero padded) | proposed one-hot |
/// ship slot masks | target-slot one-hot.
using Observation = std::vector<double>;

struct EnvState {
  ShipPlan ship;  // filled slots are marked EMPTY
  Yard yard;      // consumed containers removed
  std::size_t target_slot = 0;
  ContainerRef proposed{};
  std::vector<ContainerRef> rejected;
  std::size_t steps_taken = 0;
  int shuffles_so_far = 0;
  bool done = false;

  RewardMode reward_mode = RewardMode::intermediate_and_delayed;
  ObsLayout layout{};
  double mask_scale = 1.0;
  Rng rng;
};

struct StepInfo {
  std::optional<ContainerRef> loaded;  // ref in the yard as it was before the pick
  int shuffle_cost = 0;
  bool forced = false;
};

struct StepOutcome {
  Observation observation;
  double r_intermediate = 0.0;
  bool done = false;
  StepInfo info;
};

/// Start an episode. Throws InfeasibleProblem, or DimensionError when the
/// problem does not fit the observation layout.
EnvState reset(const ProblemInstance& problem, const EnvConfig& config);

/// Uniform draw over the target slot's candidates not yet rejected.
ContainerRef propose(const EnvState& state, Rng& rng);

/// Agree loads the proposition; disagree rejects it. When every candidate of
/// the slot has been rejected the last one is force-loaded with zero
/// intermediate reward. Throws EpisodeFinished once done.
StepOutcome step(EnvState& state, Action action);

Observation encode(const EnvState& state);

/// Candidates for the current target that have not been rejected.
std::vector<ContainerRef> live_candidates(const EnvState& state);

/// Masks of unfilled slots after the current target.
std::vector<MaskId> upcoming_masks(const EnvState& state);

double intermediate_reward(int q, int u);

/// 2 for a strict new best, else 1 below the threshold, else -1.
double final_reward(int total_shuffles, double theta, int best_so_far);

inline constexpr int kNoBest = 1 << 30;

}  // namespace stowrl
