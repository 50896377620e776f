#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stowrl/environment.hpp"
#include "stowrl/policy_net.hpp"
#include "stowrl/replay_pool.hpp"

namespace stowrl {

/// The four experimental settings: {delayed, intermediate+delayed} reward
/// crossed with {no pool, pool}.
enum class Setting { DRWP, DRP, IRWP, IRP };

std::string to_string(Setting s);
Setting parse_setting(const std::string& s);
bool uses_pool(Setting s) noexcept;
bool uses_intermediate(Setting s) noexcept;

enum class PoolGranularity { samples, episodes };

struct TrainConfig {
  Setting setting = Setting::IRP;
  int episodes_per_problem = 200;
  int iterations = 4;
  int threshold_window = 20;
  int top_k = 50;
  double gamma = 0.99;
  double lr = 1e-3;
  std::uint64_t seed = 0;

  std::size_t pool_capacity = kDefaultPoolCapacity;
  PoolGranularity pool_granularity = PoolGranularity::samples;
  ThetaInit theta0_rule = ThetaInit::zero_step_plus_one;
  double theta0_constant = 0.0;
  bool center_advantages = false;
  std::vector<int> hidden_layers{128, 64, 32};
  Activation hidden_activation = Activation::relu;
  int max_mask_id = 6;

  /// Throws Error when the fields are inconsistent.
  void validate() const;
};

/// Agree/disagree probabilities for an observation.
using PolicyFn = std::function<std::array<double, 2>(std::span<const double>)>;

PolicyFn policy_of(const PolicyNet& net);

struct EpisodeResult {
  std::vector<TrajectorySample> samples;
  std::vector<ContainerRef> picks;  // realized loading sequence
  int total_shuffles = 0;
};

/// Play one episode from the state returned by `make_state`. Actions are
/// sampled from the policy when `sample_actions`, otherwise the likelier
/// action is taken (ties agree).
EpisodeResult run_episode(const std::function<EnvState()>& make_state, const PolicyFn& policy,
                          Rng& rng, bool sample_actions);

/// v = r_intermediate + r_final * gamma^t, t counted back from the last
/// sample (t = 0).
void discounted_returns(std::vector<TrajectorySample>& samples, double r_final, double gamma);

struct ProblemTrainState {
  double theta = 0.0;
  int best_shuffles = kNoBest;
  std::deque<int> recent_shuffles;
  int episodes_run = 0;
  ProblemPool pool;
};

/// theta <- min(theta, mean of the last `window` totals). Throws when fewer
/// than `window` totals are recorded.
double update_threshold(ProblemTrainState& state, int window);

struct EpisodeRecord {
  Setting setting = Setting::IRP;
  std::string problem_id;
  int iteration = 0;
  int episode = 0;
  int total_shuffles = 0;
  double theta = 0.0;
  int best_so_far = 0;
};

struct ProblemSummary {
  std::string problem_id;
  double theta0 = 0.0;
  double theta = 0.0;
  int best_shuffles = kNoBest;
  std::vector<double> theta_trajectory;  // after every episode
};

struct TrainMetrics {
  std::vector<EpisodeRecord> episodes;
  std::vector<ProblemSummary> problems;
};

struct TrainResult {
  PolicyNet net;
  TrainMetrics metrics;
};

TrainResult train(const std::vector<ProblemInstance>& problems, const TrainConfig& config);

/// Greedy (argmax) rollouts of `net`, one per env seed; returns the best
/// episode.
EpisodeResult evaluate_policy(const PolicyNet& net, const ProblemInstance& problem,
                              std::span<const std::uint64_t> env_seeds, int max_mask_id = 6);

void write_metrics_csv(const TrainMetrics& metrics, const std::filesystem::path& path);
std::string metrics_csv(const TrainMetrics& metrics);
TrainMetrics read_metrics_csv(const std::filesystem::path& path);

/// Deterministic 64-bit mixer used to derive per-episode environment seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace stowrl
