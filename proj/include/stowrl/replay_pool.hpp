#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "stowrl/environment.hpp"

namespace stowrl {

/// A single decision taken during an episode and its discounted return.
struct TrajectorySample {
  Observation observation;
  Action action = Action::agree;
  double r_intermediate = 0.0;
  double v = 0.0;

  friend bool operator==(const TrajectorySample&, const TrajectorySample&) = default;
};

struct PoolEntry {
  TrajectorySample sample;
  std::int64_t episode_id = 0;
  std::uint64_t insertion_seq = 0;
  double episode_reward = 0.0;
};

inline constexpr std::size_t kDefaultPoolCapacity = 5000;

/// Per-problem store of the highest-return samples from positively rewarded
/// episodes. Ordered by v descending, newer insertions first among equals;
/// eviction drops the lowest v, oldest first.
class ProblemPool {
 public:
  explicit ProblemPool(std::string problem_id = {},
                       std::size_t capacity = kDefaultPoolCapacity);

  /// Inserts every sample when `episode_final_reward > 0`; otherwise a no-op.
  /// Returns the number of samples accepted.
  std::size_t push_episode(std::int64_t episode_id, const std::vector<TrajectorySample>& samples,
                           double episode_final_reward);

  /// Up to k samples with the highest v, best first. Throws when k == 0.
  std::vector<TrajectorySample> top_k(std::size_t k) const;

  /// All pooled samples of the k best episodes (by final reward, newest
  /// first among equals), in insertion order.
  std::vector<TrajectorySample> top_k_episodes(std::size_t k) const;

  const std::string& problem_id() const noexcept { return problem_id_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  bool empty() const noexcept { return entries_.empty(); }

  /// Snapshot in ranking order.
  std::vector<PoolEntry> entries() const;

  /// Debug dump: one line per entry (v, action, episode, seq).
  void dump(const std::filesystem::path& path) const;

 private:
  struct Ranking {
    bool operator()(const PoolEntry& a, const PoolEntry& b) const noexcept {
      if (a.sample.v != b.sample.v) return a.sample.v > b.sample.v;
      return a.insertion_seq > b.insertion_seq;
    }
  };

  std::string problem_id_;
  std::size_t capacity_;
  std::uint64_t next_seq_ = 0;
  std::set<PoolEntry, Ranking> entries_;
};

}  // namespace stowrl
