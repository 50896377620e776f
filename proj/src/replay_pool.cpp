#include "stowrl/replay_pool.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

namespace stowrl {

ProblemPool::ProblemPool(std::string problem_id, std::size_t capacity)
    : problem_id_(std::move(problem_id)), capacity_(capacity) {
  if (capacity_ == 0) throw Error("pool capacity must be >= 1");
}

std::size_t ProblemPool::push_episode(std::int64_t episode_id,
                                      const std::vector<TrajectorySample>& samples,
                                      double episode_final_reward) {
  if (!(episode_final_reward > 0.0)) return 0;
  for (const auto& s : samples) {
    if (!std::isfinite(s.v)) throw Error("pool sample has non-finite return");
    entries_.insert(PoolEntry{s, episode_id, next_seq_++, episode_final_reward});
    if (entries_.size() > capacity_) entries_.erase(std::prev(entries_.end()));
  }
  return samples.size();
}

std::vector<TrajectorySample> ProblemPool::top_k(std::size_t k) const {
  if (k == 0) throw Error("top_k requires k >= 1");
  std::vector<TrajectorySample> out;
  out.reserve(std::min(k, entries_.size()));
  for (const auto& e : entries_) {
    if (out.size() == k) break;
    out.push_back(e.sample);
  }
  return out;
}

std::vector<TrajectorySample> ProblemPool::top_k_episodes(std::size_t k) const {
  if (k == 0) throw Error("top_k_episodes requires k >= 1");
  struct EpisodeKey {
    double reward;
    std::uint64_t newest_seq;
  };
  std::map<std::int64_t, EpisodeKey> episodes;
  for (const auto& e : entries_) {
    auto [it, inserted] = episodes.try_emplace(e.episode_id, EpisodeKey{e.episode_reward, 0});
    it->second.newest_seq = std::max(it->second.newest_seq, e.insertion_seq);
  }
  std::vector<std::pair<std::int64_t, EpisodeKey>> ranked(episodes.begin(), episodes.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second.reward != b.second.reward) return a.second.reward > b.second.reward;
    return a.second.newest_seq > b.second.newest_seq;
  });
  if (ranked.size() > k) ranked.resize(k);

  std::vector<const PoolEntry*> picked;
  for (const auto& e : entries_) {
    const bool keep = std::any_of(ranked.begin(), ranked.end(),
                                  [&](const auto& r) { return r.first == e.episode_id; });
    if (keep) picked.push_back(&e);
  }
  std::sort(picked.begin(), picked.end(), [](const PoolEntry* a, const PoolEntry* b) {
    return a->insertion_seq < b->insertion_seq;
  });
  std::vector<TrajectorySample> out;
  out.reserve(picked.size());
  for (const PoolEntry* e : picked) out.push_back(e->sample);
  return out;
}

std::vector<PoolEntry> ProblemPool::entries() const {
  return {entries_.begin(), entries_.end()};
}

void ProblemPool::dump(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write pool dump " + path.string());
  out << "stowrl-pool 1\n";
  out << "problem " << problem_id_ << '\n';
  out << "entries " << entries_.size() << '\n';
  char buf[64];
  for (const auto& e : entries_) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, e.sample.v);
    out.write(buf, end - buf);
    out << ' ' << static_cast<int>(e.sample.action) << ' ' << e.episode_id << ' '
        << e.insertion_seq << '\n';
  }
}

}  // namespace stowrl
