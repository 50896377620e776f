#include "stowrl/baselines.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

namespace stowrl {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<MaskId> fill_masks(const ShipPlan& ship) {
  std::vector<MaskId> out;
  for (MaskId m : ship.slots)
    if (!m.empty()) out.push_back(m);
  return out;
}

// Removes c and returns its mask so the pick can be undone.
MaskId take(Yard& yard, ContainerRef c) {
  auto& st = yard.stacks[c.stack];
  const MaskId m = st[c.tier];
  st.erase(st.begin() + c.tier);
  return m;
}

void put_back(Yard& yard, ContainerRef c, MaskId m) {
  auto& st = yard.stacks[c.stack];
  st.insert(st.begin() + c.tier, m);
}

int min_completion(Yard& yard, const std::vector<MaskId>& masks, std::size_t pos,
                   int depth) {
  if (depth == 0 || pos >= masks.size()) return 0;
  int best = std::numeric_limits<int>::max();
  for (ContainerRef c : matching_candidates(yard, masks[pos])) {
    const int q = yard.height(c.stack) - 1 - c.tier;
    if (q >= best) continue;
    const MaskId m = take(yard, c);
    best = std::min(best, q + min_completion(yard, masks, pos + 1, depth - 1));
    put_back(yard, c, m);
  }
  return best;
}

}  // namespace

SolveResult random_policy(const ProblemInstance& problem, Rng& rng) {
  problem.require_feasible();
  const auto start = Clock::now();
  SolveResult r;
  Yard yard = problem.yard;
  for (MaskId m : fill_masks(problem.ship)) {
    const auto cands = matching_candidates(yard, m);
    std::uniform_int_distribution<std::size_t> pick(0, cands.size() - 1);
    const ContainerRef c = cands[pick(rng)];
    r.total_shuffles += pick_in_place(yard, c);
    r.plan.push_back(c);
    ++r.nodes_explored;
  }
  r.elapsed = Clock::now() - start;
  return r;
}

SolveResult lookahead(const ProblemInstance& problem, int k) {
  if (k < 0) throw Error("lookahead depth must be >= 0");
  problem.require_feasible();
  const auto start = Clock::now();
  SolveResult r;
  Yard yard = problem.yard;
  const auto masks = fill_masks(problem.ship);
  for (std::size_t pos = 0; pos < masks.size(); ++pos) {
    // Candidates arrive in ascending stack order, one per stack, so the
    // first strict minimum honours the stack-then-tier tie-break.
    ContainerRef best_ref{};
    int best_score = std::numeric_limits<int>::max();
    for (ContainerRef c : matching_candidates(yard, masks[pos])) {
      const int q = yard.height(c.stack) - 1 - c.tier;
      const MaskId m = take(yard, c);
      const int score = q + min_completion(yard, masks, pos + 1, k);
      put_back(yard, c, m);
      ++r.nodes_explored;
      if (score < best_score) {
        best_score = score;
        best_ref = c;
      }
    }
    r.total_shuffles += pick_in_place(yard, best_ref);
    r.plan.push_back(best_ref);
  }
  r.elapsed = Clock::now() - start;
  return r;
}

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const ProblemInstance& p, const ExactOptions& o)
      : problem_(p), opt_(o), yard_(p.yard), masks_(fill_masks(p.ship)) {
    // Track each container's original index so a partial plan can be keyed
    // by the set of removed containers.
    int next = 0;
    for (const auto& st : yard_.stacks) {
      ids_.emplace_back();
      for (std::size_t t = 0; t < st.size(); ++t) ids_.back().push_back(next++);
    }
    memo_enabled_ = opt_.memoize && next <= 64;
    plan_.reserve(masks_.size());
  }

  SolveResult run() {
    const auto start = Clock::now();
    // The 0-step greedy plan is the initial incumbent, so a budget-limited
    // search always returns a complete plan.
    SolveResult greedy = lookahead(problem_, 0);
    best_ = greedy.total_shuffles;
    best_plan_ = std::move(greedy.plan);
    dfs(0, 0, 0);
    SolveResult r;
    r.plan = best_plan_;
    r.total_shuffles = best_;
    r.nodes_explored = nodes_;
    r.optimal = !aborted_;
    r.elapsed = Clock::now() - start;
    return r;
  }

 private:
  struct Choice {
    ContainerRef ref;
    int cost;
  };

  static constexpr std::size_t kMemoCap = 4'000'000;

  void dfs(std::size_t pos, int acc, std::uint64_t removed) {
    if (aborted_) return;
    if (++nodes_ > opt_.node_budget) {
      aborted_ = true;
      return;
    }
    if (pos == masks_.size()) {
      if (acc < best_) {
        best_ = acc;
        best_plan_ = plan_;
      }
      return;
    }
    if (memo_enabled_ && pos > 0) {
      auto [it, inserted] = memo_.try_emplace(removed, acc);
      if (!inserted) {
        if (it->second <= acc) return;
        it->second = acc;
      } else if (memo_.size() > kMemoCap) {
        memo_.erase(it);
      }
    }

    std::vector<Choice> choices;
    for (ContainerRef c : matching_candidates(yard_, masks_[pos]))
      choices.push_back({c, yard_.height(c.stack) - 1 - c.tier});
    switch (opt_.order) {
      case BranchOrder::cheapest_first:
        std::stable_sort(choices.begin(), choices.end(),
                         [](const Choice& a, const Choice& b) { return a.cost < b.cost; });
        break;
      case BranchOrder::stack_ascending:
        break;
      case BranchOrder::stack_descending:
        std::reverse(choices.begin(), choices.end());
        break;
    }

    for (const Choice& ch : choices) {
      if (acc + ch.cost >= best_) continue;
      auto& idst = ids_[ch.ref.stack];
      const int id = idst[ch.ref.tier];
      const MaskId m = take(yard_, ch.ref);
      idst.erase(idst.begin() + ch.ref.tier);
      plan_.push_back(ch.ref);

      dfs(pos + 1, acc + ch.cost, removed | (std::uint64_t{1} << (id & 63)));

      plan_.pop_back();
      idst.insert(idst.begin() + ch.ref.tier, id);
      put_back(yard_, ch.ref, m);
      if (aborted_) return;
    }
  }

  const ProblemInstance& problem_;
  ExactOptions opt_;
  Yard yard_;
  std::vector<MaskId> masks_;
  std::vector<std::vector<int>> ids_;
  bool memo_enabled_ = false;
  std::unordered_map<std::uint64_t, int> memo_;
  std::vector<ContainerRef> plan_;
  std::vector<ContainerRef> best_plan_;
  int best_ = std::numeric_limits<int>::max();
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
};

}  // namespace

SolveResult exact_solve(const ProblemInstance& problem, const ExactOptions& options) {
  if (options.node_budget < 1) throw Error("exact_solve: node budget must be >= 1");
  problem.require_feasible();
  return BranchAndBound(problem, options).run();
}

SolveResult exact_solve(const ProblemInstance& problem, std::uint64_t node_budget) {
  ExactOptions o;
  o.node_budget = node_budget;
  return exact_solve(problem, o);
}

}  // namespace stowrl
