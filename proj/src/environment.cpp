#include "stowrl/environment.hpp"

#include <algorithm>

namespace stowrl {

namespace {

void advance_target(EnvState& s) {
  while (s.target_slot < s.ship.slots.size() && s.ship.slots[s.target_slot].empty())
    ++s.target_slot;
  if (s.target_slot >= s.ship.slots.size() || s.yard.container_count() == 0) s.done = true;
}

void check_layout(const ProblemInstance& p, const ObsLayout& layout) {
  if (p.yard.stack_count() > layout.stacks)
    throw DimensionError("yard has " + std::to_string(p.yard.stack_count()) +
                         " stacks; observation layout holds " +
                         std::to_string(layout.stacks));
  for (const auto& st : p.yard.stacks)
    if (static_cast<int>(st.size()) > layout.height)
      throw DimensionError("stack height exceeds observation layout height " +
                           std::to_string(layout.height));
  if (static_cast<int>(p.ship.slots.size()) > layout.slots)
    throw DimensionError("ship has " + std::to_string(p.ship.slots.size()) +
                         " slots; observation layout holds " + std::to_string(layout.slots));
}

StepOutcome load(EnvState& s, ContainerRef c, bool forced) {
  const auto upcoming = upcoming_masks(s);
  const int q = shuffle_count(s.yard, c);
  const int u = uncovered_good(s.yard, c, upcoming);
  pick_in_place(s.yard, c);

  StepOutcome out;
  out.info.loaded = c;
  out.info.shuffle_cost = q;
  out.info.forced = forced;
  if (!forced && s.reward_mode == RewardMode::intermediate_and_delayed)
    out.r_intermediate = intermediate_reward(q, u);

  s.shuffles_so_far += q;
  s.ship.slots[s.target_slot] = kEmpty;
  s.rejected.clear();
  advance_target(s);
  if (!s.done) s.proposed = propose(s, s.rng);
  return out;
}

}  // namespace

EnvState reset(const ProblemInstance& problem, const EnvConfig& config) {
  problem.require_feasible();
  check_layout(problem, config.layout);

  EnvState s;
  s.ship = problem.ship;
  s.yard = problem.yard;
  s.reward_mode = config.reward_mode;
  s.layout = config.layout;
  s.mask_scale = std::max({config.max_mask_id, problem.max_mask_id(), 1});
  s.rng.seed(config.rng_seed);
  advance_target(s);
  if (!s.done) s.proposed = propose(s, s.rng);
  return s;
}

std::vector<ContainerRef> live_candidates(const EnvState& s) {
  auto c = matching_candidates(s.yard, s.ship.slots[s.target_slot]);
  std::erase_if(c, [&](ContainerRef r) {
    return std::find(s.rejected.begin(), s.rejected.end(), r) != s.rejected.end();
  });
  return c;
}

std::vector<MaskId> upcoming_masks(const EnvState& s) {
  std::vector<MaskId> out;
  for (std::size_t i = s.target_slot + 1; i < s.ship.slots.size(); ++i)
    if (!s.ship.slots[i].empty()) out.push_back(s.ship.slots[i]);
  return out;
}

ContainerRef propose(const EnvState& state, Rng& rng) {
  const auto live = live_candidates(state);
  if (live.empty()) throw Error("propose: no live candidates for the target slot");
  std::uniform_int_distribution<std::size_t> pick(0, live.size() - 1);
  return live[pick(rng)];
}

StepOutcome step(EnvState& s, Action action) {
  if (s.done) throw EpisodeFinished("step called on a finished episode");
  ++s.steps_taken;

  StepOutcome out;
  if (action == Action::agree) {
    out = load(s, s.proposed, false);
  } else {
    s.rejected.push_back(s.proposed);
    if (live_candidates(s).empty()) {
      out = load(s, s.rejected.back(), true);
    } else {
      s.proposed = propose(s, s.rng);
    }
  }
  out.done = s.done;
  out.observation = encode(s);
  return out;
}

Observation encode(const EnvState& s) {
  const ObsLayout& L = s.layout;
  Observation obs(static_cast<std::size_t>(L.size()), 0.0);
  const int yard_off = 0;
  const int prop_off = L.yard_cells();
  const int ship_off = 2 * L.yard_cells();
  const int target_off = ship_off + L.slots;

  for (int st = 0; st < s.yard.stack_count(); ++st) {
    const auto& stack = s.yard.stacks[st];
    for (int t = 0; t < static_cast<int>(stack.size()); ++t)
      obs[yard_off + st * L.height + t] = stack[t].value / s.mask_scale;
  }
  for (std::size_t i = 0; i < s.ship.slots.size(); ++i)
    obs[ship_off + i] = s.ship.slots[i].value / s.mask_scale;
  if (!s.done) {
    obs[prop_off + s.proposed.stack * L.height + s.proposed.tier] = 1.0;
    obs[target_off + s.target_slot] = 1.0;
  }
  return obs;
}

double intermediate_reward(int q, int u) {
  if (q == 0) return 0.1;
  if (q == 1 || q == 2) return 0.05 + 0.1 * u / 6.0;
  if (q == 3) return 0.1 * u / 6.0;
  return 0.0;
}

double final_reward(int total_shuffles, double theta, int best_so_far) {
  if (total_shuffles < best_so_far) return 2.0;
  if (total_shuffles < theta) return 1.0;
  return -1.0;
}

}  // namespace stowrl
