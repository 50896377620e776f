#pragma once

// Test-only reference implementations. They operate on plain integer stacks
// and share no code with the library's yard mechanics.

#include <algorithm>
#include <limits>
#include <vector>

#include "stowrl/core_model.hpp"

namespace stowrl::oracle {

using IntYard = std::vector<std::vector<int>>;

inline IntYard to_ints(const Yard& y) {
  IntYard out;
  for (const auto& st : y.stacks) {
    out.emplace_back();
    for (MaskId m : st) out.back().push_back(m.value);
  }
  return out;
}

inline std::vector<int> fill_masks(const ProblemInstance& p) {
  std::vector<int> out;
  for (MaskId m : p.ship.slots)
    if (m.value != 0) out.push_back(m.value);
  return out;
}

/// Every candidate plan (topmost match per stack at each slot), visiting
/// callback(total) for each complete plan.
template <typename F>
void enumerate_plans(IntYard yard, const std::vector<int>& masks, std::size_t pos, int acc,
                     F&& on_plan) {
  if (pos == masks.size()) {
    on_plan(acc);
    return;
  }
  for (std::size_t s = 0; s < yard.size(); ++s) {
    int tier = -1;
    for (int t = static_cast<int>(yard[s].size()) - 1; t >= 0; --t)
      if (yard[s][t] == masks[pos]) {
        tier = t;
        break;
      }
    if (tier < 0) continue;
    IntYard next = yard;
    const int above = static_cast<int>(next[s].size()) - 1 - tier;
    next[s].erase(next[s].begin() + tier);
    enumerate_plans(std::move(next), masks, pos + 1, acc + above, on_plan);
  }
}

inline int brute_force_optimum(const ProblemInstance& p) {
  int best = std::numeric_limits<int>::max();
  enumerate_plans(to_ints(p.yard), fill_masks(p), 0, 0, [&](int total) { best = std::min(best, total); });
  return best;
}

inline std::size_t count_plans(const ProblemInstance& p) {
  std::size_t n = 0;
  enumerate_plans(to_ints(p.yard), fill_masks(p), 0, 0, [&](int) { ++n; });
  return n;
}

}  // namespace stowrl::oracle
