#include "stowrl/core_model.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace stowrl {

std::size_t Yard::container_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : stacks) n += s.size();
  return n;
}

bool Yard::valid(ContainerRef c) const noexcept {
  return c.stack >= 0 && c.stack < stack_count() && c.tier >= 0 &&
         c.tier < static_cast<int>(stacks[c.stack].size());
}

std::size_t ShipPlan::fill_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(slots.begin(), slots.end(), [](MaskId m) { return !m.empty(); }));
}

std::vector<int> ProblemInstance::deficient_masks() const {
  std::map<int, long> balance;
  for (const auto& s : yard.stacks)
    for (MaskId m : s) ++balance[m.value];
  for (MaskId m : ship.slots)
    if (!m.empty()) --balance[m.value];
  std::vector<int> out;
  for (auto [mask, b] : balance)
    if (mask != 0 && b < 0) out.push_back(mask);
  return out;
}

void ProblemInstance::require_feasible() const {
  auto deficient = deficient_masks();
  if (deficient.empty()) return;
  std::ostringstream os;
  os << "problem '" << id << "' is infeasible; insufficient yard supply for mask-ids";
  for (int m : deficient) os << ' ' << m;
  throw InfeasibleProblem(std::move(deficient), os.str());
}

int ProblemInstance::max_mask_id() const noexcept {
  int hi = 0;
  for (MaskId m : ship.slots) hi = std::max(hi, m.value);
  for (const auto& s : yard.stacks)
    for (MaskId m : s) hi = std::max(hi, m.value);
  return hi;
}

Yard make_yard(const std::vector<std::vector<int>>& stacks, int max_stack_height) {
  Yard y;
  y.max_stack_height = max_stack_height;
  y.stacks.reserve(stacks.size());
  for (const auto& s : stacks) {
    Stack st;
    st.reserve(s.size());
    for (int v : s) st.push_back(MaskId{v});
    y.stacks.push_back(std::move(st));
  }
  return y;
}

ShipPlan make_ship(const std::vector<int>& slots) {
  ShipPlan p;
  p.slots.reserve(slots.size());
  for (int v : slots) p.slots.push_back(MaskId{v});
  return p;
}

std::string to_string(ContainerRef c) {
  return "(" + std::to_string(c.stack) + "," + std::to_string(c.tier) + ")";
}

namespace {

void require_valid(const Yard& yard, ContainerRef c) {
  if (!yard.valid(c))
    throw InvalidReference("invalid container reference " + to_string(c));
}

}  // namespace

MaskId mask_of(const Yard& yard, ContainerRef c) {
  require_valid(yard, c);
  return yard.stacks[c.stack][c.tier];
}

int shuffle_count(const Yard& yard, ContainerRef c) {
  require_valid(yard, c);
  return yard.height(c.stack) - 1 - c.tier;
}

std::vector<ContainerRef> matching_candidates(const Yard& yard, MaskId slot_mask) {
  std::vector<ContainerRef> out;
  for (int s = 0; s < yard.stack_count(); ++s) {
    const auto& st = yard.stacks[s];
    for (int t = static_cast<int>(st.size()) - 1; t >= 0; --t) {
      if (st[t] == slot_mask) {
        out.push_back({s, t});
        break;
      }
    }
  }
  return out;
}

int pick_in_place(Yard& yard, ContainerRef c) {
  require_valid(yard, c);
  auto& st = yard.stacks[c.stack];
  const int cost = static_cast<int>(st.size()) - 1 - c.tier;
  st.erase(st.begin() + c.tier);
  return cost;
}

PickResult pick_container(const Yard& yard, ContainerRef c) {
  PickResult r{yard, 0};
  r.shuffle_cost = pick_in_place(r.yard, c);
  return r;
}

int uncovered_good(const Yard& yard, ContainerRef c, std::span<const MaskId> remaining) {
  require_valid(yard, c);
  const auto& st = yard.stacks[c.stack];
  int n = 0;
  for (int t = 0; t < c.tier; ++t) {
    if (std::find(remaining.begin(), remaining.end(), st[t]) != remaining.end()) ++n;
  }
  return std::min(n, kUncoverCap);
}

std::vector<std::size_t> fill_order(const ShipPlan& ship) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < ship.slots.size(); ++i)
    if (!ship.slots[i].empty()) idx.push_back(i);
  return idx;
}

int plan_cost(const ProblemInstance& problem, std::span<const ContainerRef> plan) {
  const auto order = fill_order(problem.ship);
  if (plan.size() != order.size()) {
    throw MaskMismatch(std::min(plan.size(), order.size()),
                       "plan has " + std::to_string(plan.size()) + " picks for " +
                           std::to_string(order.size()) + " non-empty slots");
  }
  Yard yard = problem.yard;
  int total = 0;
  for (std::size_t step = 0; step < plan.size(); ++step) {
    const MaskId want = problem.ship.slots[order[step]];
    const MaskId got = mask_of(yard, plan[step]);
    if (got != want) {
      throw MaskMismatch(step, "step " + std::to_string(step) + ": container " +
                                   to_string(plan[step]) + " has mask " +
                                   std::to_string(got.value) + ", slot " +
                                   std::to_string(order[step]) + " needs " +
                                   std::to_string(want.value));
    }
    total += pick_in_place(yard, plan[step]);
  }
  return total;
}

}  // namespace stowrl
