#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stowrl {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class for every error raised by the library. The CLI maps the
/// concrete subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidReference : public Error {
 public:
  using Error::Error;
};

class MaskMismatch : public Error {
 public:
  MaskMismatch(std::size_t step, const std::string& what)
      : Error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class InfeasibleProblem : public Error {
 public:
  InfeasibleProblem(std::vector<int> deficient, const std::string& what)
      : Error(what), deficient_(std::move(deficient)) {}
  const std::vector<int>& deficient_masks() const noexcept { return deficient_; }

 private:
  std::vector<int> deficient_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

/// Vector or layer width does not match what the consumer expects.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Property-combination code of a slot or container. Zero is EMPTY.
struct MaskId {
  int value = 0;

  constexpr bool empty() const noexcept { return value == 0; }
  friend constexpr bool operator==(MaskId, MaskId) = default;
  friend constexpr auto operator<=>(MaskId, MaskId) = default;
};

inline constexpr MaskId kEmpty{0};

/// Position of a container in the yard: stack index and tier (0 = bottom).
struct ContainerRef {
  int stack = 0;
  int tier = 0;

  friend constexpr bool operator==(ContainerRef, ContainerRef) = default;
  friend constexpr auto operator<=>(ContainerRef, ContainerRef) = default;
};

inline constexpr int kDefaultMaxStackHeight = 7;

using Stack = std::vector<MaskId>;

/// Stack-of-stacks container store. Each stack is ordered bottom to top.
struct Yard {
  std::vector<Stack> stacks;
  int max_stack_height = kDefaultMaxStackHeight;

  int stack_count() const noexcept { return static_cast<int>(stacks.size()); }
  int height(int stack) const { return static_cast<int>(stacks.at(stack).size()); }
  std::size_t container_count() const noexcept;
  bool valid(ContainerRef c) const noexcept;

  friend bool operator==(const Yard&, const Yard&) = default;
};

/// Ship slots in loading order. EMPTY slots are skipped.
struct ShipPlan {
  std::vector<MaskId> slots;

  std::size_t fill_count() const noexcept;
  friend bool operator==(const ShipPlan&, const ShipPlan&) = default;
};

struct ProblemInstance {
  std::string id;
  ShipPlan ship;
  Yard yard;

  /// Mask-ids whose yard supply is below slot demand, ascending. Empty when
  /// the instance is feasible.
  std::vector<int> deficient_masks() const;
  /// Throws InfeasibleProblem listing the deficient mask-ids.
  void require_feasible() const;
  int max_mask_id() const noexcept;

  friend bool operator==(const ProblemInstance&, const ProblemInstance&) = default;
};

/// Build a yard from plain integer stacks (bottom to top).
Yard make_yard(const std::vector<std::vector<int>>& stacks,
               int max_stack_height = kDefaultMaxStackHeight);
ShipPlan make_ship(const std::vector<int>& slots);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

MaskId mask_of(const Yard& yard, ContainerRef c);

/// Number of containers stacked above `c`.
int shuffle_count(const Yard& yard, ContainerRef c);

/// The topmost container matching `slot_mask` in each stack, in ascending
/// stack order. At most one ref per stack.
std::vector<ContainerRef> matching_candidates(const Yard& yard, MaskId slot_mask);

struct PickResult {
  Yard yard;
  int shuffle_cost = 0;
};

/// Remove `c`; the containers above it are restacked onto the same stack in
/// their original relative order. The input yard is untouched.
PickResult pick_container(const Yard& yard, ContainerRef c);

/// In-place variant of pick_container for search loops. Returns the cost.
int pick_in_place(Yard& yard, ContainerRef c);

inline constexpr int kUncoverCap = 6;

/// Containers strictly below `c` whose mask-id appears in `remaining`,
/// capped at kUncoverCap.
int uncovered_good(const Yard& yard, ContainerRef c, std::span<const MaskId> remaining);

/// Replay `plan` against a copy of the problem's yard and sum shuffle costs.
/// Throws MaskMismatch naming the offending step.
int plan_cost(const ProblemInstance& problem, std::span<const ContainerRef> plan);

/// Indices of non-EMPTY slots in loading order.
std::vector<std::size_t> fill_order(const ShipPlan& ship);

std::string to_string(ContainerRef c);

}  // namespace stowrl
