#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qrep/state.hpp"

namespace qrep {

/// Physical parameters of the chain.
struct ModelParams {
  double p = 0.0;  // distribution success per attempt per segment
  double a = 0.0;  // swap success
  Model model = Model::NoCC;

  // Throws InvalidArgument unless 0 < p <= 1 and 0 < a <= 1.
  static ModelParams make(double p, double a, Model model);

  double q() const { return 1.0 - p; }
};

enum class ActionKind : std::uint8_t { Wait, Swap };

/// Wait for distribution, or swap the groups at entries (boundary, boundary+1),
/// 1-based, addressed in the state's canonical representative.
struct Action {
  ActionKind kind = ActionKind::Wait;
  int boundary = 0;

  static Action wait() { return {}; }
  static Action swap(int boundary) { return {ActionKind::Swap, boundary}; }

  bool is_swap() const { return kind == ActionKind::Swap; }

  // "wait" or "swap i"
  std::string to_string() const;
  static Action parse(std::string_view text);

  friend bool operator==(const Action&, const Action&) = default;
};

// Admissible actions: Wait (if any Idle or Countdown entry) first, then one
// Swap per adjacent Group pair in ascending boundary order. With `lumped`,
// a palindromic state keeps only the smaller of two mirror-equivalent swaps.
// Throws InvalidArgument for the terminal state.
std::vector<Action> available_actions(const RepeaterState& state,
                                      bool lumped = true);

// Sort key of a swap in preference order: smaller merged group first, then
// the pair closer to an end of the chain, then the smaller boundary. The
// first two components are mirror invariant.
struct SwapRank {
  int merged_size;
  int end_distance;
  int boundary;
  friend auto operator<=>(const SwapRank&, const SwapRank&) = default;
};
SwapRank swap_rank(const RepeaterState& state, int boundary);

// Preference rank of each action in `actions` (0 = most preferred): swaps in
// SwapRank order, then Wait.
std::vector<std::uint8_t> action_preference(const RepeaterState& state,
                                            const std::vector<Action>& actions);

// Wait step with a fixed success pattern: bit i of `success_mask` says
// whether the i-th Idle entry (left to right) distributed. Countdowns tick
// down at the same time; groups are unchanged.
RepeaterState apply_wait(const RepeaterState& state, std::uint64_t success_mask);

// Swap attempt at a 1-based boundary. On failure the two groups restart:
// immediately (NoCC) or as countdown waves away from the swapping station (CC).
RepeaterState apply_swap(const RepeaterState& state, int boundary, bool success,
                         Model model);

int idle_count(const RepeaterState& state);

/// One merged wait outcome: `multiplicity` success patterns, each with
/// `successes` of `trials` idle segments distributing.
struct WaitOutcome {
  RepeaterState state;
  int successes = 0;
  int trials = 0;
  int multiplicity = 1;
};

// All wait outcomes with their combinatorial weights, canonicalized and
// merged when `lumped`; sorted by state.
std::vector<WaitOutcome> wait_outcomes(const RepeaterState& state,
                                       bool lumped = true);

using StateDistribution = std::vector<std::pair<RepeaterState, double>>;

// Outcome distributions with zero-probability outcomes dropped.
StateDistribution wait_transition(const RepeaterState& state,
                                  const ModelParams& params, bool lumped = true);
StateDistribution swap_transition(const RepeaterState& state, int boundary,
                                  const ModelParams& params, bool lumped = true);

// (number of Group entries) + (segments inside Group entries); strictly
// decreases along every swap outcome.
int swap_potential(const RepeaterState& state);

}  // namespace qrep
