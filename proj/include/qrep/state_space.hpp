#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "qrep/state.hpp"

namespace qrep {

/// Indexed set of states reachable from the all-idle state, terminal last.
/// Immutable once built.
class StateSpace {
 public:
  StateSpace(int segments, Model model, bool lumped,
             std::vector<RepeaterState> states);

  int segments() const { return segments_; }
  Model model() const { return model_; }
  // Whether mirror images are lumped into one canonical state.
  bool lumped() const { return lumped_; }

  std::size_t size() const { return states_.size(); }
  std::size_t num_nonterminal() const { return states_.size() - 1; }
  const RepeaterState& state(std::size_t i) const { return states_[i]; }
  const std::vector<RepeaterState>& states() const { return states_; }

  std::size_t initial() const { return initial_; }
  std::size_t terminal() const { return states_.size() - 1; }

  // Index of `s` (canonicalized first when lumped), if present.
  std::optional<std::size_t> index_of(const RepeaterState& s) const;
  // As index_of, but throws InvalidArgument when absent.
  std::size_t require_index(const RepeaterState& s) const;

 private:
  int segments_;
  Model model_;
  bool lumped_;
  std::vector<RepeaterState> states_;
  std::unordered_map<RepeaterState, std::size_t> index_;
  std::size_t initial_ = 0;
};

// Breadth-first closure from the all-idle state under every action and
// outcome. Throws InvalidArgument for segments < 1.
StateSpace enumerate_states(int segments, Model model, bool lumped = true);

// Fibonacci number with F(1) = F(2) = 1.
std::uint64_t fibonacci(int k);

// Size of the lumped no-CC state space including the terminal state:
// (F(2n+1) + F(n+2)) / 2.
std::uint64_t predicted_count(int segments);

}  // namespace qrep
