#include "qrep/state_space.hpp"

#include "qrep/errors.hpp"
#include "qrep/mdp.hpp"

namespace qrep {

StateSpace::StateSpace(int segments, Model model, bool lumped,
                       std::vector<RepeaterState> states)
    : segments_(segments), model_(model), lumped_(lumped), states_(std::move(states)) {
  if (states_.empty() || !states_.back().is_terminal(segments_)) {
    throw InvalidArgument("state space must end with the terminal state");
  }
  index_.reserve(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (lumped_ && canonicalize(states_[i]) != states_[i]) {
      throw InvalidArgument("non-canonical state '" + states_[i].to_string() +
                            "' in lumped state space");
    }
    if (!index_.emplace(states_[i], i).second) {
      throw InvalidArgument("duplicate state '" + states_[i].to_string() + "'");
    }
  }
  const auto init = index_of(RepeaterState::all_idle(segments_));
  if (!init) throw InvalidArgument("state space lacks the all-idle state");
  initial_ = *init;
}

std::optional<std::size_t> StateSpace::index_of(const RepeaterState& s) const {
  auto it = index_.find(lumped_ ? canonicalize(s) : s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t StateSpace::require_index(const RepeaterState& s) const {
  if (auto i = index_of(s)) return *i;
  throw InvalidArgument("state '" + s.to_string() + "' is not in the " +
                        std::to_string(segments_) + "-segment " +
                        std::string(to_string(model_)) + " state space");
}

StateSpace enumerate_states(int segments, Model model, bool lumped) {
  if (segments < 1) {
    throw InvalidArgument("segment count must be >= 1, got " +
                          std::to_string(segments));
  }
  return build_structure(segments, model, lumped)->space;
}

std::uint64_t fibonacci(int k) {
  if (k < 1 || k > 93) throw InvalidArgument("fibonacci index out of range");
  std::uint64_t prev = 0, cur = 1;
  for (int i = 1; i < k; ++i) {
    const std::uint64_t next = prev + cur;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::uint64_t predicted_count(int segments) {
  if (segments < 1 || segments > 45) {
    throw InvalidArgument("segment count out of range: " + std::to_string(segments));
  }
  return (fibonacci(2 * segments + 1) + fibonacci(segments + 2)) / 2;
}

}  // namespace qrep
