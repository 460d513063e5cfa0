#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "qrep/state_space.hpp"
#include "qrep/transitions.hpp"

namespace qrep {

/// Parameter-free description of one transition outcome. Its probability is
/// multiplicity * p^successes * q^(trials - successes) for wait outcomes,
/// a for a swap success and 1 - a for a swap failure.
struct OutcomeWeight {
  enum class Kind : std::uint8_t { Wait, SwapSuccess, SwapFailure };
  Kind kind = Kind::Wait;
  std::uint8_t successes = 0;
  std::uint8_t trials = 0;
  std::uint8_t multiplicity = 1;

  double probability(double p, double a) const;
};

/// State space, actions and transition supports for one (n, model); shared by
/// every Mdp instantiated from it.
struct MdpStructure {
  StateSpace space;
  // Actions of non-terminal state s: actions[action_offset[s] .. action_offset[s+1]).
  std::vector<std::uint32_t> action_offset;
  std::vector<Action> actions;
  // Tie-break rank of each action within its state, 0 = most preferred.
  std::vector<std::uint8_t> preference;
  // Outcomes of global action k: [outcome_offset[k] .. outcome_offset[k+1]).
  std::vector<std::uint32_t> outcome_offset;
  std::vector<std::uint32_t> targets;
  std::vector<OutcomeWeight> weights;
  // Non-terminal states sorted so that every outcome except a swap failure
  // lands on a later state (or on itself); used to precondition solves.
  std::vector<std::uint32_t> sweep_order;

  std::size_t constraint_count() const { return actions.size(); }
};

std::shared_ptr<const MdpStructure> build_structure(int segments, Model model,
                                                    bool lumped = true);

struct TransitionView {
  double cost = 0.0;
  std::span<const std::uint32_t> targets;
  std::span<const double> probs;
};

/// Repeater MDP for fixed (p, a). Immutable; cheap to share across threads.
class Mdp {
 public:
  Mdp(std::shared_ptr<const MdpStructure> structure, const ModelParams& params);

  const MdpStructure& structure() const { return *structure_; }
  std::shared_ptr<const MdpStructure> structure_ptr() const { return structure_; }
  const StateSpace& space() const { return structure_->space; }
  const ModelParams& params() const { return params_; }
  int segments() const { return space().segments(); }

  std::size_t num_states() const { return space().size(); }
  std::size_t num_nonterminal() const { return space().num_nonterminal(); }
  std::size_t initial() const { return space().initial(); }
  std::size_t terminal() const { return space().terminal(); }
  std::size_t constraint_count() const { return structure_->constraint_count(); }

  std::span<const std::uint8_t> preference(std::size_t s) const {
    const auto& off = structure_->action_offset;
    return {structure_->preference.data() + off[s], off[s + 1] - off[s]};
  }
  std::span<const Action> actions(std::size_t s) const {
    const auto& off = structure_->action_offset;
    return {structure_->actions.data() + off[s], off[s + 1] - off[s]};
  }
  std::size_t num_actions(std::size_t s) const {
    return structure_->action_offset[s + 1] - structure_->action_offset[s];
  }
  // Outcomes of the k-th action of state s; zero-probability outcomes omitted.
  TransitionView transition(std::size_t s, std::size_t k) const;

 private:
  std::shared_ptr<const MdpStructure> structure_;
  ModelParams params_;
  std::vector<std::uint32_t> outcome_offset_;
  std::vector<std::uint32_t> targets_;
  std::vector<double> probs_;
};

// Throws InvalidArgument for segments < 2 or p, a outside (0, 1].
Mdp build_mdp(int segments, const ModelParams& params, bool lumped = true);

}  // namespace qrep
