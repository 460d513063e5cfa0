#include "qrep/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "qrep/errors.hpp"

namespace qrep {

double OutcomeWeight::probability(double p, double a) const {
  switch (kind) {
    case Kind::Wait:
      return multiplicity * std::pow(p, successes) *
             std::pow(1.0 - p, trials - successes);
    case Kind::SwapSuccess:
      return a;
    case Kind::SwapFailure:
      return 1.0 - a;
  }
  return 0.0;
}

namespace {

// Segment stage: countdown(c) -> -c, idle -> 0, group -> 1. Waits never
// lower the stage sum, swap successes keep it and remove a group, swap
// failures lower it.
std::pair<int, int> sweep_key(const RepeaterState& s) {
  int stage = 0;
  int groups = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Entry e = s[i];
    if (e.is_group()) {
      stage += e.value();
      ++groups;
    } else if (e.is_countdown()) {
      stage -= e.value();
    }
  }
  return {stage, -groups};
}

struct Block {
  std::vector<Action> actions;
  std::vector<std::uint8_t> preference;
  // Per action: (discovery index, weight) pairs.
  std::vector<std::vector<std::pair<std::uint32_t, OutcomeWeight>>> outcomes;
};

}  // namespace

std::shared_ptr<const MdpStructure> build_structure(int segments, Model model,
                                                    bool lumped) {
  if (segments < 1) {
    throw InvalidArgument("segment count must be >= 1, got " +
                          std::to_string(segments));
  }
  if (segments > 20) {
    throw Intractable("state space for " + std::to_string(segments) +
                      " segments is too large");
  }

  std::vector<RepeaterState> found;
  std::unordered_map<RepeaterState, std::uint32_t> seen;
  auto intern = [&](RepeaterState s) -> std::uint32_t {
    auto [it, inserted] = seen.try_emplace(s, static_cast<std::uint32_t>(found.size()));
    if (inserted) found.push_back(std::move(s));
    return it->second;
  };

  intern(RepeaterState::all_idle(segments));
  std::vector<Block> blocks;
  std::size_t terminal_at = SIZE_MAX;
  // `found` doubles as the BFS queue: states are expanded in discovery order.
  for (std::size_t head = 0; head < found.size(); ++head) {
    const RepeaterState state = found[head];
    Block block;
    if (state.is_terminal(segments)) {
      terminal_at = head;
      blocks.push_back(std::move(block));
      continue;
    }
    block.actions = available_actions(state, lumped);
    block.preference = action_preference(state, block.actions);
    for (const Action& action : block.actions) {
      std::vector<std::pair<std::uint32_t, OutcomeWeight>> out;
      if (action.is_swap()) {
        RepeaterState ok = apply_swap(state, action.boundary, true, model);
        RepeaterState bad = apply_swap(state, action.boundary, false, model);
        if (lumped) {
          ok = canonicalize(ok);
          bad = canonicalize(bad);
        }
        out.emplace_back(intern(std::move(ok)),
                         OutcomeWeight{OutcomeWeight::Kind::SwapSuccess, 0, 0, 1});
        out.emplace_back(intern(std::move(bad)),
                         OutcomeWeight{OutcomeWeight::Kind::SwapFailure, 0, 0, 1});
      } else {
        for (auto& o : wait_outcomes(state, lumped)) {
          OutcomeWeight w{OutcomeWeight::Kind::Wait,
                          static_cast<std::uint8_t>(o.successes),
                          static_cast<std::uint8_t>(o.trials),
                          static_cast<std::uint8_t>(o.multiplicity)};
          out.emplace_back(intern(std::move(o.state)), w);
        }
      }
      block.outcomes.push_back(std::move(out));
    }
    blocks.push_back(std::move(block));
  }
  if (terminal_at == SIZE_MAX) {
    throw NumericalError("terminal state unreachable");
  }

  // Final order: discovery order with the terminal moved to the end.
  const auto total = static_cast<std::uint32_t>(found.size());
  auto remap = [&](std::uint32_t i) -> std::uint32_t {
    if (i == terminal_at) return total - 1;
    return i > terminal_at ? i - 1 : i;
  };

  std::vector<RepeaterState> ordered;
  ordered.reserve(total);
  struct {
    std::vector<std::uint32_t> action_offset, outcome_offset, targets;
    std::vector<Action> actions;
    std::vector<std::uint8_t> preference;
    std::vector<OutcomeWeight> weights;
  } st;
  st.action_offset.push_back(0);
  st.outcome_offset.push_back(0);
  for (std::uint32_t i = 0; i < total; ++i) {
    if (i == terminal_at) continue;
    ordered.push_back(std::move(found[i]));
    Block& block = blocks[i];
    for (std::size_t k = 0; k < block.actions.size(); ++k) {
      st.actions.push_back(block.actions[k]);
      st.preference.push_back(block.preference[k]);
      for (const auto& [target, weight] : block.outcomes[k]) {
        st.targets.push_back(remap(target));
        st.weights.push_back(weight);
      }
      st.outcome_offset.push_back(static_cast<std::uint32_t>(st.targets.size()));
    }
    st.action_offset.push_back(static_cast<std::uint32_t>(st.actions.size()));
  }
  ordered.push_back(std::move(found[terminal_at]));

  std::vector<std::uint32_t> sweep(total - 1);
  std::vector<std::pair<int, int>> keys(total - 1);
  for (std::uint32_t i = 0; i + 1 < total; ++i) {
    sweep[i] = i;
    keys[i] = sweep_key(ordered[i]);
  }
  std::stable_sort(sweep.begin(), sweep.end(),
                   [&](std::uint32_t x, std::uint32_t y) { return keys[x] < keys[y]; });
  return std::make_shared<const MdpStructure>(MdpStructure{
      StateSpace(segments, model, lumped, std::move(ordered)),
      std::move(st.action_offset), std::move(st.actions), std::move(st.preference),
      std::move(st.outcome_offset), std::move(st.targets), std::move(st.weights),
      std::move(sweep)});
}

Mdp::Mdp(std::shared_ptr<const MdpStructure> structure, const ModelParams& params)
    : structure_(std::move(structure)),
      params_(ModelParams::make(params.p, params.a, params.model)) {
  if (params_.model != structure_->space.model()) {
    throw InvalidArgument("model of parameters does not match the state space");
  }
  const auto& st = *structure_;
  outcome_offset_.reserve(st.outcome_offset.size());
  targets_.reserve(st.targets.size());
  probs_.reserve(st.targets.size());
  outcome_offset_.push_back(0);
  for (std::size_t k = 0; k + 1 < st.outcome_offset.size(); ++k) {
    for (std::uint32_t j = st.outcome_offset[k]; j < st.outcome_offset[k + 1]; ++j) {
      const double prob = st.weights[j].probability(params_.p, params_.a);
      if (prob > 0.0) {
        targets_.push_back(st.targets[j]);
        probs_.push_back(prob);
      }
    }
    outcome_offset_.push_back(static_cast<std::uint32_t>(targets_.size()));
  }
}

TransitionView Mdp::transition(std::size_t s, std::size_t k) const {
  const std::size_t g = structure_->action_offset[s] + k;
  const std::uint32_t begin = outcome_offset_[g];
  const std::uint32_t end = outcome_offset_[g + 1];
  const double cost = structure_->actions[g].is_swap() ? 0.0 : 1.0;
  return {cost,
          {targets_.data() + begin, end - begin},
          {probs_.data() + begin, end - begin}};
}

Mdp build_mdp(int segments, const ModelParams& params, bool lumped) {
  if (segments < 2) {
    throw InvalidArgument("an MDP needs at least 2 segments, got " +
                          std::to_string(segments));
  }
  const ModelParams checked = ModelParams::make(params.p, params.a, params.model);
  return Mdp(build_structure(segments, checked.model, lumped), checked);
}

}  // namespace qrep
