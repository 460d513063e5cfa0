#include "qrep/named_policies.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <optional>

#include "qrep/errors.hpp"

namespace qrep {

namespace {

std::size_t index_of_action(const Mdp& mdp, std::size_t s, Action action) {
  const auto actions = mdp.actions(s);
  for (std::size_t k = 0; k < actions.size(); ++k) {
    if (actions[k] == action) return k;
  }
  // A palindrome keeps only one of two mirror-equivalent swaps.
  const RepeaterState& state = mdp.space().state(s);
  if (action.is_swap() && state.is_palindrome()) {
    const Action mirrored = Action::swap(static_cast<int>(state.size()) - action.boundary);
    for (std::size_t k = 0; k < actions.size(); ++k) {
      if (actions[k] == mirrored) return k;
    }
  }
  throw InvalidArgument("action '" + action.to_string() + "' not admissible in state '" +
                        state.to_string() + "'");
}

std::uint32_t most_preferred(const Mdp& mdp, std::size_t s) {
  const auto rank = mdp.preference(s);
  return static_cast<std::uint32_t>(std::min_element(rank.begin(), rank.end()) -
                                    rank.begin());
}

// Doubling action in a state whose groups all occupy dyadic blocks, or
// nothing if some group does not.
std::optional<Action> doubling_action(const RepeaterState& state) {
  std::vector<int> start(state.size());
  int pos = 0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    start[i] = pos;
    const Entry e = state[i];
    if (e.is_group()) {
      const int w = e.value();
      if (!std::has_single_bit(static_cast<unsigned>(w)) || pos % w != 0) return std::nullopt;
    }
    pos += e.width();
  }
  std::optional<Action> best;
  SwapRank best_rank{};
  for (std::size_t i = 1; i < state.size(); ++i) {
    const Entry l = state[i - 1];
    const Entry r = state[i];
    if (!l.is_group() || !r.is_group() || l.value() != r.value()) continue;
    if (start[i - 1] % (2 * l.value()) != 0) continue;
    const int b = static_cast<int>(i);
    const SwapRank rank = swap_rank(state, b);
    if (!best || rank < best_rank) {
      best = Action::swap(b);
      best_rank = rank;
    }
  }
  if (!best && (state.has_idle() || state.has_countdown())) return Action::wait();
  return best;
}

RepeaterState idle_shadow(const RepeaterState& state) {
  RepeaterState out;
  for (std::size_t i = 0; i < state.size(); ++i) {
    out.push_back(state[i].is_countdown() ? Entry::idle() : state[i]);
  }
  return out;
}

const std::map<std::string, std::string>& n4_table(SchemeKind which) {
  static const std::map<std::string, std::string> pi0 = {
      {"0011", "swap 3"}, {"0110", "wait"},   {"0111", "swap 3"}, {"1011", "swap 3"},
      {"1111", "swap 1"}, {"012", "wait"},    {"112", "swap 1"},  {"021", "swap 2"}};
  static const std::map<std::string, std::string> pi1 = [] {
    auto t = pi0;
    t["0110"] = "swap 2";
    return t;
  }();
  static const std::map<std::string, std::string> pi2 = [] {
    auto t = pi1;
    t["012"] = "swap 2";
    return t;
  }();
  switch (which) {
    case SchemeKind::Pi0: return pi0;
    case SchemeKind::Pi1: return pi1;
    case SchemeKind::Pi2: return pi2;
    default: throw InvalidArgument("not an n=4 table scheme");
  }
}

}  // namespace

SchemeId SchemeId::parse(std::string_view text) {
  if (text == "doubling") return {SchemeKind::Doubling, {}};
  if (text == "swap-asap" || text == "swap_asap") return {SchemeKind::SwapAsap, {}};
  if (text == "pi0") return {SchemeKind::Pi0, {}};
  if (text == "pi1") return {SchemeKind::Pi1, {}};
  if (text == "pi2") return {SchemeKind::Pi2, {}};
  if (text.starts_with("file=") && text.size() > 5) {
    return {SchemeKind::Custom, std::string(text.substr(5))};
  }
  throw InvalidArgument("unknown policy '" + std::string(text) +
                        "' (expected doubling, swap-asap, pi0, pi1, pi2 or file=PATH)");
}

std::string SchemeId::to_string() const {
  switch (kind) {
    case SchemeKind::Doubling: return "doubling";
    case SchemeKind::SwapAsap: return "swap-asap";
    case SchemeKind::Pi0: return "pi0";
    case SchemeKind::Pi1: return "pi1";
    case SchemeKind::Pi2: return "pi2";
    case SchemeKind::Custom: return "file=" + label;
  }
  return {};
}

Policy swap_asap_policy(const Mdp& mdp) {
  Policy policy;
  policy.choice.resize(mdp.num_nonterminal());
  for (std::size_t s = 0; s < policy.choice.size(); ++s) policy.choice[s] = most_preferred(mdp, s);
  return policy;
}

Policy doubling_policy(const Mdp& mdp) {
  const int n = mdp.segments();
  if (!std::has_single_bit(static_cast<unsigned>(n))) {
    throw InvalidArgument("doubling needs a power-of-two segment count, got " +
                          std::to_string(n));
  }
  Policy policy;
  policy.choice.resize(mdp.num_nonterminal());
  for (std::size_t s = 0; s < policy.choice.size(); ++s) {
    const auto action = doubling_action(mdp.space().state(s));
    policy.choice[s] = action ? static_cast<std::uint32_t>(index_of_action(mdp, s, *action))
                              : most_preferred(mdp, s);
  }
  return policy;
}

Policy builtin_policy_n4(SchemeKind which, const Mdp& mdp) {
  if (mdp.segments() != 4) {
    throw InvalidArgument("pi0/pi1/pi2 are defined for n=4 only, got n=" +
                          std::to_string(mdp.segments()));
  }
  const auto& table = n4_table(which);
  Policy policy;
  policy.choice.resize(mdp.num_nonterminal());
  for (std::size_t s = 0; s < policy.choice.size(); ++s) {
    const RepeaterState& state = mdp.space().state(s);
    const RepeaterState shadow = idle_shadow(state);
    const RepeaterState key = canonicalize(shadow);
    const auto it = table.find(key.to_string());
    if (it == table.end()) {
      if (mdp.num_actions(s) != 1) {
        throw InvalidArgument("no table entry for state '" + state.to_string() + "'");
      }
      policy.choice[s] = 0;
      continue;
    }
    Action action = Action::parse(it->second);
    if (action.is_swap() && key != shadow) {
      action.boundary = static_cast<int>(state.size()) - action.boundary;
    }
    policy.choice[s] = static_cast<std::uint32_t>(index_of_action(mdp, s, action));
  }
  return policy;
}

bool scheme_applies(const SchemeId& scheme, int segments) {
  switch (scheme.kind) {
    case SchemeKind::Doubling: return std::has_single_bit(static_cast<unsigned>(segments));
    case SchemeKind::Pi0:
    case SchemeKind::Pi1:
    case SchemeKind::Pi2: return segments == 4;
    default: return true;
  }
}

Policy scheme_policy(const Mdp& mdp, const SchemeId& scheme) {
  switch (scheme.kind) {
    case SchemeKind::Doubling: return doubling_policy(mdp);
    case SchemeKind::SwapAsap: return swap_asap_policy(mdp);
    case SchemeKind::Pi0:
    case SchemeKind::Pi1:
    case SchemeKind::Pi2: return builtin_policy_n4(scheme.kind, mdp);
    case SchemeKind::Custom: break;
  }
  throw InvalidArgument("scheme '" + scheme.to_string() + "' must be loaded from its file");
}

}  // namespace qrep
