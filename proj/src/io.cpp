#include "qrep/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qrep/errors.hpp"

namespace qrep {

using nlohmann::ordered_json;

namespace {

ordered_json params_json(const Mdp& mdp) {
  ordered_json out;
  out["n"] = mdp.segments();
  out["p"] = mdp.params().p;
  out["a"] = mdp.params().a;
  out["model"] = std::string(to_string(mdp.params().model));
  return out;
}

ordered_json policy_object(const Mdp& mdp, const Policy& policy) {
  ordered_json out = ordered_json::object();
  for (std::size_t s = 0; s < mdp.num_nonterminal(); ++s) {
    out[mdp.space().state(s).to_string()] = mdp.actions(s)[policy.choice[s]].to_string();
  }
  return out;
}

}  // namespace

std::string state_space_json(const StateSpace& space) {
  ordered_json out;
  out["n"] = space.segments();
  out["model"] = std::string(to_string(space.model()));
  ordered_json states = ordered_json::array();
  for (const auto& s : space.states()) states.push_back(s.to_string());
  out["states"] = std::move(states);
  return out.dump(2);
}

std::string mdp_dump_json(const Mdp& mdp) {
  ordered_json out;
  out["params"] = params_json(mdp);
  out["num_states"] = mdp.num_states();
  out["constraints"] = mdp.constraint_count();
  ordered_json states = ordered_json::object();
  for (std::size_t s = 0; s < mdp.num_nonterminal(); ++s) {
    ordered_json actions = ordered_json::object();
    const auto list = mdp.actions(s);
    for (std::size_t k = 0; k < list.size(); ++k) {
      const TransitionView t = mdp.transition(s, k);
      ordered_json outcomes = ordered_json::array();
      for (std::size_t j = 0; j < t.targets.size(); ++j) {
        outcomes.push_back({mdp.space().state(t.targets[j]).to_string(), t.probs[j], t.cost});
      }
      actions[list[k].to_string()] = std::move(outcomes);
    }
    states[mdp.space().state(s).to_string()] = std::move(actions);
  }
  out["states"] = std::move(states);
  out["terminal"] = mdp.space().state(mdp.terminal()).to_string();
  return out.dump(2);
}

std::string policy_json(const Mdp& mdp, const Policy& policy) {
  check_policy(mdp, policy);
  return policy_object(mdp, policy).dump(2);
}

Policy parse_policy_json(const Mdp& mdp, std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("policy file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidArgument("policy JSON must be an object");

  const std::uint32_t unset = UINT32_MAX;
  Policy policy;
  policy.choice.assign(mdp.num_nonterminal(), unset);
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_string()) throw InvalidArgument("action for '" + key + "' must be a string");
    const RepeaterState state = RepeaterState::parse(key);
    const RepeaterState canon = canonicalize(state);
    const std::size_t s = mdp.space().require_index(canon);
    if (s == mdp.terminal()) throw InvalidArgument("terminal state '" + key + "' takes no action");
    Action action = Action::parse(value.get<std::string>());
    if (action.is_swap() && canon != state) {
      action.boundary = static_cast<int>(state.size()) - action.boundary;
    }
    const auto actions = mdp.actions(s);
    std::uint32_t found = unset;
    for (std::size_t k = 0; k < actions.size(); ++k) {
      if (actions[k] == action ||
          (action.is_swap() && canon.is_palindrome() &&
           actions[k] == Action::swap(static_cast<int>(canon.size()) - action.boundary))) {
        found = static_cast<std::uint32_t>(k);
      }
    }
    if (found == unset) {
      throw InvalidArgument("action '" + value.get<std::string>() +
                            "' not admissible in state '" + key + "'");
    }
    if (policy.choice[s] != unset && policy.choice[s] != found) {
      throw InvalidArgument("conflicting actions for state '" + canon.to_string() + "'");
    }
    policy.choice[s] = found;
  }
  for (std::size_t s = 0; s < policy.choice.size(); ++s) {
    if (policy.choice[s] != unset) continue;
    if (mdp.num_actions(s) != 1) {
      throw InvalidArgument("policy has no action for state '" +
                            mdp.space().state(s).to_string() + "'");
    }
    policy.choice[s] = 0;
  }
  return policy;
}

Policy load_policy_file(const Mdp& mdp, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read policy file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_policy_json(mdp, buf.str());
}

std::string solution_json(const Mdp& mdp, const Solution& solution) {
  ordered_json out;
  out["params"] = params_json(mdp);
  ordered_json values = ordered_json::object();
  for (std::size_t s = 0; s < solution.values.size(); ++s) {
    values[mdp.space().state(s).to_string()] = solution.values[s];
  }
  values[mdp.space().state(mdp.terminal()).to_string()] = 0.0;
  out["values"] = std::move(values);
  out["policy"] = policy_object(mdp, solution.policy);
  out["residual"] = solution.residual;
  out["iterations"] = solution.iterations;
  return out.dump(2);
}

std::string digest_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qrep
