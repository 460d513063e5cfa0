#pragma once

#include <string>
#include <string_view>

#include "qrep/solver.hpp"

namespace qrep {

// {"n", "model", "states": [...]} with the terminal state last.
std::string state_space_json(const StateSpace& space);

// Per state, per action, the outcome list [target, probability, cost].
std::string mdp_dump_json(const Mdp& mdp);

// {state string: "wait" | "swap i"} over the non-terminal states.
std::string policy_json(const Mdp& mdp, const Policy& policy);

// Inverse of policy_json. Keys may name either mirror image of a state.
// States with a single admissible action may be omitted; every other
// non-terminal state must be present. Throws InvalidArgument on malformed
// input, unknown states or inadmissible actions.
Policy parse_policy_json(const Mdp& mdp, std::string_view text);
Policy load_policy_file(const Mdp& mdp, const std::string& path);

// {"params", "values": {state: v}, "policy", "residual", "iterations"}
std::string solution_json(const Mdp& mdp, const Solution& solution);

// 64-bit FNV-1a of `text` as 16 hex digits.
std::string digest_hex(std::string_view text);

}  // namespace qrep
