#pragma once

#include <string>
#include <string_view>

#include "qrep/solver.hpp"

namespace qrep {

enum class SchemeKind { Doubling, SwapAsap, Pi0, Pi1, Pi2, Custom };

/// Named comparison scheme. Custom carries a label (for files, the path).
struct SchemeId {
  SchemeKind kind = SchemeKind::SwapAsap;
  std::string label;

  // "doubling", "swap-asap" (or "swap_asap"), "pi0", "pi1", "pi2",
  // "file=PATH" (Custom with label PATH).
  static SchemeId parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const SchemeId&, const SchemeId&) = default;
};

// Swap whenever some adjacent pair is ready, picking the most preferred swap;
// otherwise wait.
Policy swap_asap_policy(const Mdp& mdp);

// Stationary doubling scheme for n = 2^d. A state whose groups all sit on
// dyadic blocks swaps a pair that fills a block, else waits. Other states
// (never reached under doubling) fall back to swap-asap.
// Throws InvalidArgument if n is not a power of two.
Policy doubling_policy(const Mdp& mdp);

// The three n = 4 action tables. Countdown entries are read as idle when
// looking up a CC state. Throws InvalidArgument unless n = 4 and `which` is
// Pi0, Pi1 or Pi2.
Policy builtin_policy_n4(SchemeKind which, const Mdp& mdp);

// Policy for a non-custom scheme.
Policy scheme_policy(const Mdp& mdp, const SchemeId& scheme);

// True if `scheme` is defined for this many segments.
bool scheme_applies(const SchemeId& scheme, int segments);

}  // namespace qrep
