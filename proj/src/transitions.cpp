#include "qrep/transitions.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <charconv>

#include "qrep/errors.hpp"

namespace qrep {

ModelParams ModelParams::make(double p, double a, Model model) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw InvalidArgument("p must lie in (0, 1], got " + std::to_string(p));
  }
  if (!(a > 0.0 && a <= 1.0)) {
    throw InvalidArgument("a must lie in (0, 1], got " + std::to_string(a));
  }
  return ModelParams{p, a, model};
}

std::string Action::to_string() const {
  return is_swap() ? "swap " + std::to_string(boundary) : "wait";
}

Action Action::parse(std::string_view text) {
  if (text == "wait") return Action::wait();
  constexpr std::string_view prefix = "swap ";
  if (text.starts_with(prefix)) {
    int b = 0;
    const auto* first = text.data() + prefix.size();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, b);
    if (ec == std::errc() && ptr == last && b >= 1) return Action::swap(b);
  }
  throw InvalidArgument("bad action '" + std::string(text) +
                        "' (expected \"wait\" or \"swap i\")");
}

std::vector<Action> available_actions(const RepeaterState& state, bool lumped) {
  const int segments = state.segments();
  if (state.is_terminal(segments)) {
    throw InvalidArgument("terminal state has no actions");
  }
  std::vector<Action> out;
  if (state.has_idle() || state.has_countdown()) out.push_back(Action::wait());
  const int m = static_cast<int>(state.size());
  const bool palindrome = lumped && state.is_palindrome();
  for (int b = 1; b < m; ++b) {
    if (!state[b - 1].is_group() || !state[b].is_group()) continue;
    // Mirror of the pair (b, b+1) is (m-b, m-b+1).
    if (palindrome && b > m - b) continue;
    out.push_back(Action::swap(b));
  }
  return out;
}

SwapRank swap_rank(const RepeaterState& state, int boundary) {
  int start = 0;
  for (int i = 0; i < boundary - 1; ++i) start += state[i].width();
  const int merged = state[boundary - 1].width() + state[boundary].width();
  const int end = start + merged;
  return {merged, std::min(start, state.segments() - end), boundary};
}

std::vector<std::uint8_t> action_preference(const RepeaterState& state,
                                            const std::vector<Action>& actions) {
  std::vector<std::size_t> order(actions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const Action& ax = actions[x];
    const Action& ay = actions[y];
    if (ax.is_swap() != ay.is_swap()) return ax.is_swap();
    if (!ax.is_swap()) return false;
    return swap_rank(state, ax.boundary) < swap_rank(state, ay.boundary);
  });
  std::vector<std::uint8_t> rank(actions.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    rank[order[r]] = static_cast<std::uint8_t>(r);
  }
  return rank;
}

int idle_count(const RepeaterState& state) {
  int count = 0;
  for (std::size_t i = 0; i < state.size(); ++i) count += state[i].is_idle();
  return count;
}

RepeaterState apply_wait(const RepeaterState& state, std::uint64_t success_mask) {
  RepeaterState out;
  int idle_index = 0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const Entry e = state[i];
    switch (e.kind()) {
      case EntryKind::Idle:
        out.push_back((success_mask >> idle_index) & 1u ? Entry::group(1)
                                                        : Entry::idle());
        ++idle_index;
        break;
      case EntryKind::Group:
        out.push_back(e);
        break;
      case EntryKind::Countdown:
        out.push_back(e.value() > 1 ? Entry::countdown(e.value() - 1)
                                    : Entry::idle());
        break;
    }
  }
  return out;
}

RepeaterState apply_swap(const RepeaterState& state, int boundary, bool success,
                         Model model) {
  const int m = static_cast<int>(state.size());
  if (boundary < 1 || boundary >= m || !state[boundary - 1].is_group() ||
      !state[boundary].is_group()) {
    throw InvalidArgument("no adjacent group pair at boundary " +
                          std::to_string(boundary) + " of '" +
                          state.to_string() + "'");
  }
  const int left = state[boundary - 1].value();
  const int right = state[boundary].value();
  RepeaterState out;
  for (int i = 0; i < boundary - 1; ++i) out.push_back(state[i]);
  if (success) {
    out.push_back(Entry::group(left + right));
  } else if (model == Model::NoCC) {
    for (int i = 0; i < left + right; ++i) out.push_back(Entry::idle());
  } else {
    // Restart signals travel outward from the station between the groups.
    for (int d = left; d >= 1; --d) out.push_back(Entry::countdown(d));
    for (int d = 1; d <= right; ++d) out.push_back(Entry::countdown(d));
  }
  for (int i = boundary + 1; i < m; ++i) out.push_back(state[i]);
  return out;
}

std::vector<WaitOutcome> wait_outcomes(const RepeaterState& state, bool lumped) {
  const int trials = idle_count(state);
  if (trials > 62) throw InvalidArgument("too many idle segments");
  std::vector<WaitOutcome> raw;
  raw.reserve(std::size_t{1} << trials);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << trials); ++mask) {
    RepeaterState next = apply_wait(state, mask);
    if (lumped) next = canonicalize(next);
    raw.push_back({std::move(next), std::popcount(mask), trials, 1});
  }
  std::sort(raw.begin(), raw.end(),
            [](const WaitOutcome& x, const WaitOutcome& y) { return x.state < y.state; });
  std::vector<WaitOutcome> merged;
  for (auto& o : raw) {
    if (!merged.empty() && merged.back().state == o.state) {
      merged.back().multiplicity += o.multiplicity;
    } else {
      merged.push_back(std::move(o));
    }
  }
  return merged;
}

StateDistribution wait_transition(const RepeaterState& state,
                                  const ModelParams& params, bool lumped) {
  if (!state.has_idle() && !state.has_countdown()) {
    throw InvalidArgument("wait is not admissible in '" + state.to_string() + "'");
  }
  StateDistribution out;
  for (auto& o : wait_outcomes(state, lumped)) {
    const double prob = o.multiplicity * std::pow(params.p, o.successes) *
                        std::pow(params.q(), o.trials - o.successes);
    if (prob > 0.0) out.emplace_back(std::move(o.state), prob);
  }
  return out;
}

StateDistribution swap_transition(const RepeaterState& state, int boundary,
                                  const ModelParams& params, bool lumped) {
  StateDistribution out;
  RepeaterState merged = apply_swap(state, boundary, true, params.model);
  RepeaterState failed = apply_swap(state, boundary, false, params.model);
  if (lumped) {
    merged = canonicalize(merged);
    failed = canonicalize(failed);
  }
  out.emplace_back(std::move(merged), params.a);
  if (params.a < 1.0) out.emplace_back(std::move(failed), 1.0 - params.a);
  return out;
}

int swap_potential(const RepeaterState& state) {
  int phi = 0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i].is_group()) phi += 1 + state[i].value();
  }
  return phi;
}

}  // namespace qrep
