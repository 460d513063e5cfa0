#include "qrep/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "linear_system.hpp"
#include "qrep/errors.hpp"

namespace qrep {

namespace {

constexpr double kSwitchThreshold = 1e-13;
constexpr double kTieTolerance = 1e-11;
constexpr double kDominanceTolerance = 1e-9;

}  // namespace

void check_policy(const Mdp& mdp, const Policy& policy) {
  if (policy.choice.size() != mdp.num_nonterminal()) {
    throw InvalidArgument("policy covers " + std::to_string(policy.choice.size()) +
                          " states, MDP has " +
                          std::to_string(mdp.num_nonterminal()));
  }
  for (std::size_t s = 0; s < policy.choice.size(); ++s) {
    if (policy.choice[s] >= mdp.num_actions(s)) {
      throw InvalidArgument("inadmissible action in state '" +
                            mdp.space().state(s).to_string() + "'");
    }
  }
}

namespace {

constexpr double kSolveTarget = 1e-10;
constexpr double kPolishTarget = 1e-12;

ValueVector evaluate_from(const Mdp& mdp, const Policy& policy, LinearSolveInfo* info,
                          LinearBackend backend, const ValueVector* guess,
                          double target = kSolveTarget) {
  check_policy(mdp, policy);
  LinearSolveInfo local;
  const Eigen::VectorXd x =
      detail::solve_policy_system(mdp, policy, backend, target, local, guess);
  if (info) *info = local;
  return ValueVector(x.data(), x.data() + x.size());
}

}  // namespace

ValueVector evaluate_policy(const Mdp& mdp, const Policy& policy,
                            LinearSolveInfo* info, LinearBackend backend) {
  return evaluate_from(mdp, policy, info, backend, nullptr);
}

double backup(const Mdp& mdp, const ValueVector& values, std::size_t s,
              std::size_t k) {
  const TransitionView t = mdp.transition(s, k);
  const std::size_t terminal = mdp.terminal();
  double sum = t.cost;
  for (std::size_t j = 0; j < t.targets.size(); ++j) {
    if (t.targets[j] != terminal) sum += t.probs[j] * values[t.targets[j]];
  }
  return sum;
}

double bellman_residual(const Mdp& mdp, const ValueVector& values) {
  double worst = 0.0;
  double scale = 1.0;
  for (std::size_t s = 0; s < mdp.num_nonterminal(); ++s) {
    double best = backup(mdp, values, s, 0);
    for (std::size_t k = 1; k < mdp.num_actions(s); ++k) {
      best = std::min(best, backup(mdp, values, s, k));
    }
    worst = std::max(worst, std::abs(values[s] - best));
    scale = std::max(scale, std::abs(values[s]));
  }
  return worst / scale;
}

Policy greedy_policy(const Mdp& mdp, const ValueVector& values) {
  Policy policy;
  policy.choice.resize(mdp.num_nonterminal());
  std::vector<double> q;
  for (std::size_t s = 0; s < mdp.num_nonterminal(); ++s) {
    const std::size_t count = mdp.num_actions(s);
    q.resize(count);
    double best = INFINITY;
    for (std::size_t k = 0; k < count; ++k) {
      q[k] = backup(mdp, values, s, k);
      best = std::min(best, q[k]);
    }
    const double slack = kTieTolerance * std::max(1.0, std::abs(best));
    const auto rank = mdp.preference(s);
    std::size_t chosen = count;
    for (std::size_t k = 0; k < count; ++k) {
      if (q[k] > best + slack) continue;
      if (chosen == count || rank[k] < rank[chosen]) chosen = k;
    }
    policy.choice[s] = static_cast<std::uint32_t>(chosen);
  }
  return policy;
}

Policy default_policy(const Mdp& mdp) {
  Policy policy;
  policy.choice.resize(mdp.num_nonterminal());
  for (std::size_t s = 0; s < mdp.num_nonterminal(); ++s) {
    const auto rank = mdp.preference(s);
    policy.choice[s] = static_cast<std::uint32_t>(
        std::min_element(rank.begin(), rank.end()) - rank.begin());
  }
  return policy;
}

Solution solve_optimal(const Mdp& mdp, const SolveOptions& options) {
  Policy policy = options.initial_policy ? *options.initial_policy : default_policy(mdp);
  check_policy(mdp, policy);
  ValueVector values;
  int iteration = 0;
  double target = kSolveTarget;
  for (;;) {
    if (iteration >= options.max_iterations) {
      throw NumericalError("policy iteration did not converge in " +
                           std::to_string(options.max_iterations) + " iterations");
    }
    ++iteration;
    LinearSolveInfo info;
    values = evaluate_from(mdp, policy, &info, options.backend,
                           values.empty() ? nullptr : &values, target);
    double v_max = 1.0;
    for (double v : values) v_max = std::max(v_max, std::abs(v));
    // Backups carry solve noise of order residual * |v|; never switch on it.
    const double noise = 8.0 * info.relative_residual * v_max;
    bool changed = false;
    for (std::size_t s = 0; s < mdp.num_nonterminal(); ++s) {
      const double current = backup(mdp, values, s, policy.choice[s]);
      double best = current;
      std::size_t best_k = policy.choice[s];
      for (std::size_t k = 0; k < mdp.num_actions(s); ++k) {
        const double candidate = backup(mdp, values, s, k);
        if (candidate < best) {
          best = candidate;
          best_k = k;
        }
      }
      const double margin =
          std::max(kSwitchThreshold * std::max(1.0, std::abs(current)), noise);
      if (best < current - margin) {
        policy.choice[s] = static_cast<std::uint32_t>(best_k);
        changed = true;
      }
    }
    if (changed) continue;
    // A loose solve can hide improvements below its noise; tighten once.
    if (target > kPolishTarget && bellman_residual(mdp, values) > options.tolerance) {
      target = kPolishTarget;
      continue;
    }
    break;
  }
  Solution solution;
  solution.residual = bellman_residual(mdp, values);
  solution.iterations = iteration;
  if (!(solution.residual <= options.tolerance)) {
    std::ostringstream msg;
    msg << "Bellman residual " << solution.residual << " above tolerance "
        << options.tolerance << " after " << iteration << " iterations";
    throw NumericalError(msg.str());
  }
  solution.policy = greedy_policy(mdp, values);
  solution.values = std::move(values);
  return solution;
}

std::string VerificationReport::summary() const {
  std::ostringstream out;
  out << (ok ? "ok" : "FAILED") << ": residual " << residual << ", "
      << policies_checked << " policies checked";
  for (const auto& v : violations) {
    out << "\n  state " << v.state << " policy " << v.policy_label
        << ": optimal " << v.optimal << " > " << v.policy_value;
  }
  return out.str();
}

VerificationReport verify_solution(const Mdp& mdp, const Solution& solution,
                                   int sample_policies, std::uint64_t seed,
                                   double tolerance) {
  VerificationReport report;
  report.residual = bellman_residual(mdp, solution.values);
  report.ok = report.residual <= tolerance;

  auto check = [&](const Policy& policy, const std::string& label) {
    const ValueVector v = evaluate_policy(mdp, policy);
    for (std::size_t s = 0; s < v.size(); ++s) {
      const double slack = kDominanceTolerance * std::max(1.0, std::abs(v[s]));
      if (solution.values[s] > v[s] + slack) {
        report.ok = false;
        report.violations.push_back({s, label, solution.values[s], v[s]});
      }
    }
    ++report.policies_checked;
  };

  check(solution.policy, "greedy");
  std::mt19937_64 rng(seed);
  for (int i = 0; i < sample_policies; ++i) {
    Policy random;
    random.choice.resize(mdp.num_nonterminal());
    for (std::size_t s = 0; s < random.choice.size(); ++s) {
      std::uniform_int_distribution<std::uint32_t> pick(
          0, static_cast<std::uint32_t>(mdp.num_actions(s) - 1));
      random.choice[s] = pick(rng);
    }
    check(random, "random#" + std::to_string(i));
  }
  return report;
}

double PolicyEnumerator::count(const Mdp& mdp) {
  double n = 1.0;
  for (std::size_t s = 0; s < mdp.num_nonterminal(); ++s) {
    n *= static_cast<double>(mdp.num_actions(s));
  }
  return n;
}

double PolicyEnumerator::log10_count(const Mdp& mdp) {
  double sum = 0.0;
  for (std::size_t s = 0; s < mdp.num_nonterminal(); ++s) {
    sum += std::log10(static_cast<double>(mdp.num_actions(s)));
  }
  return sum;
}

PolicyEnumerator::PolicyEnumerator(const Mdp& mdp, double cap) {
  const double total = count(mdp);
  if (total > cap) {
    std::ostringstream msg;
    msg << "policy count N = 10^" << log10_count(mdp) << " exceeds the cap " << cap;
    throw Intractable(msg.str());
  }
  size_ = static_cast<std::uint64_t>(total);
  radix_.resize(mdp.num_nonterminal());
  for (std::size_t s = 0; s < radix_.size(); ++s) {
    radix_[s] = static_cast<std::uint32_t>(mdp.num_actions(s));
  }
  current_.choice.assign(radix_.size(), 0);
}

bool PolicyEnumerator::next(Policy& out) {
  if (produced_ >= size_) return false;
  if (produced_ > 0) {
    for (std::size_t s = 0; s < radix_.size(); ++s) {
      if (++current_.choice[s] < radix_[s]) break;
      current_.choice[s] = 0;
    }
  }
  ++produced_;
  out = current_;
  return true;
}

}  // namespace qrep
