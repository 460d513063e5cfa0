#pragma once

// Reference computations that share no code with the solver.

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "qrep/mdp.hpp"
#include "qrep/solver.hpp"

namespace oracle {

// All entry sequences of n segments without countdowns, as text, with mirror
// images collapsed to the smaller string when `lumped`.
inline void compose(int left, std::vector<int>& parts, std::vector<std::vector<int>>& out) {
  if (left == 0) {
    out.push_back(parts);
    return;
  }
  parts.push_back(0);
  compose(left - 1, parts, out);
  parts.pop_back();
  for (int k = 1; k <= left; ++k) {
    parts.push_back(k);
    compose(left - k, parts, out);
    parts.pop_back();
  }
}

inline std::set<std::vector<int>> all_nocc_states(int n, bool lumped) {
  std::vector<std::vector<int>> raw;
  std::vector<int> parts;
  compose(n, parts, raw);
  std::set<std::vector<int>> out;
  for (auto& s : raw) {
    if (lumped) {
      std::vector<int> r(s.rbegin(), s.rend());
      out.insert(std::min(s, r));
    } else {
      out.insert(s);
    }
  }
  return out;
}

// Dense Gaussian elimination with partial pivoting on (I - Q) v = r.
inline std::vector<double> dense_evaluate(const qrep::Mdp& mdp, const qrep::Policy& policy) {
  const std::size_t n = mdp.num_nonterminal();
  std::vector<std::vector<double>> m(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t s = 0; s < n; ++s) {
    const auto t = mdp.transition(s, policy.choice[s]);
    m[s][s] += 1.0;
    m[s][n] = t.cost;
    for (std::size_t j = 0; j < t.targets.size(); ++j) {
      if (t.targets[j] < n) m[s][t.targets[j]] -= t.probs[j];
    }
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    }
    std::swap(m[c], m[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || m[r][c] == 0.0) continue;
      const double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k <= n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  std::vector<double> v(n);
  for (std::size_t s = 0; s < n; ++s) v[s] = m[s][n] / m[s][s];
  return v;
}

// Gauss-Seidel value iteration from zero; converges monotonically upward.
inline std::vector<double> value_iteration(const qrep::Mdp& mdp, double tol = 1e-13,
                                           int max_sweeps = 2000000) {
  const std::size_t n = mdp.num_nonterminal();
  std::vector<double> v(n, 0.0);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      double best = INFINITY;
      for (std::size_t k = 0; k < mdp.num_actions(s); ++k) {
        const auto t = mdp.transition(s, k);
        double q = t.cost, self = 0.0;
        for (std::size_t j = 0; j < t.targets.size(); ++j) {
          if (t.targets[j] == s) self += t.probs[j];
          else if (t.targets[j] < n) q += t.probs[j] * v[t.targets[j]];
        }
        best = std::min(best, q / (1.0 - self));
      }
      change = std::max(change, std::abs(best - v[s]) / std::max(1.0, best));
      v[s] = best;
    }
    if (change < tol) break;
  }
  return v;
}

inline double n2_closed_form(double p, double a) { return (3 - 2 * p) / (a * p * (2 - p)); }

}  // namespace oracle
