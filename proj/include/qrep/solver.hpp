#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrep/mdp.hpp"

namespace qrep {

/// Total map from non-terminal state index to an admissible action, stored as
/// the index into Mdp::actions(s).
struct Policy {
  std::vector<std::uint32_t> choice;

  friend bool operator==(const Policy&, const Policy&) = default;
};

// Expected remaining waiting time per non-terminal state; the terminal state
// is implicitly 0.
using ValueVector = std::vector<double>;

enum class LinearBackend {
  Auto,    // Direct for small systems, Krylov above a few thousand states
  Direct,  // sparse LU (UMFPACK) with iterative refinement
  Krylov,  // GMRES preconditioned by a sweep in transition order
};

/// Outcome of one sparse linear solve.
struct LinearSolveInfo {
  LinearBackend backend = LinearBackend::Direct;
  // ||b - A x||_inf / (||A||_inf ||x||_inf + ||b||_inf)
  double relative_residual = 0.0;
  int refinement_steps = 0;
};

// Throws InvalidArgument unless `policy` is total and admissible for `mdp`.
void check_policy(const Mdp& mdp, const Policy& policy);

// Solves (I - Q_pi) v = r_pi as a sparse linear system (never by inversion).
// Throws NumericalError if the system is singular or the relative residual
// stays above 1e-10.
ValueVector evaluate_policy(const Mdp& mdp, const Policy& policy,
                            LinearSolveInfo* info = nullptr,
                            LinearBackend backend = LinearBackend::Auto);

// One-step backup r + sum p v of the k-th action of state s.
double backup(const Mdp& mdp, const ValueVector& values, std::size_t s,
              std::size_t k);

// max_s |v_s - min_k backup(s, k)| / max(1, max_s |v_s|)
double bellman_residual(const Mdp& mdp, const ValueVector& values);

// Per state the minimizing action. Actions whose backup is within a relative
// 1e-11 of the minimum count as tied; ties go to the most preferred action
// (swaps before wait; among swaps smaller merged group, then closer to a
// chain end, then smaller boundary).
Policy greedy_policy(const Mdp& mdp, const ValueVector& values);

// The most preferred admissible action in every state.
Policy default_policy(const Mdp& mdp);

struct SolveOptions {
  double tolerance = 1e-10;
  int max_iterations = 200;
  LinearBackend backend = LinearBackend::Auto;
  // Warm start for policy iteration.
  std::optional<Policy> initial_policy;
};

struct Solution {
  ValueVector values;
  Policy policy;  // greedy w.r.t. values
  double residual = 0.0;
  int iterations = 0;
};

// Optimal values by policy iteration. An action is replaced only when the
// improvement exceeds 1e-13 relative, which rules out cycling on ties.
// Throws NumericalError on non-convergence or a residual above tolerance.
Solution solve_optimal(const Mdp& mdp, const SolveOptions& options = {});

struct DominanceViolation {
  std::size_t state = 0;
  std::string policy_label;
  double optimal = 0.0;
  double policy_value = 0.0;
};

struct VerificationReport {
  bool ok = true;
  double residual = 0.0;
  int policies_checked = 0;
  std::vector<DominanceViolation> violations;

  std::string summary() const;
};

// Checks the Bellman residual and v* <= v^pi (within 1e-9 relative) for the
// solution's greedy policy and `sample_policies` uniformly random policies.
VerificationReport verify_solution(const Mdp& mdp, const Solution& solution,
                                   int sample_policies, std::uint64_t seed = 1,
                                   double tolerance = 1e-10);

/// Lazily walks every policy once, in mixed-radix order over the states.
class PolicyEnumerator {
 public:
  static constexpr double kDefaultCap = 1e6;

  // Throws Intractable if the number of policies exceeds `cap`.
  explicit PolicyEnumerator(const Mdp& mdp, double cap = kDefaultCap);

  // Product of the per-state action counts, as a double (may be huge).
  static double count(const Mdp& mdp);
  // log10 of count(), exact for sizes beyond double range.
  static double log10_count(const Mdp& mdp);

  std::uint64_t size() const { return size_; }
  // Writes the next policy; false once all have been produced.
  bool next(Policy& out);

 private:
  std::vector<std::uint32_t> radix_;
  Policy current_;
  std::uint64_t size_ = 0;
  std::uint64_t produced_ = 0;
};

}  // namespace qrep
