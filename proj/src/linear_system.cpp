#include "linear_system.hpp"

#include <Eigen/SparseCore>
#include <Eigen/UmfPackSupport>
#include <unsupported/Eigen/IterativeSolvers>

#include "qrep/errors.hpp"

namespace qrep::detail {

namespace {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using RowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

// Above this many unknowns Auto picks the Krylov route.
constexpr std::size_t kDirectLimit = 8000;
constexpr double kRefineGoal = 1e-15;

// Assembles I - Q_pi with state s stored at row/column position[s].
template <typename Matrix>
void assemble(const Mdp& mdp, const Policy& policy,
              const std::vector<std::uint32_t>& position, Matrix& matrix,
              Eigen::VectorXd& rhs) {
  const auto n = static_cast<int>(mdp.num_nonterminal());
  const auto terminal = static_cast<std::uint32_t>(mdp.terminal());
  std::vector<Eigen::Triplet<double, int>> entries;
  entries.reserve(mdp.structure().targets.size() / 2 + n);
  rhs.resize(n);
  for (int s = 0; s < n; ++s) {
    const TransitionView t = mdp.transition(s, policy.choice[s]);
    const int row = static_cast<int>(position[s]);
    rhs[row] = t.cost;
    entries.emplace_back(row, row, 1.0);
    for (std::size_t j = 0; j < t.targets.size(); ++j) {
      if (t.targets[j] == terminal) continue;
      entries.emplace_back(row, static_cast<int>(position[t.targets[j]]), -t.probs[j]);
    }
  }
  matrix.resize(n, n);
  matrix.setFromTriplets(entries.begin(), entries.end());
  matrix.makeCompressed();
}

template <typename Matrix>
double inf_norm(const Matrix& m) {
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(m.rows());
  for (int k = 0; k < m.outerSize(); ++k) {
    for (typename Matrix::InnerIterator it(m, k); it; ++it) {
      row_sums[it.row()] += std::abs(it.value());
    }
  }
  return row_sums.size() ? row_sums.maxCoeff() : 0.0;
}

template <typename Matrix>
double relative_residual(const Matrix& a, double a_norm, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& b) {
  const double scale = a_norm * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
  if (!x.allFinite()) return INFINITY;
  const Eigen::VectorXd r = b - a * x;
  return scale > 0 ? r.lpNorm<Eigen::Infinity>() / scale : 0.0;
}

// Upper-triangular solve with the matrix's own upper part.
class UpperSweepPreconditioner {
 public:
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

  UpperSweepPreconditioner() = default;
  template <typename M>
  explicit UpperSweepPreconditioner(const M& a) { compute(a); }

  template <typename M>
  UpperSweepPreconditioner& analyzePattern(const M&) { return *this; }
  template <typename M>
  UpperSweepPreconditioner& factorize(const M& a) {
    upper_ = a.template triangularView<Eigen::Upper>();
    return *this;
  }
  template <typename M>
  UpperSweepPreconditioner& compute(const M& a) { return factorize(a); }

  template <typename Rhs>
  Eigen::VectorXd solve(const Rhs& b) const {
    return upper_.triangularView<Eigen::Upper>().solve(b);
  }
  Eigen::ComputationInfo info() const { return Eigen::Success; }

 private:
  RowMatrix upper_;
};

Eigen::VectorXd solve_direct(const Mdp& mdp, const Policy& policy, double target,
                             LinearSolveInfo& info) {
  std::vector<std::uint32_t> identity(mdp.num_nonterminal());
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<std::uint32_t>(i);
  ColMatrix a;
  Eigen::VectorXd b;
  assemble(mdp, policy, identity, a, b);

  Eigen::UmfPackLU<ColMatrix> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    throw NumericalError("sparse LU factorization failed (singular policy system)");
  }
  const double a_norm = inf_norm(a);
  Eigen::VectorXd x = lu.solve(b);
  double current = relative_residual(a, a_norm, x, b);
  info.refinement_steps = 0;
  while (info.refinement_steps < 10 && current > kRefineGoal) {
    Eigen::VectorXd candidate = x + lu.solve(Eigen::VectorXd(b - a * x));
    const double next = relative_residual(a, a_norm, candidate, b);
    ++info.refinement_steps;
    if (!(next < current)) break;
    x = std::move(candidate);
    current = next;
  }
  info.relative_residual = current;
  info.backend = LinearBackend::Direct;
  if (!(current <= target)) {
    throw NumericalError("direct solve reached relative residual " +
                         std::to_string(current) + ", above " + std::to_string(target));
  }
  return x;
}

bool solve_krylov(const Mdp& mdp, const Policy& policy, double target,
                  LinearSolveInfo& info, const std::vector<double>* guess,
                  Eigen::VectorXd& out) {
  const auto& order = mdp.structure().sweep_order;
  std::vector<std::uint32_t> position(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) position[order[r]] = static_cast<std::uint32_t>(r);
  RowMatrix a;
  Eigen::VectorXd b;
  assemble(mdp, policy, position, a, b);

  const double a_norm = inf_norm(a);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(b.size());
  double current = INFINITY;
  if (guess && guess->size() == position.size()) {
    for (std::size_t s = 0; s < position.size(); ++s) y[position[s]] = (*guess)[s];
    current = relative_residual(a, a_norm, y, b);
  }
  info.refinement_steps = 0;
  // A longer restart is tried only when the short one stagnates.
  for (const int restart : {200, 500}) {
    Eigen::GMRES<RowMatrix, UpperSweepPreconditioner> gmres;
    gmres.set_restart(restart);
    gmres.setMaxIterations(3 * restart);
    gmres.setTolerance(1e-13);
    gmres.compute(a);
    // Restarting from the current iterate acts as a refinement step.
    for (int pass = 0; pass < 3 && current > 1e-13; ++pass) {
      Eigen::VectorXd candidate = gmres.solveWithGuess(b, y);
      const double next = relative_residual(a, a_norm, candidate, b);
      if (!(next < current)) break;
      if (current < INFINITY) ++info.refinement_steps;
      y = std::move(candidate);
      current = next;
    }
    if (current <= target) break;
  }
  if (!(current <= target)) return false;
  out.resize(y.size());
  for (std::size_t s = 0; s < position.size(); ++s) out[s] = y[position[s]];
  info.relative_residual = current;
  info.backend = LinearBackend::Krylov;
  return true;
}

}  // namespace

Eigen::VectorXd solve_policy_system(const Mdp& mdp, const Policy& policy,
                                    LinearBackend backend, double target,
                                    LinearSolveInfo& info,
                                    const std::vector<double>* guess) {
  if (backend == LinearBackend::Auto) {
    backend = mdp.num_nonterminal() > kDirectLimit ? LinearBackend::Krylov
                                                   : LinearBackend::Direct;
  }
  if (backend == LinearBackend::Krylov) {
    Eigen::VectorXd x;
    if (solve_krylov(mdp, policy, target, info, guess, x)) return x;
  }
  return solve_direct(mdp, policy, target, info);
}

}  // namespace qrep::detail
