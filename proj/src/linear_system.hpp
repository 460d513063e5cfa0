#pragma once

#include <vector>

#include <Eigen/Core>

#include "qrep/solver.hpp"

namespace qrep::detail {

// Solves (I - Q_pi) v = r_pi over the non-terminal states.
//
// Direct: UMFPACK LU with iterative refinement.
// Krylov: restarted GMRES on the system permuted into the structure's sweep
// order, right-preconditioned by its upper triangle (one backward sweep per
// application), starting from `guess` when given. Falls back to Direct if the
// residual target is missed.
Eigen::VectorXd solve_policy_system(const Mdp& mdp, const Policy& policy,
                                    LinearBackend backend, double target,
                                    LinearSolveInfo& info,
                                    const std::vector<double>* guess = nullptr);

}  // namespace qrep::detail
