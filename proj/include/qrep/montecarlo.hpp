#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "qrep/solver.hpp"

namespace qrep {

struct SimConfig {
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  std::uint64_t step_cap = 1'000'000'000;
};

struct SimEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  // Set when the standard error is not meaningful (a single trial).
  std::string warning;
};

/// Samples trajectories of a fixed policy segment by segment: every idle
/// segment draws its own success, swaps draw against a. Each sampled step
/// goes through apply_wait / apply_swap and is looked up in the state space,
/// so a trajectory can never leave it unnoticed.
class Simulator {
 public:
  Simulator(const Mdp& mdp, const Policy& policy);

  // Waiting time of one trajectory from the all-idle state. Throws
  // NumericalError past `step_cap` steps or on a state outside the space.
  double run(std::mt19937_64& rng, std::uint64_t step_cap = 1'000'000'000);

 private:
  std::uint32_t wait_target(std::uint32_t s, std::uint64_t mask);
  std::uint32_t locate(const RepeaterState& state) const;

  const Mdp& mdp_;
  std::vector<Action> action_;
  std::vector<std::uint8_t> idle_;
  std::vector<bool> countdown_;
  std::vector<std::uint32_t> swap_success_;
  std::vector<std::uint32_t> swap_failure_;
  std::unordered_map<std::uint64_t, std::uint32_t> wait_cache_;
};

// One trajectory; convenience wrapper around Simulator.
double simulate_run(const Mdp& mdp, const Policy& policy, std::mt19937_64& rng,
                    std::uint64_t step_cap = 1'000'000'000);

// Mean and standard error over `trials` trajectories. Trial i draws from its
// own generator seeded from (seed, i), so the estimate depends only on the
// config.
SimEstimate estimate_waiting_time(const Mdp& mdp, const Policy& policy,
                                  const SimConfig& config);

// {"config_digest", "mean", "stderr", "trials", "seed", ...}
std::string estimate_json(const Mdp& mdp, const Policy& policy, const SimEstimate& est);

}  // namespace qrep
