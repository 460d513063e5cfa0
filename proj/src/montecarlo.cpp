#include "qrep/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include <json.hpp>

#include "qrep/errors.hpp"
#include "qrep/io.hpp"

namespace qrep {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 64) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

}  // namespace

Simulator::Simulator(const Mdp& mdp, const Policy& policy) : mdp_(mdp) {
  check_policy(mdp, policy);
  const std::size_t count = mdp.num_nonterminal();
  action_.resize(count);
  idle_.resize(count);
  countdown_.resize(count);
  swap_success_.assign(count, 0);
  swap_failure_.assign(count, 0);
  for (std::size_t s = 0; s < count; ++s) {
    const RepeaterState& state = mdp.space().state(s);
    action_[s] = mdp.actions(s)[policy.choice[s]];
    idle_[s] = static_cast<std::uint8_t>(idle_count(state));
    countdown_[s] = state.has_countdown();
    if (action_[s].is_swap()) {
      const Model model = mdp.params().model;
      swap_success_[s] = locate(apply_swap(state, action_[s].boundary, true, model));
      swap_failure_[s] = locate(apply_swap(state, action_[s].boundary, false, model));
    }
  }
}

std::uint32_t Simulator::locate(const RepeaterState& state) const {
  const auto index = mdp_.space().index_of(state);
  if (!index) {
    throw NumericalError("trajectory reached '" + state.to_string() +
                         "', which is not in the state space");
  }
  return static_cast<std::uint32_t>(*index);
}

std::uint32_t Simulator::wait_target(std::uint32_t s, std::uint64_t mask) {
  const std::uint64_t key = (static_cast<std::uint64_t>(s) << 32) | mask;
  const auto it = wait_cache_.find(key);
  if (it != wait_cache_.end()) return it->second;
  const std::uint32_t next = locate(apply_wait(mdp_.space().state(s), mask));
  wait_cache_.emplace(key, next);
  return next;
}

double Simulator::run(std::mt19937_64& rng, std::uint64_t step_cap) {
  const double p = mdp_.params().p;
  const double a = mdp_.params().a;
  const double log_q = std::log1p(-p);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto terminal = static_cast<std::uint32_t>(mdp_.terminal());
  auto s = static_cast<std::uint32_t>(mdp_.initial());
  std::uint64_t steps = 0;
  double time = 0.0;
  while (s != terminal) {
    if (steps > step_cap) {
      throw NumericalError("trajectory exceeded " + std::to_string(step_cap) + " steps");
    }
    const Action action = action_[s];
    if (action.is_swap()) {
      ++steps;
      s = unit(rng) < a ? swap_success_[s] : swap_failure_[s];
      continue;
    }
    const int k = idle_[s];
    std::uint64_t mask = 0;
    if (p >= 1.0) {
      mask = (std::uint64_t{1} << k) - 1;
      ++steps;
      time += 1.0;
    } else if (!countdown_[s]) {
      // Only idle segments change, so all-fail steps are self loops: skip them.
      const double stay = std::exp(k * log_q);
      std::geometric_distribution<std::uint64_t> failures(1.0 - stay);
      const std::uint64_t skipped = failures(rng);
      steps += skipped + 1;
      time += static_cast<double>(skipped) + 1.0;
      // First success index i has probability q^i p / (1 - q^k).
      int first = static_cast<int>(std::floor(std::log1p(-unit(rng) * (1.0 - stay)) / log_q));
      first = std::min(std::max(first, 0), k - 1);
      mask = std::uint64_t{1} << first;
      for (int i = first + 1; i < k; ++i) {
        if (unit(rng) < p) mask |= std::uint64_t{1} << i;
      }
    } else {
      for (int i = 0; i < k; ++i) {
        if (unit(rng) < p) mask |= std::uint64_t{1} << i;
      }
      ++steps;
      time += 1.0;
    }
    s = wait_target(s, mask);
  }
  return time;
}

double simulate_run(const Mdp& mdp, const Policy& policy, std::mt19937_64& rng,
                    std::uint64_t step_cap) {
  Simulator sim(mdp, policy);
  return sim.run(rng, step_cap);
}

SimEstimate estimate_waiting_time(const Mdp& mdp, const Policy& policy,
                                  const SimConfig& config) {
  if (config.trials < 1) throw InvalidArgument("trials must be at least 1");
  Simulator sim(mdp, policy);
  std::vector<double> samples(config.trials);
  for (std::uint64_t i = 0; i < config.trials; ++i) {
    std::mt19937_64 rng(splitmix64(config.seed ^ splitmix64(i)));
    samples[i] = sim.run(rng, config.step_cap);
  }
  SimEstimate est;
  est.trials = config.trials;
  est.seed = config.seed;
  est.mean = pairwise_sum(samples) / static_cast<double>(config.trials);
  if (config.trials == 1) {
    est.warning = "single trial: standard error reported as 0";
    return est;
  }
  for (double& x : samples) x = (x - est.mean) * (x - est.mean);
  const double var = pairwise_sum(samples) / static_cast<double>(config.trials - 1);
  est.std_error = std::sqrt(var / static_cast<double>(config.trials));
  return est;
}

std::string estimate_json(const Mdp& mdp, const Policy& policy, const SimEstimate& est) {
  nlohmann::ordered_json config;
  config["n"] = mdp.segments();
  config["model"] = std::string(to_string(mdp.params().model));
  config["p"] = mdp.params().p;
  config["a"] = mdp.params().a;
  config["trials"] = est.trials;
  config["seed"] = est.seed;
  config["policy"] = nlohmann::ordered_json::parse(policy_json(mdp, policy));

  nlohmann::ordered_json out;
  out["config_digest"] = digest_hex(config.dump());
  out["mean"] = est.mean;
  out["stderr"] = est.std_error;
  out["trials"] = est.trials;
  out["seed"] = est.seed;
  out["n"] = mdp.segments();
  out["model"] = config["model"];
  out["p"] = mdp.params().p;
  out["a"] = mdp.params().a;
  if (!est.warning.empty()) out["warning"] = est.warning;
  return out.dump(2);
}

}  // namespace qrep
