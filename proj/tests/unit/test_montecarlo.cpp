#include <doctest.h>

#include <json.hpp>

#include "oracles.hpp"
#include "qrep/errors.hpp"
#include "qrep/montecarlo.hpp"
#include "qrep/named_policies.hpp"

using namespace qrep;

TEST_CASE("deterministic link") {
  const Mdp mdp = build_mdp(2, ModelParams::make(1.0, 1.0, Model::NoCC));
  SimConfig config;
  config.trials = 100;
  const SimEstimate est = estimate_waiting_time(mdp, default_policy(mdp), config);
  CHECK(est.mean == 1.0);
  CHECK(est.std_error == 0.0);
}

TEST_CASE("two segments at one half") {
  const Mdp mdp = build_mdp(2, ModelParams::make(0.5, 0.5, Model::NoCC));
  SimConfig config;
  config.trials = 200000;
  config.seed = 11;
  const SimEstimate est = estimate_waiting_time(mdp, default_policy(mdp), config);
  CHECK(std::abs(est.mean - 16.0 / 3.0) <= 3 * est.std_error);
  CHECK(est.std_error > 0.0);
  CHECK(est.trials == config.trials);
}

TEST_CASE("estimates track the exact value") {
  for (Model model : {Model::NoCC, Model::CC}) {
    const Mdp mdp = build_mdp(4, ModelParams::make(0.2, 0.5, model));
    const Policy policy = swap_asap_policy(mdp);
    const double exact = oracle::dense_evaluate(mdp, policy)[mdp.initial()];
    SimConfig config;
    config.trials = 50000;
    config.seed = 3;
    const SimEstimate est = estimate_waiting_time(mdp, policy, config);
    CHECK(std::abs(est.mean - exact) <= 3 * est.std_error);
  }
}

TEST_CASE("reproducible for a given seed") {
  const Mdp mdp = build_mdp(3, ModelParams::make(0.3, 0.6, Model::CC));
  const Policy policy = default_policy(mdp);
  SimConfig config;
  config.trials = 2000;
  config.seed = 42;
  const SimEstimate a = estimate_waiting_time(mdp, policy, config);
  const SimEstimate b = estimate_waiting_time(mdp, policy, config);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  config.seed = 43;
  CHECK(estimate_waiting_time(mdp, policy, config).mean != a.mean);
}

TEST_CASE("standard error shrinks like 1/sqrt(trials)") {
  const Mdp mdp = build_mdp(3, ModelParams::make(0.4, 0.5, Model::NoCC));
  const Policy policy = default_policy(mdp);
  SimConfig small;
  small.trials = 4000;
  SimConfig large = small;
  large.trials = 64000;
  const double ratio = estimate_waiting_time(mdp, policy, small).std_error /
                       estimate_waiting_time(mdp, policy, large).std_error;
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("single trial and caps") {
  const Mdp mdp = build_mdp(3, ModelParams::make(0.4, 0.5, Model::NoCC));
  SimConfig config;
  config.trials = 1;
  const SimEstimate est = estimate_waiting_time(mdp, default_policy(mdp), config);
  CHECK(est.std_error == 0.0);
  CHECK_FALSE(est.warning.empty());
  config.trials = 0;
  CHECK_THROWS_AS(estimate_waiting_time(mdp, default_policy(mdp), config), InvalidArgument);

  const Mdp slow = build_mdp(4, ModelParams::make(0.01, 0.01, Model::NoCC));
  config.trials = 10;
  config.step_cap = 5;
  CHECK_THROWS_AS(estimate_waiting_time(slow, default_policy(slow), config), NumericalError);
}

TEST_CASE("estimate JSON") {
  const Mdp mdp = build_mdp(2, ModelParams::make(0.5, 0.5, Model::CC));
  SimConfig config;
  config.trials = 10;
  config.seed = 5;
  const Policy policy = default_policy(mdp);
  const auto j = nlohmann::json::parse(estimate_json(mdp, policy, estimate_waiting_time(mdp, policy, config)));
  CHECK(j.at("config_digest").get<std::string>().size() == 16);
  CHECK(j.at("trials") == 10);
  CHECK(j.at("seed") == 5);
  CHECK(j.contains("mean"));
  CHECK(j.contains("stderr"));
}
