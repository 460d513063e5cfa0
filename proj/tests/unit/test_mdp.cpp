#include <doctest.h>

#include <map>

#include "oracles.hpp"
#include "qrep/errors.hpp"
#include "qrep/transitions.hpp"

using namespace qrep;

namespace {

std::map<std::string, double> as_map(const StateDistribution& d) {
  std::map<std::string, double> out;
  for (const auto& [s, prob] : d) out[s.to_string()] += prob;
  return out;
}

std::vector<std::string> action_names(const char* state) {
  std::vector<std::string> out;
  for (const auto& a : available_actions(RepeaterState::parse(state))) out.push_back(a.to_string());
  return out;
}

}  // namespace

TEST_CASE("admissible actions") {
  CHECK(action_names("0000") == std::vector<std::string>{"wait"});
  CHECK(action_names("012") == std::vector<std::string>{"wait", "swap 2"});
  CHECK(action_names("1111") == std::vector<std::string>{"swap 1", "swap 2"});
  CHECK(action_names("1(1)1") == std::vector<std::string>{"wait"});
  CHECK(action_names("0111") == std::vector<std::string>{"wait", "swap 2", "swap 3"});
  CHECK_THROWS_AS(available_actions(RepeaterState::parse("4")), InvalidArgument);
}

TEST_CASE("params validation") {
  CHECK_THROWS_AS(ModelParams::make(0.0, 0.5, Model::NoCC), InvalidArgument);
  CHECK_THROWS_AS(ModelParams::make(0.5, 0.0, Model::NoCC), InvalidArgument);
  CHECK_THROWS_AS(ModelParams::make(1.5, 0.5, Model::NoCC), InvalidArgument);
  CHECK(ModelParams::make(1.0, 1.0, Model::CC).q() == 0.0);
}

TEST_CASE("wait from two idle segments") {
  const double p = 0.3, q = 0.7;
  const auto d = as_map(wait_transition(RepeaterState::parse("00"), ModelParams::make(p, 0.5, Model::NoCC)));
  REQUIRE(d.size() == 3);
  CHECK(d.at("00") == doctest::Approx(q * q).epsilon(1e-15));
  CHECK(d.at("01") == doctest::Approx(2 * p * q).epsilon(1e-15));
  CHECK(d.at("11") == doctest::Approx(p * p).epsilon(1e-15));

  const auto det = as_map(wait_transition(RepeaterState::parse("0"), ModelParams::make(1.0, 0.5, Model::NoCC)));
  CHECK(det.size() == 1);
  CHECK(det.at("1") == 1.0);
}

TEST_CASE("countdowns tick during wait") {
  const double p = 0.4, q = 0.6;
  const auto d = as_map(wait_transition(RepeaterState::parse("00(1)(2)"), ModelParams::make(p, 0.5, Model::CC)));
  CHECK(d.at("110(1)") == doctest::Approx(p * p));
  CHECK(d.at("000(1)") == doctest::Approx(q * q));
  // 010(1) and 100(1) are distinct states: neither is a mirror of the other.
  CHECK(d.at("010(1)") == doctest::Approx(p * q));
  CHECK(d.at("100(1)") == doctest::Approx(p * q));
}

TEST_CASE("swap outcomes") {
  const auto nocc = ModelParams::make(0.5, 0.25, Model::NoCC);
  const auto cc = ModelParams::make(0.5, 0.25, Model::CC);
  auto d = as_map(swap_transition(RepeaterState::parse("11"), 1, nocc));
  CHECK(d.at("2") == doctest::Approx(0.25));
  CHECK(d.at("00") == doctest::Approx(0.75));

  CHECK(apply_swap(RepeaterState::parse("012"), 2, false, Model::CC).to_string() == "0(1)(1)(2)");
  CHECK(apply_swap(RepeaterState::parse("13"), 1, false, Model::CC).to_string() == "(1)(1)(2)(3)");
  CHECK(apply_swap(RepeaterState::parse("0110"), 2, false, Model::CC).to_string() == "0(1)(1)0");
  CHECK(apply_swap(RepeaterState::parse("0110"), 2, false, Model::NoCC).to_string() == "0000");
  CHECK(apply_swap(RepeaterState::parse("0110"), 2, true, Model::CC).to_string() == "020");
  CHECK(apply_swap(RepeaterState::parse("31"), 1, false, Model::CC).to_string() == "(3)(2)(1)(1)");

  d = as_map(swap_transition(RepeaterState::parse("13"), 1, cc));
  CHECK(d.at("(1)(1)(2)(3)") == doctest::Approx(0.75));
  CHECK(d.at("4") == doctest::Approx(0.25));
  CHECK_THROWS_AS(apply_swap(RepeaterState::parse("101"), 1, true, Model::NoCC), InvalidArgument);
}

TEST_CASE("mdp sizes") {
  const Mdp m2 = build_mdp(2, ModelParams::make(0.5, 0.5, Model::NoCC));
  CHECK(m2.num_nonterminal() == 3);
  CHECK(m2.constraint_count() == 3);
  const Mdp m4 = build_mdp(4, ModelParams::make(0.5, 0.5, Model::NoCC));
  CHECK(m4.num_nonterminal() == 20);
  CHECK(m4.constraint_count() == 29);
  const Mdp m8 = build_mdp(8, ModelParams::make(0.5, 0.5, Model::CC));
  CHECK(m8.num_nonterminal() == 6265);
  CHECK(m8.constraint_count() == 10922);
  CHECK_THROWS_AS(build_mdp(1, ModelParams::make(0.5, 0.5, Model::NoCC)), InvalidArgument);
}

TEST_CASE("transition rows are distributions and swaps lower the potential") {
  for (Model model : {Model::NoCC, Model::CC}) {
    for (auto [p, a] : {std::pair{0.3, 0.6}, {1.0, 0.5}, {0.2, 1.0}}) {
      const Mdp mdp = build_mdp(5, ModelParams::make(p, a, model));
      for (std::size_t s = 0; s < mdp.num_nonterminal(); ++s) {
        const auto& state = mdp.space().state(s);
        REQUIRE(mdp.num_actions(s) >= 1);
        for (std::size_t k = 0; k < mdp.num_actions(s); ++k) {
          const auto t = mdp.transition(s, k);
          double sum = 0.0;
          for (std::size_t j = 0; j < t.targets.size(); ++j) {
            CHECK(t.probs[j] > 0.0);
            sum += t.probs[j];
            if (mdp.actions(s)[k].is_swap()) {
              CHECK(swap_potential(mdp.space().state(t.targets[j])) < swap_potential(state));
            }
          }
          CHECK(std::abs(sum - 1.0) <= 1e-12);
          CHECK(t.cost == (mdp.actions(s)[k].is_swap() ? 0.0 : 1.0));
        }
      }
    }
  }
}

TEST_CASE("lumping preserves the initial value") {
  for (Model model : {Model::NoCC, Model::CC}) {
    for (int n = 2; n <= 4; ++n) {
      const auto params = ModelParams::make(0.35, 0.55, model);
      const Mdp lumped = build_mdp(n, params, true);
      const Mdp full = build_mdp(n, params, false);
      CHECK(full.num_nonterminal() >= lumped.num_nonterminal());
      const double v_l = oracle::value_iteration(lumped)[lumped.initial()];
      const double v_f = oracle::value_iteration(full)[full.initial()];
      CHECK(v_l == doctest::Approx(v_f).epsilon(1e-9));
    }
  }
}

TEST_CASE("worked CC chain") {
  const double p = 0.3, a = 0.4, q = 0.7;
  const auto params = ModelParams::make(p, a, Model::CC);
  const Mdp mdp = build_mdp(4, params);
  auto prob = [&](const char* from, const Action& act, const char* to) {
    const auto s = mdp.space().require_index(RepeaterState::parse(from));
    const auto t_index = mdp.space().require_index(RepeaterState::parse(to));
    const auto acts = mdp.actions(s);
    for (std::size_t k = 0; k < acts.size(); ++k) {
      if (!(acts[k] == act)) continue;
      const auto t = mdp.transition(s, k);
      for (std::size_t j = 0; j < t.targets.size(); ++j) {
        if (t.targets[j] == t_index) return t.probs[j];
      }
      return 0.0;
    }
    FAIL("action not admissible");
    return 0.0;
  };
  CHECK(prob("13", Action::swap(1), "(1)(1)(2)(3)") == doctest::Approx(1 - a));
  CHECK(prob("00(1)(2)", Action::wait(), "110(1)") == doctest::Approx(p * p));
  CHECK(prob("110(1)", Action::swap(1), "(1)(1)0(1)") == doctest::Approx(1 - a));
  CHECK(prob("(1)(1)0(1)", Action::wait(), "0000") == doctest::Approx(q));
}
