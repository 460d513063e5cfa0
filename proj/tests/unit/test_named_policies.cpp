#include <doctest.h>

#include <map>

#include "oracles.hpp"
#include "qrep/errors.hpp"
#include "qrep/io.hpp"
#include "qrep/named_policies.hpp"

using namespace qrep;

namespace {

std::string action_at(const Mdp& mdp, const Policy& policy, const char* state) {
  const auto s = mdp.space().require_index(RepeaterState::parse(state));
  return mdp.actions(s)[policy.choice[s]].to_string();
}

const std::map<std::string, std::string> kPi0 = {
    {"0011", "swap 3"}, {"0110", "wait"}, {"0111", "swap 3"}, {"1011", "swap 3"},
    {"1111", "swap 1"}, {"012", "wait"},  {"112", "swap 1"},  {"021", "swap 2"}};

}  // namespace

TEST_CASE("n=4 tables") {
  const Mdp mdp = build_mdp(4, ModelParams::make(0.3, 0.3, Model::NoCC));
  const Policy pi0 = builtin_policy_n4(SchemeKind::Pi0, mdp);
  const Policy pi1 = builtin_policy_n4(SchemeKind::Pi1, mdp);
  const Policy pi2 = builtin_policy_n4(SchemeKind::Pi2, mdp);
  std::size_t multi = 0;
  for (std::size_t s = 0; s < mdp.num_nonterminal(); ++s) multi += mdp.num_actions(s) > 1;
  CHECK(multi == kPi0.size());
  for (const auto& [state, action] : kPi0) CHECK(action_at(mdp, pi0, state.c_str()) == action);
  CHECK(action_at(mdp, pi1, "0110") == "swap 2");
  CHECK(action_at(mdp, pi1, "012") == "wait");
  CHECK(action_at(mdp, pi2, "012") == "swap 2");
  CHECK(action_at(mdp, pi2, "0110") == "swap 2");
  CHECK(doubling_policy(mdp) == pi0);
  CHECK(swap_asap_policy(mdp) == pi2);
  CHECK_THROWS_AS(builtin_policy_n4(SchemeKind::Pi0, build_mdp(5, ModelParams::make(0.3, 0.3, Model::NoCC))),
                  InvalidArgument);
}

TEST_CASE("tables carry over to countdown states") {
  const Mdp mdp = build_mdp(4, ModelParams::make(0.3, 0.3, Model::CC));
  const Policy pi0 = builtin_policy_n4(SchemeKind::Pi0, mdp);
  CHECK(doubling_policy(mdp) == pi0);
  CHECK(swap_asap_policy(mdp) == builtin_policy_n4(SchemeKind::Pi2, mdp));
  CHECK(action_at(mdp, pi0, "110(1)") == "swap 1");
  CHECK(action_at(mdp, pi0, "0(1)(1)1") == "wait");
  CHECK(action_at(mdp, builtin_policy_n4(SchemeKind::Pi2, mdp), "012") == "swap 2");
}

TEST_CASE("doubling") {
  CHECK_THROWS_AS(doubling_policy(build_mdp(6, ModelParams::make(0.3, 0.3, Model::NoCC))), InvalidArgument);
  const Mdp m2 = build_mdp(2, ModelParams::make(0.3, 0.3, Model::NoCC));
  CHECK(doubling_policy(m2) == default_policy(m2));
  const Mdp m8 = build_mdp(8, ModelParams::make(0.3, 0.3, Model::NoCC));
  const Policy d = doubling_policy(m8);
  CHECK(action_at(m8, d, "00000011") == "swap 7");
  CHECK(action_at(m8, d, "00000110") == "wait");
  CHECK(action_at(m8, d, "110022") == "swap 1");
  CHECK(action_at(m8, d, "0000112") == "swap 5");
  CHECK(action_at(m8, d, "002200") == "wait");
  CHECK(action_at(m8, d, "44") == "swap 1");
}

TEST_CASE("unreachable states do not change the doubling value") {
  const Mdp mdp = build_mdp(4, ModelParams::make(0.2, 0.6, Model::NoCC));
  const Policy d = doubling_policy(mdp);
  const double base = evaluate_policy(mdp, d)[mdp.initial()];
  const auto s = mdp.space().require_index(RepeaterState::parse("021"));
  Policy other = d;
  other.choice[s] = other.choice[s] == 0 ? 1 : 0;
  CHECK(evaluate_policy(mdp, other)[mdp.initial()] == doctest::Approx(base).epsilon(1e-14));
}

TEST_CASE("swap-asap is optimal for three segments") {
  for (double p : {0.1, 0.5, 0.9}) {
    for (double a : {0.1, 0.5, 0.9}) {
      const Mdp mdp = build_mdp(3, ModelParams::make(p, a, Model::NoCC));
      const auto v = evaluate_policy(mdp, swap_asap_policy(mdp));
      const auto opt = solve_optimal(mdp).values;
      for (std::size_t s = 0; s < v.size(); ++s) CHECK(v[s] == doctest::Approx(opt[s]).epsilon(1e-9));
    }
  }
}

TEST_CASE("named schemes never beat the optimum") {
  for (Model model : {Model::NoCC, Model::CC}) {
    const Mdp mdp = build_mdp(4, ModelParams::make(0.4, 0.7, model));
    const Solution sol = solve_optimal(mdp);
    for (const char* name : {"doubling", "swap-asap", "pi0", "pi1", "pi2"}) {
      const auto v = evaluate_policy(mdp, scheme_policy(mdp, SchemeId::parse(name)));
      for (std::size_t s = 0; s < v.size(); ++s) CHECK(sol.values[s] <= v[s] * (1 + 1e-9));
    }
  }
}

TEST_CASE("scheme ids") {
  CHECK(SchemeId::parse("swap_asap").kind == SchemeKind::SwapAsap);
  CHECK(SchemeId::parse("swap-asap").to_string() == "swap-asap");
  const SchemeId custom = SchemeId::parse("file=/tmp/x.json");
  CHECK(custom.kind == SchemeKind::Custom);
  CHECK(custom.label == "/tmp/x.json");
  CHECK_THROWS_AS(SchemeId::parse("pi3"), InvalidArgument);
  CHECK_THROWS_AS(SchemeId::parse("file="), InvalidArgument);
  CHECK(scheme_applies(SchemeId::parse("doubling"), 8));
  CHECK_FALSE(scheme_applies(SchemeId::parse("doubling"), 6));
  CHECK_FALSE(scheme_applies(SchemeId::parse("pi1"), 5));
}

TEST_CASE("policy JSON") {
  const Mdp mdp = build_mdp(4, ModelParams::make(0.3, 0.3, Model::CC));
  const Policy pi1 = builtin_policy_n4(SchemeKind::Pi1, mdp);
  CHECK(parse_policy_json(mdp, policy_json(mdp, pi1)) == pi1);

  const Mdp nocc = build_mdp(4, ModelParams::make(0.3, 0.3, Model::NoCC));
  std::string text = R"({"0011": "swap 3", "0110": "wait", "1110": "swap 1", "1011": "swap 3",
                         "1111": "swap 3", "012": "wait", "211": "swap 2", "021": "swap 2"})";
  CHECK(parse_policy_json(nocc, text) == builtin_policy_n4(SchemeKind::Pi0, nocc));
  CHECK_THROWS_AS(parse_policy_json(nocc, R"({"0011": "swap 3"})"), InvalidArgument);
  CHECK_THROWS_AS(parse_policy_json(nocc, R"({"0011": "swap 2"})"), InvalidArgument);
  CHECK_THROWS_AS(parse_policy_json(nocc, R"({"0013": "wait"})"), InvalidArgument);
  CHECK_THROWS_AS(parse_policy_json(nocc, "[1,2]"), InvalidArgument);
  CHECK_THROWS_AS(parse_policy_json(nocc, "{"), InvalidArgument);
}
