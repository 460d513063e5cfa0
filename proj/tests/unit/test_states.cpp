#include <doctest.h>

#include "oracles.hpp"
#include "qrep/errors.hpp"
#include "qrep/state_space.hpp"

using namespace qrep;

namespace {

std::vector<int> parts_of(const RepeaterState& s) {
  std::vector<int> out;
  for (std::size_t i = 0; i < s.size(); ++i) out.push_back(s[i].is_idle() ? 0 : s[i].value());
  return out;
}

}  // namespace

TEST_CASE("state text round trip") {
  for (const char* text : {"0", "0011", "012", "0(1)(2)1", "[12]0", "(1)(1)(2)(3)", "[10][11]"}) {
    CHECK(RepeaterState::parse(text).to_string() == text);
  }
  CHECK(RepeaterState::parse("[12]").segments() == 12);
  CHECK(RepeaterState::parse("0(3)2").segments() == 4);
  CHECK_THROWS_AS(RepeaterState::parse("0(0)"), InvalidArgument);
  CHECK_THROWS_AS(RepeaterState::parse("0x"), InvalidArgument);
  CHECK_THROWS_AS(RepeaterState::parse("[3"), InvalidArgument);
}

TEST_CASE("mirror") {
  CHECK(mirror(RepeaterState::parse("001")).to_string() == "100");
  CHECK(mirror(RepeaterState::parse("010")).to_string() == "010");
  CHECK(mirror(RepeaterState::parse("0(1)2")).to_string() == "2(1)0");
  const auto s = RepeaterState::parse("0(2)13");
  CHECK(mirror(mirror(s)) == s);
}

TEST_CASE("canonicalize") {
  CHECK(canonicalize(RepeaterState::parse("100")).to_string() == "001");
  CHECK(canonicalize(RepeaterState::parse("010")).to_string() == "010");
  CHECK(canonicalize(RepeaterState::parse("21")).to_string() == "12");
  CHECK(canonicalize(RepeaterState::parse("(1)0")).to_string() == "0(1)");
  for (const char* text : {"0(1)2", "2(1)0", "3(2)", "1102"}) {
    const auto s = RepeaterState::parse(text);
    const auto c = canonicalize(s);
    CHECK(canonicalize(c) == c);
    CHECK(canonicalize(mirror(s)) == c);
  }
}

TEST_CASE("terminal and validation") {
  CHECK(RepeaterState::terminal(5).is_terminal(5));
  CHECK_FALSE(RepeaterState::parse("14").is_terminal(5));
  CHECK_NOTHROW(validate(RepeaterState::parse("0(1)2"), 4, Model::CC));
  CHECK_THROWS_AS(validate(RepeaterState::parse("0(1)2"), 4, Model::NoCC), InvalidArgument);
  CHECK_THROWS_AS(validate(RepeaterState::parse("012"), 5, Model::NoCC), InvalidArgument);
}

TEST_CASE("small state spaces") {
  const StateSpace one = enumerate_states(1, Model::NoCC);
  REQUIRE(one.size() == 2);
  CHECK(one.state(0).to_string() == "0");
  CHECK(one.state(1).to_string() == "1");

  CHECK(enumerate_states(2, Model::NoCC).size() == 4);
  CHECK(enumerate_states(4, Model::NoCC).size() == 21);
  CHECK(enumerate_states(4, Model::CC).num_nonterminal() == 45);
  CHECK_THROWS_AS(enumerate_states(0, Model::NoCC), InvalidArgument);
}

TEST_CASE("no-CC state space equals all compositions") {
  for (int n = 1; n <= 7; ++n) {
    for (bool lumped : {true, false}) {
      const auto expected = oracle::all_nocc_states(n, lumped);
      const StateSpace space = enumerate_states(n, Model::NoCC, lumped);
      std::set<std::vector<int>> got;
      for (const auto& s : space.states()) got.insert(parts_of(s));
      CHECK(got == expected);
      CHECK(space.state(space.terminal()).is_terminal(n));
    }
  }
}

TEST_CASE("counting formulas") {
  CHECK(fibonacci(1) == 1);
  CHECK(fibonacci(2) == 1);
  CHECK(fibonacci(9) == 34);
  CHECK(predicted_count(2) == 4);
  CHECK(predicted_count(4) == 21);
  CHECK(predicted_count(10) == 5545);
  CHECK_THROWS_AS(predicted_count(0), InvalidArgument);
  for (int n = 1; n <= 10; ++n) {
    CHECK(enumerate_states(n, Model::NoCC).size() == predicted_count(n));
    CHECK(enumerate_states(n, Model::NoCC, false).size() == fibonacci(2 * n + 1));
  }
}

TEST_CASE("stored states are canonical and cover n segments") {
  for (Model model : {Model::NoCC, Model::CC}) {
    const StateSpace space = enumerate_states(6, model);
    for (const auto& s : space.states()) {
      CHECK(s.segments() == 6);
      CHECK(canonicalize(s) == s);
      if (model == Model::NoCC) CHECK_FALSE(s.has_countdown());
    }
    CHECK(space.index_of(RepeaterState::parse("000011")).has_value());
    CHECK(space.index_of(RepeaterState::parse("110000")) == space.index_of(RepeaterState::parse("000011")));
  }
}
