#include "pctlwb/markov.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace pctlwb;

TEST(Markov, ParsesOneStateChain) {
  MarkovChain c = parse_chain("state 0: a\n0 -> 0 1/1\ninit 0\n");
  ASSERT_EQ(c.size(), 1u);
  EXPECT_TRUE(c.has(Prop::named("a"), 0));
  EXPECT_EQ(c.init, 0);
  EXPECT_TRUE(validate(c).empty());
}

TEST(Markov, FractionsAreCanonical) {
  MarkovChain c = parse_chain("state 0:\nstate 1:\n0 -> 1 2/4\n0 -> 0 1/2\n1 -> 1 1\n");
  EXPECT_FALSE(c.init.has_value());
  EXPECT_TRUE(validate(c).empty());
  EXPECT_NE(print_chain(c).find("1/2"), std::string::npos);
  EXPECT_EQ(print_chain(c).find("2/4"), std::string::npos);
}

TEST(Markov, ValidateReportsEachRule) {
  MarkovChain bad = parse_chain("state 0:\n0 -> 0 1/2\n0 -> 0 1/3\n");
  auto v = validate(bad);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v.front().rule, "row-sum");

  MarkovChain dangling = parse_chain("state 0:\n0 -> 0 1\n");
  dangling.trans[0].push_back({7, Rational(0)});
  auto d = validate(dangling);
  EXPECT_TRUE(std::any_of(d.begin(), d.end(), [](const Violation& x) { return x.rule == "dangling-target"; }));
}

TEST(Markov, UnknownTargetInFileIsAnError) {
  EXPECT_THROW(parse_chain("state 0:\n0 -> 9 1\n"), ChainParseError);
}

TEST(Markov, Reachability) {
  MarkovChain c = parse_chain("state s:\nstate t:\nstate u:\nstate x:\ns -> t 1\nt -> u 1\nu -> u 1\nx -> x 1\n");
  auto r = reachable(c, 0);
  EXPECT_EQ(r.size(), 3u);
  EXPECT_EQ(reachable(c, 3), std::vector<StateId>{3});
}

TEST(Markov, PrintParseRoundTrip) {
  const char* text = "chain demo\nstate s0 : a b\nstate s1 :\ns0 -> s0 1/3\ns0 -> s1 2/3\ns1 -> s1 1/1\ninit s0\n";
  MarkovChain c = parse_chain(text);
  MarkovChain d = parse_chain(print_chain(c));
  EXPECT_EQ(print_chain(c), print_chain(d));
  EXPECT_EQ(d.valuation, c.valuation);
}
