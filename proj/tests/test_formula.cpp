#include "pctlwb/formula.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pctlwb;

namespace {

StateFormula a() { return atom(Prop::named("a")); }
StateFormula b() { return atom(Prop::named("b")); }

}  // namespace

TEST(Formula, HashConsingSharesIds) {
  EXPECT_EQ(conj(a(), b()), conj(a(), b()));
  EXPECT_EQ(conj(a(), b()).id(), conj(a(), b()).id());
  EXPECT_NE(conj(a(), b()), conj(b(), a()));
  EXPECT_EQ(prob(next(a()), Cmp::Ge, Rational(1, 2)), prob(next(a()), Cmp::Ge, Rational(2, 4)));
}

TEST(Formula, ExclusiveLiterals) {
  PropSet O{Prop::named("p"), Prop::named("q")};
  canonicalize(O);
  StateFormula f = mk_exclusive({Prop::named("p")}, O);
  EXPECT_EQ(f, conj(atom(Prop::named("p")), neg(atom(Prop::named("q")))));
  EXPECT_EQ(mk_exclusive({}, {Prop::named("p")}), neg(atom(Prop::named("p"))));
  EXPECT_THROW(mk_exclusive({Prop::named("x")}, {Prop::named("p")}), std::invalid_argument);
}

TEST(Formula, GDualityUsesMirroredComplement) {
  // P(G a) = 1 iff P(F !a) = 0.
  EXPECT_EQ(mk_g(Cmp::Eq, 1, a()), prob(until(tt(), neg(a())), Cmp::Eq, 0));
  // P(G a) >= 1/2 iff P(F !a) <= 1/2.
  EXPECT_EQ(mk_g(Cmp::Ge, Rational(1, 2), a()), prob(until(tt(), neg(a())), Cmp::Le, Rational(1, 2)));
  StateFormula g = mk_g(Cmp::Eq, Rational(14, 225), a());
  EXPECT_EQ(g.bound(), Rational(211, 225));
  EXPECT_EQ(mk_f(Cmp::Eq, Rational(1, 11), a()).bound(), Rational(1, 11));
}

TEST(Formula, FSugar) {
  EXPECT_EQ(mk_f(Cmp::Gt, 0, a()), prob(until(tt(), a()), Cmp::Gt, 0));
  StateFormula f = mk_f_bounded(Cmp::Eq, Rational(1, 2), 0, a());
  EXPECT_EQ(f.path().kind(), PKind::BoundedUntil);
  EXPECT_EQ(f.path().steps(), 0u);
}

TEST(Formula, ParseExamples) {
  EXPECT_EQ(parse_formula("P>=1/2[X a]"), prob(next(a()), Cmp::Ge, Rational(1, 2)));
  EXPECT_EQ(parse_formula("P=1[G (a | b)]"), mk_g(Cmp::Eq, 1, disj(a(), b())));
  EXPECT_NO_THROW(parse_formula("P>=0[X a]"));
  EXPECT_THROW(parse_formula("P=2[X a]"), ParseError);
  EXPECT_THROW(parse_formula("P=1/2[X a"), ParseError);
  EXPECT_THROW(parse_formula("a &"), ParseError);
}

TEST(Formula, ParseErrorCarriesPosition) {
  try {
    parse_formula("a &\n  )");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 2);
  }
}

TEST(Formula, SubformulaeSharedOnce) {
  auto one = subformulae(a());
  ASSERT_EQ(one.size(), 1u);
  auto shared = subformulae(conj(a(), a()));
  EXPECT_EQ(shared.size(), 2u);
  EXPECT_EQ(shared.back(), conj(a(), a()));
}

TEST(Formula, StatsCountMultiplicity) {
  StateFormula x = conj(a(), a());
  StateFormula y = conj(x, x);
  FormulaStats st = stats(y);
  EXPECT_EQ(st.state_nodes, 3u);
  EXPECT_EQ(st.tree_size, 7);
}

TEST(Formula, GadgetNamesRoundTrip) {
  for (Prop p : {Prop::lower(Family::abar, 2, 1, 3), Prop::upper(Family::R, 1, 2), Prop::k(2),
                 Prop::lower(Family::r, 1, 0, 1)})
    EXPECT_EQ(Prop::named(p.name()), p) << p.name();
  EXPECT_FALSE(Prop::named("rx").is_gadget());
}

// Random formulas over three atoms: printing then parsing returns the same node.
namespace {

StateFormula random_formula(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth == 0 ? 1 : 6);
  const char* names[] = {"p", "q", "s"};
  auto bound = [&] { return Rational(std::uniform_int_distribution<int>(0, 8)(rng), 8); };
  auto cmp = [&] { return static_cast<Cmp>(std::uniform_int_distribution<int>(0, 5)(rng)); };
  switch (pick(rng)) {
    case 0: return atom(Prop::named(names[rng() % 3]));
    case 1: return tt();
    case 2: return neg(random_formula(rng, depth - 1));
    case 3: return conj(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
    case 4: return prob(next(random_formula(rng, depth - 1)), cmp(), bound());
    case 5: return prob(until(random_formula(rng, depth - 1), random_formula(rng, depth - 1)), cmp(), bound());
    default:
      return prob(bounded_until(random_formula(rng, depth - 1), random_formula(rng, depth - 1), rng() % 4), cmp(),
                  bound());
  }
}

}  // namespace

TEST(FormulaProperty, PrintParseRoundTrip) {
  std::mt19937_64 rng(20261016);
  for (int n = 0; n < 500; ++n) {
    StateFormula f = random_formula(rng, 4);
    std::string text = print_formula(f);
    EXPECT_EQ(parse_formula(text), f) << text;
  }
}
