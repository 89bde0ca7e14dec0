#include "pctlwb/reduction.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace pctlwb;

namespace {

CounterMachine m0() {
  return parse_machine("machine m0\ncounters 2\n1: if C1 = 0 goto {2} else goto {2} ; dec dec\n"
                       "2: if C2 = 0 goto {1} else goto {1} ; dec dec\n");
}

CounterMachine incdec() {
  return parse_machine("machine id\ncounters 2\n1: if C1 = 0 goto {2} else goto {2} ; inc dec\n"
                       "2: if C2 = 0 goto {1} else goto {1} ; dec inc\n");
}

// Bounds of every Prob node, with G-bounds read back through 1 - r.
std::set<Rational> bounds(StateFormula f) {
  std::set<Rational> out;
  for (StateFormula g : subformulae(f))
    if (g.kind() == SKind::Prob) {
      out.insert(g.bound());
      out.insert(1 - g.bound());
    }
  return out;
}

std::size_t count_literals(StateFormula f) {
  std::size_t n = 0;
  for (StateFormula g : subformulae(f)) n += g.kind() == SKind::Atom;
  return n;
}

}  // namespace

TEST(Reduction, PropositionSetSizes) {
  for (int m = 1; m <= 4; ++m) {
    EXPECT_EQ(set_A(m, 1).size(), static_cast<std::size_t>(19 + 18 * m));
    EXPECT_EQ(universe(m).size(), static_cast<std::size_t>(38 + 36 * m));
  }
  EXPECT_EQ(universe(2).size(), 110u);
}

TEST(Reduction, ExclusiveOverA) {
  CounterMachine one = parse_machine("machine one\ncounters 2\n1: if C1 = 0 goto {1} else goto {1} ; dec dec\n");
  Reduction red(one, ReductionConfig{});
  StateFormula f = red.ex_A({Prop::lower(Family::r, 1, 0, 1)}, 1);
  EXPECT_EQ(count_literals(f), 37u);
  EXPECT_EQ(red.ex_A({Prop::lower(Family::r, 1, 0, 1)}, 1), f);
}

TEST(Reduction, AtUsesOnlyItsCopy) {
  Reduction red(m0(), ReductionConfig{});
  for (const Prop& p : atoms_of(red.at(1, 2))) EXPECT_EQ(p.copy, 2) << p.name();
}

TEST(Reduction, CompiledAtomCount) {
  Reduction red(m0(), ReductionConfig{});
  StateFormula f = red.compile();
  EXPECT_EQ(atoms_of(f).size(), 110u);
  for (const AtomAudit& a : audit_atoms(red)) EXPECT_TRUE(a.foreign.empty()) << a.part;
}

TEST(Reduction, FragmentShape) {
  ReductionConfig u, fg;
  fg.fragment = Fragment::FGOnly;
  StateFormula fu = compile(m0(), u);
  StateFormula ffg = compile(m0(), fg);
  EXPECT_TRUE(is_fg_fragment(ffg));
  EXPECT_FALSE(is_fg_fragment(fu));
}

TEST(Reduction, FragmentsDifferOnlyInStructure) {
  ReductionConfig u, fg;
  fg.fragment = Fragment::FGOnly;
  Reduction ru(m0(), u), rf(m0(), fg);
  ru.compile();
  rf.compile();
  ASSERT_EQ(ru.parts().size(), rf.parts().size());
  for (std::size_t i = 0; i < ru.parts().size(); ++i) {
    const auto& [name, f] = ru.parts()[i];
    EXPECT_EQ(name, rf.parts()[i].first);
    if (name.rfind("Struct", 0) == 0) EXPECT_NE(f, rf.parts()[i].second) << name;
    else if (name.rfind("Sim", 0) != 0) EXPECT_EQ(f, rf.parts()[i].second) << name;
  }
}

TEST(Reduction, VariantParts) {
  ReductionConfig fin, rec;
  rec.variant = Variant::Recurrent;
  rec.tau = {1};
  Reduction rf(m0(), fin), rr(m0(), rec);
  rf.compile();
  rr.compile();
  auto names = [](const Reduction& r) {
    std::vector<std::string> out;
    for (const auto& p : r.parts()) out.push_back(p.first);
    return out;
  };
  auto nf = names(rf), nr = names(rr);
  EXPECT_EQ(std::count(nf.begin(), nf.end(), "Recurrent"), 0);
  EXPECT_EQ(std::count(nr.begin(), nr.end(), "Recurrent"), 1);
  ReductionConfig missing;
  missing.variant = Variant::Recurrent;
  EXPECT_THROW(Reduction(m0(), missing), std::invalid_argument);
}

TEST(Reduction, RejectsOtherCounterCounts) {
  CounterMachine three = parse_machine("machine t\ncounters 3\n1: if C1 = 0 goto {1} else goto {1} ; dec dec dec\n");
  EXPECT_THROW(Reduction(three, ReductionConfig{}), MachineError);
}

TEST(Reduction, ConstantsAppearExactly) {
  Reduction red(m0(), ReductionConfig{});
  auto z = bounds(red.zero(1));
  EXPECT_TRUE(z.count(Rational(1, 12)));
  EXPECT_TRUE(z.count(Rational(1, 15)));
  EXPECT_TRUE(bounds(red.eligible(1)).count(Rational(1, 15)));
  auto dec = bounds(red.step(1, 2, 1));
  for (Rational x : {Rational(1, 12), Rational(1, 15), Rational(1, 11), Rational(14, 225)}) EXPECT_TRUE(dec.count(x)) << x;
  Reduction ri(incdec(), ReductionConfig{});
  auto inc = bounds(ri.step(1, 2, 1));
  for (Rational x : {Rational(14, 225), Rational(1, 13), Rational(1, 11)}) EXPECT_TRUE(inc.count(x)) << x;
}

TEST(Reduction, InitStartsWithExclusiveR01) {
  Reduction red(m0(), ReductionConfig{});
  StateFormula init = red.init(1);
  StateFormula ex = red.ex_A({Prop::lower(Family::r, 1, 0, 1)}, 1);
  auto subs = subformulae(init);
  EXPECT_NE(std::find(subs.begin(), subs.end(), ex), subs.end());
}

TEST(Reduction, MarkCoversEveryMarker) {
  Reduction red(m0(), ReductionConfig{});
  EXPECT_EQ(red.marker_count(), 15u * 2 + 27);
  // Mark is G=1 over one implication per marker, i.e. P=0[true U !(AND ...)].
  StateFormula mark = red.mark(1);
  ASSERT_EQ(mark.kind(), SKind::Prob);
  StateFormula body = mark.path().rhs();
  ASSERT_EQ(body.kind(), SKind::Not);
  std::size_t n = 0;
  std::vector<StateFormula> stack{body.lhs()};
  while (!stack.empty()) {
    StateFormula f = stack.back();
    stack.pop_back();
    if (f.kind() == SKind::And) {
      stack.push_back(f.lhs());
      stack.push_back(f.rhs());
    } else {
      ++n;
    }
  }
  EXPECT_EQ(n, red.marker_count());
}

TEST(Reduction, SyncShape) {
  Reduction red(m0(), ReductionConfig{});
  StateFormula sync = red.sync();
  for (const Prop& p : atoms_of(sync)) EXPECT_TRUE(p.family == Family::r || p.family == Family::a) << p.name();
  // 3m outer G=1 conjuncts, each an implication into m disjuncts.
  std::size_t outer = 0;
  std::vector<StateFormula> stack{sync};
  while (!stack.empty()) {
    StateFormula f = stack.back();
    stack.pop_back();
    if (f.kind() == SKind::And) {
      stack.push_back(f.lhs());
      stack.push_back(f.rhs());
    } else {
      EXPECT_EQ(f.kind(), SKind::Prob);
      ++outer;
    }
  }
  EXPECT_EQ(outer, 3u * 2);
  EXPECT_TRUE(is_fg_fragment(sync));
}

TEST(Reduction, LabelsNameBuilders) {
  Reduction red(m0(), ReductionConfig{});
  StateFormula f = red.compile();
  ASSERT_NE(red.label_of(f), nullptr);
  EXPECT_EQ(*red.label_of(f), "Psi_M");
  ASSERT_NE(red.label_of(red.zero(2)), nullptr);
  EXPECT_EQ(*red.label_of(red.zero(2)), "Zero^2");
}

TEST(ReductionProperty, RoundTripsThroughText) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    ReductionConfig cfg;
    cfg.fragment = rng() % 2 ? Fragment::FGOnly : Fragment::WithUntil;
    StateFormula f = compile(rng() % 2 ? m0() : incdec(), cfg);
    EXPECT_EQ(parse_formula(print_formula(f)), f);
  }
}
