#include "pctlwb/witness.hpp"

#include "pctlwb/checker.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace pctlwb;

namespace {

CounterMachine m0() {
  return parse_machine("machine m0\ncounters 2\n1: if C1 = 0 goto {2} else goto {2} ; dec dec\n"
                       "2: if C2 = 0 goto {1} else goto {1} ; dec dec\n");
}

LassoComputation lasso_of(const CounterMachine& m) { return std::get<LassoComputation>(run_deterministic(m)); }

const WitnessReport& m0_witness() {
  static const WitnessReport rep = build_witness(m0(), lasso_of(m0()), WitnessConfig{});
  return rep;
}

}  // namespace

TEST(Witness, CounterVec) {
  Geometry g(GadgetConstants::standard());
  EXPECT_EQ(counter_vec(g, 0), (Vec2{Rational(1, 12), Rational(1, 15)}));
  EXPECT_EQ(counter_vec(g, 1), (Vec2{Rational(56, 825), Rational(56, 12375)}));
  for (std::uint64_t n = 0; n < 10; ++n) EXPECT_GT(counter_vec(g, n).v1, counter_vec(g, n + 1).v1);
}

TEST(Witness, M0IsWellFormed) {
  const WitnessReport& rep = m0_witness();
  EXPECT_TRUE(validate(rep.chain).empty());
  PropSet init{Prop::lower(Family::r, 1, 0, 1), Prop::lower(Family::r, 2, 0, 1)};
  canonicalize(init);
  EXPECT_EQ(rep.chain.valuation[rep.init], init);
  EXPECT_TRUE(rep.diagnostics.empty());
  for (const auto& row : rep.chain.trans)
    for (const Transition& t : row) {
      EXPECT_GT(t.p, 0);
      EXPECT_LE(t.p, 1);
    }
}

TEST(Witness, M0ProbabilitiesComeFromTheConstants) {
  // With both counters at 0 every row entry is one of these values or a residual.
  const GadgetConstants c = GadgetConstants::standard();
  const Rational z1 = c.z.v1, z2 = c.z.v2, d = c.delta, l = c.lambda;
  std::set<Rational> allowed{z1, z2, d - z1, l, 1};
  // Residuals of the dec,dec, mixed, single-r, R-pair and single-R rows at c = 0.
  allowed.insert(1 - 2 * z2 - 2 * d - z1);
  allowed.insert(1 - 2 * z1 - 2 * z2 - 2 * d - l);
  allowed.insert(1 - z1 - z2 - d);
  allowed.insert(1 - 2 * z1 - 2 * z2 - 2 * l - 2 * d);
  allowed.insert(2 * z1);  // merged parallel edges
  for (const auto& row : m0_witness().chain.trans)
    for (const Transition& t : row) EXPECT_TRUE(allowed.count(t.p)) << t.p;
}

TEST(Witness, MainRunFollowsTheLasso) {
  const WitnessReport& rep = m0_witness();
  LassoComputation l = lasso_of(m0());
  for (std::size_t j = 0; j + 1 < l.beta(); ++j) {
    const Configuration& c = l.configs[j];
    WitnessState s{j, {Prop::lower(Family::r, 1, static_cast<int>(j % 3), c.label),
                       Prop::lower(Family::r, 2, static_cast<int>(j % 3), c.label)},
                   c.counters[0], c.counters[1]};
    canonicalize(s.props);
    EXPECT_TRUE(rep.state_map.count(s)) << to_string(s);
  }
}

TEST(Witness, LintPasses) {
  for (const LintResult& r : lint_witness(m0_witness())) EXPECT_TRUE(r.ok) << r.name << ": " << r.detail;
}

TEST(Witness, LintCatchesCorruptedRow) {
  WitnessReport rep = m0_witness();
  rep.chain.trans[0][0].p += Rational(1, 1000);
  auto res = lint_witness(rep);
  EXPECT_FALSE(res.front().ok);
  EXPECT_EQ(res.front().name, "row-sum");
}

TEST(WitnessProperty, CharacteristicVectorsEncodeCounters) {
  const WitnessReport& rep = m0_witness();
  Geometry g(rep.constants);
  for (int k = 1; k <= 2; ++k) {
    std::size_t checked = 0;
    for (const auto& [s, gamma] : characteristic_vectors(rep, k)) {
      bool has_r = false;
      for (const Prop& p : rep.chain.valuation[s]) has_r = has_r || (p.family == Family::r && p.copy == k);
      if (!has_r) continue;
      EXPECT_EQ(gamma, counter_vec(g, counter_field(rep.states[s], k))) << rep.chain.state_names[s];
      ++checked;
    }
    EXPECT_GT(checked, 0u);
  }
  EXPECT_THROW(characteristic_vector(rep, static_cast<StateId>(rep.chain.size() - 1), 1), std::invalid_argument);
}

TEST(WitnessProperty, MarkersPersistAlongEveryEdge) {
  const WitnessReport& rep = m0_witness();
  // Upper atoms (A..E) are never lost once present.
  for (std::size_t s = 0; s < rep.chain.size(); ++s)
    for (const Prop& p : rep.chain.valuation[s]) {
      if (p.family < Family::A || p.family > Family::E) continue;
      for (const Transition& t : rep.chain.trans[s]) EXPECT_TRUE(rep.chain.has(p, t.to)) << p.name();
    }
}

TEST(Witness, StateCapIsEnforced) {
  WitnessConfig cfg;
  cfg.state_cap = 1;
  try {
    build_witness(m0(), lasso_of(m0()), cfg);
    FAIL();
  } catch (const WitnessError& e) {
    EXPECT_EQ(e.kind, WitnessError::Kind::StateCap);
  }
}

TEST(Witness, RejectsNondeterminism) {
  CounterMachine nd = parse_machine("machine nd\ncounters 2\n1: if C1 = 0 goto {1,2} else goto {1} ; dec dec\n"
                                    "2: if C1 = 0 goto {1} else goto {1} ; dec dec\n");
  LassoComputation l;
  l.configs = {Configuration{1, {0, 0}}, Configuration{1, {0, 0}}};
  l.alpha = 1;
  EXPECT_THROW(build_witness(nd, l, WitnessConfig{}), WitnessError);
}

TEST(Witness, IncRowsNeedTheSplitParameter) {
  CounterMachine m = parse_machine("machine id\ncounters 2\n1: if C1 = 0 goto {2} else goto {2} ; inc dec\n"
                                   "2: if C2 = 0 goto {1} else goto {1} ; dec dec\n");
  WitnessConfig printed;
  printed.r_mode = RMode::Printed;
  // As printed, r exceeds <c>_1 once a counter reaches 1: some weight turns negative or zero.
  try {
    WitnessReport rep = build_witness(m, lasso_of(m), printed);
    bool logged = false;
    for (const auto& d : rep.diagnostics) logged = logged || d.kind == "r-printed";
    EXPECT_TRUE(logged);
  } catch (const WitnessError& e) {
    EXPECT_EQ(e.kind, WitnessError::Kind::NonPositive);
  }
}
