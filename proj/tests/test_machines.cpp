#include "pctlwb/machines.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace pctlwb;

namespace {

std::string slurp(const std::string& rel) {
  std::ifstream in(std::string(PCTLWB_SOURCE_DIR) + "/" + rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Configuration cfg(Label l, std::uint64_t c1, std::uint64_t c2) { return Configuration{l, {c1, c2}}; }

}  // namespace

TEST(Machines, SuccessorExamples) {
  CounterMachine m = parse_machine(
      "machine t\ncounters 2\n1: if C1 = 0 goto {2} else goto {3} ; inc dec\n"
      "2: if C1 = 0 goto {2,4} else goto {1} ; dec dec\n3: if C1 = 0 goto {3} else goto {3} ; dec dec\n"
      "4: if C1 = 0 goto {4} else goto {4} ; dec dec\n");
  EXPECT_EQ(successors(m, cfg(1, 0, 5)), std::vector<Configuration>{cfg(2, 1, 4)});
  EXPECT_EQ(successors(m, cfg(1, 2, 5)), std::vector<Configuration>{cfg(3, 3, 4)});
  auto two = successors(m, cfg(2, 0, 0));
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].counters, two[1].counters);
  EXPECT_NE(two[0].label, two[1].label);
  EXPECT_FALSE(m.deterministic());
}

TEST(Machines, DecrementSaturatesAtZero) {
  CounterMachine m = parse_machine("machine z\ncounters 2\n1: if C1 = 0 goto {1} else goto {1} ; dec dec\n");
  EXPECT_EQ(successors(m, cfg(1, 0, 0)), std::vector<Configuration>{cfg(1, 0, 0)});
  auto r = run_deterministic(m);
  ASSERT_TRUE(std::holds_alternative<LassoComputation>(r));
  EXPECT_EQ(std::get<LassoComputation>(r).alpha, 1u);
  EXPECT_EQ(std::get<LassoComputation>(r).beta(), 2u);
}

TEST(Machines, M0Lasso) {
  CounterMachine m = parse_machine(slurp("tests/data/m0.machine"));
  auto r = run_deterministic(m);
  ASSERT_TRUE(std::holds_alternative<LassoComputation>(r));
  const auto& l = std::get<LassoComputation>(r);
  EXPECT_EQ(l.alpha, 1u);
  EXPECT_EQ(l.beta(), 3u);
  EXPECT_EQ(l.configs, (std::vector<Configuration>{cfg(1, 0, 0), cfg(2, 0, 0), cfg(1, 0, 0)}));
  EXPECT_EQ(print_machine(parse_machine(print_machine(m))), print_machine(m));
}

TEST(Machines, IncForeverIsUnbounded) {
  CounterMachine m = parse_machine(slurp("tests/data/inc_forever.machine"));
  auto r = run_deterministic(m, 500);
  ASSERT_TRUE(std::holds_alternative<Unbounded>(r));
  EXPECT_EQ(std::get<Unbounded>(r).max_steps, 500u);
}

TEST(Machines, ParseErrors) {
  EXPECT_THROW(parse_machine("machine x\ncounters 2\n1: if C1 = 0 goto {5} else goto {1} ; dec dec\n"),
               std::exception);
  EXPECT_THROW(parse_machine("machine x\ncounters 2\n1: if C1 = 0 goto {1} else goto {1} ; dec\n"), std::exception);
  EXPECT_THROW(parse_machine("machine x\ncounters 2\n1: garbage\n"), MachineParseError);
}

TEST(Minsky, SuccessorExamples) {
  MinskyMachine mm = parse_minsky("minsky t\n1: inc c1 goto {2}\n2: test c1 zero {1} else {4,5}\n"
                                  "3: inc c2 goto {3}\n4: inc c2 goto {4}\n5: inc c2 goto {5}\n");
  EXPECT_EQ(minsky_successors(mm, cfg(1, 0, 0)), std::vector<Configuration>{cfg(2, 1, 0)});
  EXPECT_EQ(minsky_successors(mm, cfg(2, 0, 7)), std::vector<Configuration>{cfg(1, 0, 7)});
  auto two = minsky_successors(mm, cfg(2, 3, 0));
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].counters[0], 2u);
  EXPECT_EQ(two[1].counters[0], 2u);
}

TEST(Minsky, CompileSingleInc) {
  CounterMachine n = minsky_to_counter(parse_minsky("minsky one\n1: inc c1 goto {1}\n"));
  ASSERT_EQ(n.m(), 3);
  const Instruction& first = n.at(1);
  EXPECT_EQ(first.test, 1);
  EXPECT_EQ(first.zero, LabelSet{2});
  EXPECT_EQ(first.pos, LabelSet{2});
  EXPECT_EQ(first.updates, (std::vector<Update>{Update::Inc, Update::Inc}));
}

TEST(MinskyProperty, CompiledSizeIsThreeM) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    int m = 1 + static_cast<int>(rng() % 6);
    std::string text = "minsky r\n";
    for (int l = 1; l <= m; ++l) {
      int c = 1 + static_cast<int>(rng() % 2);
      auto target = [&] { return std::to_string(1 + rng() % m); };
      if (rng() % 2) text += std::to_string(l) + ": inc c" + std::to_string(c) + " goto {" + target() + "}\n";
      else text += std::to_string(l) + ": test c" + std::to_string(c) + " zero {" + target() + "} else {" + target() + "}\n";
    }
    MinskyMachine mm = parse_minsky(text);
    CounterMachine n = minsky_to_counter(mm);
    EXPECT_EQ(n.m(), 3 * m);
    EXPECT_NO_THROW(check_machine(n));
    EXPECT_EQ(parse_minsky(print_minsky(mm)).m(), m);
    EXPECT_EQ(print_machine(parse_machine(print_machine(n))), print_machine(n));
  }
}
