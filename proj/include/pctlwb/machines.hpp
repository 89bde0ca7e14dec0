#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pctlwb {

enum class Update : std::uint8_t { Inc, Dec };

using Label = int;                     // 1-indexed
using LabelSet = std::vector<Label>;  // sorted, nonempty

struct Instruction {
  int test = 1;  // counter index k, 1-indexed
  LabelSet zero;
  LabelSet pos;
  std::vector<Update> updates;  // one per counter
  bool operator==(const Instruction&) const = default;
};

struct CounterMachine {
  std::string name = "machine";
  int d = 2;
  std::vector<Instruction> instructions;  // instructions[l-1] is Ins_l

  int m() const { return static_cast<int>(instructions.size()); }
  const Instruction& at(Label l) const { return instructions.at(static_cast<std::size_t>(l - 1)); }
  bool deterministic() const;
  bool operator==(const CounterMachine&) const = default;
};

struct MachineError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Throws MachineError naming the first broken invariant.
void check_machine(const CounterMachine& m);

struct Configuration {
  Label label = 1;
  std::vector<std::uint64_t> counters;
  auto operator<=>(const Configuration&) const = default;
  bool operator==(const Configuration&) const = default;
};

std::string to_string(const Configuration& c);
Configuration initial_configuration(int d);

std::vector<Configuration> successors(const CounterMachine& m, const Configuration& c);

// configs[0..beta-1]; configs[alpha-1] == configs[beta-1].
struct LassoComputation {
  std::vector<Configuration> configs;
  std::size_t alpha = 1;
  std::size_t beta() const { return configs.size(); }
};

struct Unbounded {
  std::size_t max_steps;
};

std::variant<LassoComputation, Unbounded> run_deterministic(const CounterMachine& m, std::size_t max_steps = 100000);

enum class MinskyKind : std::uint8_t { Inc, Test };

struct MinskyInstruction {
  MinskyKind kind = MinskyKind::Inc;
  int counter = 1;
  LabelSet next;    // Inc target, or Test zero branch
  LabelSet branch;  // Test nonzero branch (after the decrement)
  bool operator==(const MinskyInstruction&) const = default;
};

struct MinskyMachine {
  std::string name = "minsky";
  std::vector<MinskyInstruction> instructions;
  int m() const { return static_cast<int>(instructions.size()); }
  const MinskyInstruction& at(Label l) const { return instructions.at(static_cast<std::size_t>(l - 1)); }
  int counters() const;  // highest counter index used
  bool operator==(const MinskyMachine&) const = default;
};

void check_minsky(const MinskyMachine& m);
std::vector<Configuration> minsky_successors(const MinskyMachine& m, const Configuration& c);
// 3m instructions; M recurrent iff the result is {1, m+1}-recurrent. Throws MachineError unless two counters.
CounterMachine minsky_to_counter(const MinskyMachine& m);

struct MachineParseError : std::runtime_error {
  MachineParseError(const std::string& msg, int line);
  int line;
};

CounterMachine parse_machine(std::string_view text);
std::string print_machine(const CounterMachine& m);
MinskyMachine parse_minsky(std::string_view text);
std::string print_minsky(const MinskyMachine& m);

}  // namespace pctlwb
