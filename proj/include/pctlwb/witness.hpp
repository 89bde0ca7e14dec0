#pragma once

#include "pctlwb/checker.hpp"
#include "pctlwb/geometry.hpp"
#include "pctlwb/machines.hpp"
#include "pctlwb/markov.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace pctlwb {

// [index, props, n1, n2]; props hold both copies' atoms.
struct WitnessState {
  std::size_t index = 0;
  PropSet props;
  std::uint64_t n1 = 0;
  std::uint64_t n2 = 0;
  auto operator<=>(const WitnessState&) const = default;
  bool operator==(const WitnessState&) const = default;
};

std::string to_string(const WitnessState& s);

// Free: no r or R atom of either copy.
bool is_free(const PropSet& props);

enum class RMode { Solved, Printed };

struct WitnessConfig {
  GadgetConstants constants = GadgetConstants::standard();
  std::size_t state_cap = 100000;
  RMode r_mode = RMode::Solved;
};

struct Diagnostic {
  std::string kind;  // residual-mismatch, r-solved, r-printed, r-unsolvable
  std::string message;
};

struct WitnessReport {
  MarkovChain chain;
  std::vector<WitnessState> states;  // indexed by StateId
  std::map<WitnessState, StateId> state_map;
  StateId init = 0;
  std::vector<Diagnostic> diagnostics;
  GadgetConstants constants;
};

struct WitnessError : std::runtime_error {
  enum class Kind { StateCap, NonPositive, NoRule, Nondeterministic };
  WitnessError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

Vec2 counter_vec(const Geometry& g, std::uint64_t n);

WitnessReport build_witness(const CounterMachine& m, const LassoComputation& lasso, const WitnessConfig& cfg);

// gamma^k[s] = (P_s(G Phi body), P_s(G Psi body)); throws std::invalid_argument if s is not k-relevant.
Vec2 characteristic_vector(const WitnessReport& report, StateId s, int k);
// All k-relevant states at once (shares the linear solves).
std::map<StateId, Vec2> characteristic_vectors(const WitnessReport& report, int k);

// Counter field of copy k at an r-relevant state.
std::uint64_t counter_field(const WitnessState& s, int k);

struct LintResult {
  std::string name;
  bool ok = true;
  std::string detail;
};
std::vector<LintResult> lint_witness(const WitnessReport& report);

}  // namespace pctlwb
