#pragma once

#include "pctlwb/formula.hpp"
#include "pctlwb/rational.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pctlwb {

using StateId = int;

struct Transition {
  StateId to;
  Rational p;
};

// Dense ids 0..n-1. Names are the ids used in chain files.
struct MarkovChain {
  std::string name = "chain";
  std::vector<std::string> state_names;
  std::vector<PropSet> valuation;
  std::vector<std::vector<Transition>> trans;
  std::optional<StateId> init;

  std::size_t size() const { return state_names.size(); }
  StateId add_state(std::string state_name, PropSet props);
  bool has(const Prop& p, StateId s) const;
  std::optional<StateId> find(std::string_view state_name) const;
};

struct Violation {
  StateId state;
  std::string rule;    // nonpositive-probability, dangling-target, row-sum, empty-row, init
  std::string detail;
};

std::vector<Violation> validate(const MarkovChain& chain);
std::string describe(const Violation& v, const MarkovChain& chain);

// Forward closure over stored transitions, including s. Throws std::out_of_range for unknown s.
std::vector<StateId> reachable(const MarkovChain& chain, StateId s);

struct ChainParseError : std::runtime_error {
  ChainParseError(const std::string& msg, int line);
  int line;
};

// Parses the line format; validation is left to validate().
MarkovChain parse_chain(std::string_view text);
std::string print_chain(const MarkovChain& chain);

}  // namespace pctlwb
