#pragma once

#include "pctlwb/formula.hpp"
#include "pctlwb/markov.hpp"

#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace pctlwb {

using StateSet = std::vector<char>;  // indexed by StateId
using ProbVector = std::vector<Rational>;
using SatMap = std::unordered_map<std::uint32_t, StateSet>;  // formula id -> satisfying states

StateSet make_set(const MarkovChain& chain, const std::vector<StateId>& members);

ProbVector prob_next(const MarkovChain& chain, const StateSet& target);
ProbVector prob_bounded_until(const MarkovChain& chain, const StateSet& s1, const StateSet& s2, std::uint32_t k);
// Exact least solution; throws std::logic_error if the reduced system is singular.
ProbVector prob_until(const MarkovChain& chain, const StateSet& s1, const StateSet& s2);
// States that reach s2 through s1-states with positive probability (complement of the prob-0 set).
StateSet prob_positive(const MarkovChain& chain, const StateSet& s1, const StateSet& s2);

// Testing oracle: sums path probabilities of minimal accepting prefixes of length <= k.
Rational brute_force_bounded(const MarkovChain& chain, const StateSet& s1, const StateSet& s2, std::uint32_t k,
                             StateId s);

// Memoizes satisfaction sets per state-formula id and probability vectors per path-formula id.
class Checker {
 public:
  explicit Checker(const MarkovChain& chain) : chain_(chain) {}

  const StateSet& sat(StateFormula f);
  const ProbVector& probabilities(PathFormula p);
  bool holds(StateFormula f, StateId s) { return sat(f)[s] != 0; }
  const MarkovChain& chain() const { return chain_; }
  std::size_t memo_size() const { return sat_.size() + probs_.size(); }

 private:
  const StateSet& eval_node(StateFormula f);

  const MarkovChain& chain_;
  std::unordered_map<std::uint32_t, StateSet> sat_;
  std::unordered_map<std::uint32_t, ProbVector> probs_;
};

SatMap sat(const MarkovChain& chain, StateFormula f);

}  // namespace pctlwb
