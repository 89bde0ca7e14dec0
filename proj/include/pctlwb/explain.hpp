#pragma once

#include "pctlwb/checker.hpp"
#include "pctlwb/formula.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace pctlwb {

struct ExplainOptions {
  std::size_t max_lines = 60;
  std::size_t max_depth = 40;
  std::size_t max_formula_chars = 160;
};

// Walks down from a formula that fails at s to the innermost failing subformulae.
// Each line is "path | state | verdict", with exact probabilities for Prob nodes.
// labels maps formula ids to readable names (e.g. Reduction::labels()); may be empty.
std::vector<std::string> explain_failure(Checker& checker, StateFormula f, StateId s,
                                         const std::unordered_map<std::uint32_t, std::string>& labels,
                                         const ExplainOptions& opt = {});

}  // namespace pctlwb
