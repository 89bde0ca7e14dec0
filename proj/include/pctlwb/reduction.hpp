#pragma once

#include "pctlwb/formula.hpp"
#include "pctlwb/geometry.hpp"
#include "pctlwb/machines.hpp"

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace pctlwb {

enum class Fragment { WithUntil, FGOnly };
enum class Variant { Recurrent, FiniteSat };

std::string_view fragment_name(Fragment f);
std::string_view variant_name(Variant v);

struct ReductionConfig {
  GadgetConstants constants = GadgetConstants::standard();
  Fragment fragment = Fragment::WithUntil;
  Variant variant = Variant::FiniteSat;
  LabelSet tau;  // required for Recurrent
};

// Proposition sets of one copy.
PropSet set_B(int copy);
PropSet set_A(int m, int copy);
PropSet set_C(int m, int copy);        // a, abar, b, c, d atoms
PropSet set_lower(int m, int copy);    // A \ B
PropSet set_r(int m, int copy);        // A \ (B u C)
PropSet universe(int m);               // A^1 u A^2

inline int succ_phase(int i) { return (i + 1) % 3; }

// Per-copy formula builders. Names follow the construction: Succ, Mark, Lambda, Zero, ...
// Every builder records a human-readable label for explanation output.
class Reduction {
 public:
  Reduction(const CounterMachine& machine, ReductionConfig cfg);

  int m() const { return m_; }
  const ReductionConfig& config() const { return cfg_; }

  StateFormula ex_A(const PropSet& L, int k);
  StateFormula ex_B(const PropSet& L, int k);
  StateFormula ex_lower(const PropSet& L, int k);

  StateFormula at(Label l, int k);
  StateFormula rsuc(int i, Label l, Label l2, int k);
  StateFormula Rsuc(int i, int k);
  StateFormula RKsuc(int i, int k);

  StateFormula succ(int k);
  StateFormula succ_bar(int k);
  StateFormula mark(int k);
  std::size_t marker_count() const { return 15 * static_cast<std::size_t>(m_) + 27; }
  StateFormula lambda(int k);
  StateFormula structure(int k);  // Struct or Struct-bar per fragment
  StateFormula structure(int k, Fragment f);

  StateFormula zero(int k);
  StateFormula eligible(int k);
  StateFormula copy_i(int i, int k);
  StateFormula succ_i(int i, int k);
  StateFormula decrement(int k);
  StateFormula init(int k);

  StateFormula propagate(int i, Label l, Label l2, int k);  // U=1 or F=1 rsuc per fragment
  StateFormula udec(int i, Label l, Label l2, int k);
  StateFormula uinc(int i, Label l, Label l2, int k);
  StateFormula uinc_part(int part, int i, Label l, Label l2, int k);  // part 1..6, unguarded
  StateFormula update(int i, Label l, Label l2, int k);
  StateFormula step_phase(int i, Label l, Label l2, int k);
  StateFormula step(Label l, Label l2, int k);
  StateFormula new_zero(Label l);
  StateFormula newsim(Label l, int k);
  StateFormula rec(int k);
  StateFormula psi(int k);

  StateFormula sync();
  StateFormula recurrent();

  StateFormula compile();

  // Label of the outermost named builder that produced f, if any.
  const std::string* label_of(StateFormula f) const;
  const std::unordered_map<std::uint32_t, std::string>& labels() const { return labels_; }
  // Named top-level conjuncts of the last compile().
  const std::vector<std::pair<std::string, StateFormula>>& parts() const { return parts_; }

 private:
  StateFormula named(StateFormula f, const std::string& name);
  Prop r(int i, Label l, int k) const { return Prop::lower(Family::r, k, i, l); }
  Prop low(Family f, int i, Label l, int k) const { return Prop::lower(f, k, i, l); }
  Prop up(Family f, int i, int k) const { return Prop::upper(f, k, i); }
  StateFormula v(const Prop& p) const { return atom(p); }
  StateFormula any_upper(Family f, int k);

  CounterMachine machine_;
  ReductionConfig cfg_;
  int m_;
  std::map<std::pair<PropSet, int>, StateFormula> cache_;
  std::unordered_map<std::uint32_t, std::string> labels_;
  std::vector<std::pair<std::string, StateFormula>> parts_;
};

// Convenience wrapper: validates the machine (d = 2) and config, then compiles.
StateFormula compile(const CounterMachine& m, const ReductionConfig& cfg);

struct AtomAudit {
  std::string part;
  std::vector<std::string> foreign;  // atom names outside the part's allowed copies
};
// Copy-k parts may only mention copy-k atoms, except NewSim (reads the other copy), Sync and Recurrent.
std::vector<AtomAudit> audit_atoms(Reduction& r);

// True iff every Until node in f has left operand true.
bool is_fg_fragment(StateFormula f);

}  // namespace pctlwb
