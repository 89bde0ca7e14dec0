#pragma once

#include "pctlwb/rational.hpp"

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pctlwb {

// Gadget families in canonical order; User covers free-form atoms.
enum class Family : std::uint8_t { r, a, abar, b, c, d, A, B, C, D, E, R, K, User };

struct Prop {
  Family family = Family::User;
  std::uint8_t copy = 0;    // 1 or 2 for gadget atoms
  std::uint8_t phase = 0;   // 0..2 for r,a,abar,b,c,d,A..E,R
  std::uint16_t label = 0;  // 1..m for r,a,abar,b,c,d
  std::string user;         // only for Family::User

  static Prop lower(Family f, int copy, int phase, int label);  // r a abar b c d
  static Prop upper(Family f, int copy, int phase);             // A B C D E R
  static Prop k(int copy);
  static Prop named(std::string_view name);  // gadget name if it matches, else user atom

  bool is_gadget() const { return family != Family::User; }
  std::string name() const;

  auto operator<=>(const Prop&) const = default;
  bool operator==(const Prop&) const = default;
};

using PropSet = std::vector<Prop>;  // kept sorted and duplicate-free by helpers
void canonicalize(PropSet& s);

enum class Cmp : std::uint8_t { Le, Lt, Ge, Gt, Eq, Ne };
std::string_view cmp_text(Cmp c);
bool compare(const Rational& lhs, Cmp c, const Rational& rhs);
// Complement: <= <-> >, < <-> >=, = <-> !=.
Cmp negate(Cmp c);
// Mirror used when rewriting a bound r as 1-r: <= <-> >=, < <-> >, = and != fixed.
Cmp mirror(Cmp c);

enum class SKind : std::uint8_t { True, Atom, Not, And, Prob };
enum class PKind : std::uint8_t { Next, Until, BoundedUntil };

namespace detail {
struct StateNode;
struct PathNode;
}  // namespace detail

class PathFormula;

// Hash-consed state formula handle; structural equality is pointer equality.
class StateFormula {
 public:
  StateFormula() = default;
  explicit StateFormula(const detail::StateNode* n) : n_(n) {}

  bool valid() const { return n_ != nullptr; }
  std::uint32_t id() const;
  SKind kind() const;
  const Prop& atom() const;
  StateFormula lhs() const;  // Not child, And left
  StateFormula rhs() const;  // And right
  PathFormula path() const;
  Cmp cmp() const;
  const Rational& bound() const;

  bool operator==(const StateFormula& o) const { return n_ == o.n_; }
  bool operator!=(const StateFormula& o) const { return n_ != o.n_; }
  const detail::StateNode* node() const { return n_; }

 private:
  const detail::StateNode* n_ = nullptr;
};

class PathFormula {
 public:
  PathFormula() = default;
  explicit PathFormula(const detail::PathNode* n) : n_(n) {}

  bool valid() const { return n_ != nullptr; }
  std::uint32_t id() const;
  PKind kind() const;
  StateFormula lhs() const;  // Next operand, Until left
  StateFormula rhs() const;  // Until right
  std::uint32_t steps() const;

  bool operator==(const PathFormula& o) const { return n_ == o.n_; }
  const detail::PathNode* node() const { return n_; }

 private:
  const detail::PathNode* n_ = nullptr;
};

// Primitive constructors.
StateFormula tt();
StateFormula atom(const Prop& p);
StateFormula neg(StateFormula f);
StateFormula conj(StateFormula a, StateFormula b);
StateFormula prob(PathFormula p, Cmp c, const Rational& bound);  // bound must lie in [0,1]
PathFormula next(StateFormula f);
PathFormula until(StateFormula a, StateFormula b);
PathFormula bounded_until(StateFormula a, StateFormula b, std::uint32_t k);

// Derived connectives (false = !true, or/implies via ! and &).
StateFormula ff();
StateFormula disj(StateFormula a, StateFormula b);
StateFormula implies(StateFormula a, StateFormula b);
StateFormula conj(const std::vector<StateFormula>& fs);  // empty -> true
StateFormula disj(const std::vector<StateFormula>& fs);  // empty -> false

// <L>_O: literals over O in canonical order. Throws std::invalid_argument if L is not a subset of O.
StateFormula mk_exclusive(PropSet L, PropSet O);
StateFormula mk_f(Cmp c, const Rational& bound, StateFormula f);
StateFormula mk_f_bounded(Cmp c, const Rational& bound, std::uint32_t k, StateFormula f);
// P(G f) ~ r is rewritten as P(true U !f) mirror(~) 1-r.
StateFormula mk_g(Cmp c, const Rational& bound, StateFormula f);

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line, int column);
  int line;
  int column;
};

StateFormula parse_formula(std::string_view text);
std::string print_formula(StateFormula f);
std::string print_path(PathFormula p);

// Children strictly before parents, shared nodes listed once.
std::vector<StateFormula> subformulae(StateFormula f);
PropSet atoms_of(StateFormula f);

struct FormulaStats {
  std::size_t state_nodes = 0;  // distinct
  std::size_t path_nodes = 0;   // distinct
  mpz_class tree_size;          // nodes counted with multiplicity
};
FormulaStats stats(StateFormula f);

// Number of nodes currently interned (all formulas ever built).
std::size_t interned_count();

}  // namespace pctlwb
