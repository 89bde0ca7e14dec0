#include "pctlwb/formula.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <mutex>
#include <regex>
#include <unordered_map>
#include <unordered_set>

namespace pctlwb {

namespace detail {

struct StateNode {
  std::uint32_t id;
  SKind kind;
  Prop atom;
  const StateNode* a = nullptr;
  const StateNode* b = nullptr;
  const PathNode* path = nullptr;
  Cmp cmp = Cmp::Eq;
  Rational bound;
};

struct PathNode {
  std::uint32_t id;
  PKind kind;
  const StateNode* a = nullptr;
  const StateNode* b = nullptr;
  std::uint32_t k = 0;
};

}  // namespace detail

namespace {

using detail::PathNode;
using detail::StateNode;

// Nodes live for the whole process; deques keep addresses stable.
class Interner {
 public:
  const StateNode* state(StateNode proto, const std::string& key) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = states_.find(key);
    if (it != states_.end()) return it->second;
    proto.id = next_id_++;
    state_store_.push_back(std::move(proto));
    const StateNode* n = &state_store_.back();
    states_.emplace(key, n);
    return n;
  }

  const PathNode* path(PathNode proto, const std::string& key) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = paths_.find(key);
    if (it != paths_.end()) return it->second;
    proto.id = next_id_++;
    path_store_.push_back(proto);
    const PathNode* n = &path_store_.back();
    paths_.emplace(key, n);
    return n;
  }

  std::size_t size() {
    std::lock_guard<std::mutex> lock(mu_);
    return state_store_.size() + path_store_.size();
  }

 private:
  std::mutex mu_;
  std::uint32_t next_id_ = 0;
  std::deque<StateNode> state_store_;
  std::deque<PathNode> path_store_;
  std::unordered_map<std::string, const StateNode*> states_;
  std::unordered_map<std::string, const PathNode*> paths_;
};

Interner& interner() {
  static Interner in;
  return in;
}

const char* lower_names[] = {"r", "a", "abar", "b", "c", "d"};
const char* upper_names[] = {"Acap", "Bcap", "Ccap", "Dcap", "Ecap", "Rcap"};

bool is_lower(Family f) { return f <= Family::d; }
bool is_upper(Family f) { return f >= Family::A && f <= Family::R; }

}  // namespace

// ---- Prop ----

Prop Prop::lower(Family f, int copy, int phase, int label) {
  if (!is_lower(f) || copy < 1 || copy > 2 || phase < 0 || phase > 2 || label < 1 || label > 65535)
    throw std::invalid_argument("gadget proposition index out of range");
  Prop p;
  p.family = f;
  p.copy = static_cast<std::uint8_t>(copy);
  p.phase = static_cast<std::uint8_t>(phase);
  p.label = static_cast<std::uint16_t>(label);
  return p;
}

Prop Prop::upper(Family f, int copy, int phase) {
  if (!is_upper(f) || copy < 1 || copy > 2 || phase < 0 || phase > 2)
    throw std::invalid_argument("gadget proposition index out of range");
  Prop p;
  p.family = f;
  p.copy = static_cast<std::uint8_t>(copy);
  p.phase = static_cast<std::uint8_t>(phase);
  return p;
}

Prop Prop::k(int copy) {
  if (copy < 1 || copy > 2) throw std::invalid_argument("gadget proposition index out of range");
  Prop p;
  p.family = Family::K;
  p.copy = static_cast<std::uint8_t>(copy);
  return p;
}

Prop Prop::named(std::string_view name) {
  static const std::regex lower_re("^(r|a|abar|b|c|d)([12])_([012])_([1-9][0-9]{0,4})$");
  static const std::regex upper_re("^(Acap|Bcap|Ccap|Dcap|Ecap|Rcap)([12])_([012])$");
  static const std::regex k_re("^K([12])$");
  std::string s(name);
  std::smatch m;
  if (std::regex_match(s, m, lower_re)) {
    int fam = 0;
    while (m[1].str() != lower_names[fam]) ++fam;
    int label = std::stoi(m[4].str());
    if (label <= 65535) return lower(static_cast<Family>(fam), std::stoi(m[2].str()), std::stoi(m[3].str()), label);
  } else if (std::regex_match(s, m, upper_re)) {
    int fam = 0;
    while (m[1].str() != upper_names[fam]) ++fam;
    return upper(static_cast<Family>(static_cast<int>(Family::A) + fam), std::stoi(m[2].str()), std::stoi(m[3].str()));
  } else if (std::regex_match(s, m, k_re)) {
    return k(std::stoi(m[1].str()));
  }
  Prop p;
  p.user = s;
  return p;
}

std::string Prop::name() const {
  if (family == Family::User) return user;
  if (family == Family::K) return "K" + std::to_string(copy);
  if (is_lower(family))
    return std::string(lower_names[static_cast<int>(family)]) + std::to_string(copy) + "_" + std::to_string(phase) +
           "_" + std::to_string(label);
  return std::string(upper_names[static_cast<int>(family) - static_cast<int>(Family::A)]) + std::to_string(copy) +
         "_" + std::to_string(phase);
}

void canonicalize(PropSet& s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
}

// ---- comparisons ----

std::string_view cmp_text(Cmp c) {
  switch (c) {
    case Cmp::Le: return "<=";
    case Cmp::Lt: return "<";
    case Cmp::Ge: return ">=";
    case Cmp::Gt: return ">";
    case Cmp::Eq: return "=";
    case Cmp::Ne: return "!=";
  }
  return "?";
}

bool compare(const Rational& lhs, Cmp c, const Rational& rhs) {
  switch (c) {
    case Cmp::Le: return lhs <= rhs;
    case Cmp::Lt: return lhs < rhs;
    case Cmp::Ge: return lhs >= rhs;
    case Cmp::Gt: return lhs > rhs;
    case Cmp::Eq: return lhs == rhs;
    case Cmp::Ne: return lhs != rhs;
  }
  return false;
}

Cmp negate(Cmp c) {
  switch (c) {
    case Cmp::Le: return Cmp::Gt;
    case Cmp::Gt: return Cmp::Le;
    case Cmp::Lt: return Cmp::Ge;
    case Cmp::Ge: return Cmp::Lt;
    case Cmp::Eq: return Cmp::Ne;
    case Cmp::Ne: return Cmp::Eq;
  }
  return c;
}

Cmp mirror(Cmp c) {
  switch (c) {
    case Cmp::Le: return Cmp::Ge;
    case Cmp::Ge: return Cmp::Le;
    case Cmp::Lt: return Cmp::Gt;
    case Cmp::Gt: return Cmp::Lt;
    default: return c;
  }
}

// ---- handles ----

std::uint32_t StateFormula::id() const { return n_->id; }
SKind StateFormula::kind() const { return n_->kind; }
const Prop& StateFormula::atom() const { return n_->atom; }
StateFormula StateFormula::lhs() const { return StateFormula(n_->a); }
StateFormula StateFormula::rhs() const { return StateFormula(n_->b); }
PathFormula StateFormula::path() const { return PathFormula(n_->path); }
Cmp StateFormula::cmp() const { return n_->cmp; }
const Rational& StateFormula::bound() const { return n_->bound; }

std::uint32_t PathFormula::id() const { return n_->id; }
PKind PathFormula::kind() const { return n_->kind; }
StateFormula PathFormula::lhs() const { return StateFormula(n_->a); }
StateFormula PathFormula::rhs() const { return StateFormula(n_->b); }
std::uint32_t PathFormula::steps() const { return n_->k; }

// ---- constructors ----

namespace {
const StateNode* raw(StateFormula f) { return f.node(); }
const PathNode* raw(PathFormula f) { return f.node(); }

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}
}  // namespace

StateFormula tt() {
  StateNode n{};
  n.kind = SKind::True;
  return StateFormula(interner().state(std::move(n), "T"));
}

StateFormula atom(const Prop& p) {
  StateNode n{};
  n.kind = SKind::Atom;
  n.atom = p;
  std::string key = "A";
  key += static_cast<char>('a' + static_cast<int>(p.family));
  key += p.name();
  return StateFormula(interner().state(std::move(n), key));
}

StateFormula neg(StateFormula f) {
  require(f.valid(), "null formula");
  StateNode n{};
  n.kind = SKind::Not;
  n.a = raw(f);
  return StateFormula(interner().state(std::move(n), "N" + std::to_string(f.id())));
}

StateFormula conj(StateFormula a, StateFormula b) {
  require(a.valid() && b.valid(), "null formula");
  StateNode n{};
  n.kind = SKind::And;
  n.a = raw(a);
  n.b = raw(b);
  return StateFormula(interner().state(std::move(n), "&" + std::to_string(a.id()) + "," + std::to_string(b.id())));
}

StateFormula prob(PathFormula p, Cmp c, const Rational& bound) {
  require(p.valid(), "null path formula");
  if (bound < 0 || bound > 1) throw std::invalid_argument("probability bound " + to_string(bound) + " outside [0,1]");
  StateNode n{};
  n.kind = SKind::Prob;
  n.path = raw(p);
  n.cmp = c;
  n.bound = bound;
  n.bound.canonicalize();
  std::string key = "P" + std::to_string(static_cast<int>(c)) + to_string(n.bound) + ":" + std::to_string(p.id());
  return StateFormula(interner().state(std::move(n), key));
}

PathFormula next(StateFormula f) {
  require(f.valid(), "null formula");
  PathNode n{};
  n.kind = PKind::Next;
  n.a = raw(f);
  return PathFormula(interner().path(n, "X" + std::to_string(f.id())));
}

PathFormula until(StateFormula a, StateFormula b) {
  require(a.valid() && b.valid(), "null formula");
  PathNode n{};
  n.kind = PKind::Until;
  n.a = raw(a);
  n.b = raw(b);
  return PathFormula(interner().path(n, "U" + std::to_string(a.id()) + "," + std::to_string(b.id())));
}

PathFormula bounded_until(StateFormula a, StateFormula b, std::uint32_t k) {
  require(a.valid() && b.valid(), "null formula");
  PathNode n{};
  n.kind = PKind::BoundedUntil;
  n.a = raw(a);
  n.b = raw(b);
  n.k = k;
  return PathFormula(
      interner().path(n, "B" + std::to_string(k) + ":" + std::to_string(a.id()) + "," + std::to_string(b.id())));
}

StateFormula ff() { return neg(tt()); }
StateFormula disj(StateFormula a, StateFormula b) { return neg(conj(neg(a), neg(b))); }
StateFormula implies(StateFormula a, StateFormula b) { return neg(conj(a, neg(b))); }

StateFormula conj(const std::vector<StateFormula>& fs) {
  if (fs.empty()) return tt();
  StateFormula acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = conj(acc, fs[i]);
  return acc;
}

StateFormula disj(const std::vector<StateFormula>& fs) {
  if (fs.empty()) return ff();
  StateFormula acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = disj(acc, fs[i]);
  return acc;
}

StateFormula mk_exclusive(PropSet L, PropSet O) {
  canonicalize(L);
  canonicalize(O);
  if (!std::includes(O.begin(), O.end(), L.begin(), L.end()))
    throw std::invalid_argument("mk_exclusive: L is not a subset of O");
  std::vector<StateFormula> lits;
  lits.reserve(O.size());
  for (const Prop& p : O) {
    bool pos = std::binary_search(L.begin(), L.end(), p);
    lits.push_back(pos ? atom(p) : neg(atom(p)));
  }
  return conj(lits);
}

StateFormula mk_f(Cmp c, const Rational& bound, StateFormula f) { return prob(until(tt(), f), c, bound); }

StateFormula mk_f_bounded(Cmp c, const Rational& bound, std::uint32_t k, StateFormula f) {
  return prob(bounded_until(tt(), f, k), c, bound);
}

StateFormula mk_g(Cmp c, const Rational& bound, StateFormula f) {
  if (bound < 0 || bound > 1) throw std::invalid_argument("probability bound " + to_string(bound) + " outside [0,1]");
  Rational dual = 1 - bound;
  return prob(until(tt(), neg(f)), mirror(c), dual);
}

// ---- parser ----

ParseError::ParseError(const std::string& msg, int l, int c)
    : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), column(c) {}

namespace {

enum class Tok { Ident, Nat, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto adv = [&](std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') adv(1);
      continue;
    }
    int l = line, cl = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), l, cl});
      adv(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Nat, std::string(s.substr(i, j - i)), l, cl});
      adv(j - i);
      continue;
    }
    static const char* two[] = {"=>", "<=", ">=", "!="};
    bool matched = false;
    for (const char* t : two) {
      if (s.substr(i, 2) == t) {
        out.push_back({Tok::Sym, t, l, cl});
        adv(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("()[]!&|/<>=").find(c) != std::string_view::npos) {
      out.push_back({Tok::Sym, std::string(1, c), l, cl});
      adv(1);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

bool is_keyword(const std::string& s) {
  return s == "P" || s == "X" || s == "U" || s == "F" || s == "G" || s == "true" || s == "false";
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  StateFormula parse_all() {
    StateFormula f = state();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek() const { return t_[pos_]; }
  bool is_sym(const char* s) const { return peek().kind == Tok::Sym && peek().text == s; }
  bool is_ident(const char* s) const { return peek().kind == Tok::Ident && peek().text == s; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().col); }
  void expect_sym(const char* s) {
    if (!is_sym(s)) fail(std::string("expected '") + s + "'");
    ++pos_;
  }

  StateFormula state() {
    StateFormula lhs = disjunction();
    if (is_sym("=>")) {
      ++pos_;
      return implies(lhs, state());
    }
    return lhs;
  }

  StateFormula disjunction() {
    StateFormula f = conjunction();
    while (is_sym("|")) {
      ++pos_;
      f = disj(f, conjunction());
    }
    return f;
  }

  StateFormula conjunction() {
    StateFormula f = unary();
    while (is_sym("&")) {
      ++pos_;
      f = conj(f, unary());
    }
    return f;
  }

  StateFormula unary() {
    if (is_sym("!")) {
      ++pos_;
      return neg(unary());
    }
    return primary();
  }

  StateFormula primary() {
    const Token& tk = peek();
    if (tk.kind == Tok::Sym && tk.text == "(") {
      ++pos_;
      StateFormula f = state();
      expect_sym(")");
      return f;
    }
    if (tk.kind != Tok::Ident) fail("expected a state formula");
    if (tk.text == "true") {
      ++pos_;
      return tt();
    }
    if (tk.text == "false") {
      ++pos_;
      return ff();
    }
    if (tk.text == "P") {
      ++pos_;
      return probability();
    }
    if (is_keyword(tk.text)) fail("keyword '" + tk.text + "' cannot be used as an atom");
    ++pos_;
    return atom(Prop::named(tk.text));
  }

  Cmp comparison() {
    static const std::pair<const char*, Cmp> table[] = {{"<=", Cmp::Le}, {"<", Cmp::Lt}, {">=", Cmp::Ge},
                                                        {">", Cmp::Gt},  {"=", Cmp::Eq}, {"!=", Cmp::Ne}};
    for (auto& [txt, c] : table) {
      if (is_sym(txt)) {
        ++pos_;
        return c;
      }
    }
    fail("expected a comparison operator");
  }

  std::uint32_t natural() {
    if (peek().kind != Tok::Nat) fail("expected a natural number");
    std::string txt = peek().text;
    ++pos_;
    if (txt.size() > 9) fail("step bound too large");
    return static_cast<std::uint32_t>(std::stoul(txt));
  }

  Rational rational() {
    if (peek().kind != Tok::Nat) fail("expected a rational bound");
    int l = peek().line, c = peek().col;
    std::string txt = peek().text;
    ++pos_;
    if (is_sym("/")) {
      ++pos_;
      if (peek().kind != Tok::Nat) fail("expected a denominator");
      txt += "/" + peek().text;
      ++pos_;
    }
    try {
      return parse_rational(txt);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), l, c);
    }
  }

  StateFormula probability() {
    Cmp c = comparison();
    int l = peek().line, col = peek().col;
    Rational r = rational();
    if (r > 1) throw ParseError("bound " + to_string(r) + " outside [0,1]", l, col);
    expect_sym("[");
    StateFormula out;
    if (is_ident("X")) {
      ++pos_;
      out = prob(next(state()), c, r);
    } else if (is_ident("G")) {
      ++pos_;
      out = mk_g(c, r, state());
    } else if (is_ident("F")) {
      ++pos_;
      if (is_sym("<=")) {
        ++pos_;
        std::uint32_t k = natural();
        out = mk_f_bounded(c, r, k, state());
      } else {
        out = mk_f(c, r, state());
      }
    } else {
      StateFormula lhs = state();
      if (!is_ident("U")) fail("expected 'U'");
      ++pos_;
      if (is_sym("<=")) {
        ++pos_;
        std::uint32_t k = natural();
        out = prob(bounded_until(lhs, state(), k), c, r);
      } else {
        out = prob(until(lhs, state()), c, r);
      }
    }
    expect_sym("]");
    return out;
  }

  std::vector<Token> t_;
  std::size_t pos_ = 0;
};

void print_state(StateFormula f, std::string& out);

void print_path_into(PathFormula p, std::string& out) {
  switch (p.kind()) {
    case PKind::Next:
      out += "X ";
      print_state(p.lhs(), out);
      break;
    case PKind::Until:
      print_state(p.lhs(), out);
      out += " U ";
      print_state(p.rhs(), out);
      break;
    case PKind::BoundedUntil:
      print_state(p.lhs(), out);
      out += " U<=" + std::to_string(p.steps()) + " ";
      print_state(p.rhs(), out);
      break;
  }
}

// Every printed form is self-delimiting, so no precedence handling is needed.
void print_state(StateFormula f, std::string& out) {
  switch (f.kind()) {
    case SKind::True: out += "true"; break;
    case SKind::Atom: out += f.atom().name(); break;
    case SKind::Not:
      out += "!";
      print_state(f.lhs(), out);
      break;
    case SKind::And:
      out += "(";
      print_state(f.lhs(), out);
      out += " & ";
      print_state(f.rhs(), out);
      out += ")";
      break;
    case SKind::Prob:
      out += "P";
      out += cmp_text(f.cmp());
      out += to_string(f.bound());
      out += "[";
      print_path_into(f.path(), out);
      out += "]";
      break;
  }
}

}  // namespace

StateFormula parse_formula(std::string_view text) { return Parser(tokenize(text)).parse_all(); }

std::string print_formula(StateFormula f) {
  std::string out;
  print_state(f, out);
  return out;
}

std::string print_path(PathFormula p) {
  std::string out;
  print_path_into(p, out);
  return out;
}

// ---- traversal ----

namespace {

template <typename Visit>
void children(StateFormula f, Visit&& visit) {
  switch (f.kind()) {
    case SKind::True:
    case SKind::Atom: break;
    case SKind::Not: visit(f.lhs()); break;
    case SKind::And:
      visit(f.lhs());
      visit(f.rhs());
      break;
    case SKind::Prob: {
      PathFormula p = f.path();
      visit(p.lhs());
      if (p.kind() != PKind::Next) visit(p.rhs());
      break;
    }
  }
}

}  // namespace

std::vector<StateFormula> subformulae(StateFormula root) {
  std::vector<StateFormula> order;
  std::unordered_set<std::uint32_t> done;
  // Iterative post-order: deep conjunction chains would overflow recursion.
  std::vector<std::pair<StateFormula, bool>> stack{{root, false}};
  while (!stack.empty()) {
    auto [f, expanded] = stack.back();
    stack.pop_back();
    if (done.count(f.id())) continue;
    if (expanded) {
      done.insert(f.id());
      order.push_back(f);
      continue;
    }
    stack.push_back({f, true});
    std::vector<StateFormula> kids;
    children(f, [&](StateFormula c) { kids.push_back(c); });
    for (auto it = kids.rbegin(); it != kids.rend(); ++it)
      if (!done.count(it->id())) stack.push_back({*it, false});
  }
  return order;
}

PropSet atoms_of(StateFormula f) {
  PropSet out;
  for (StateFormula g : subformulae(f))
    if (g.kind() == SKind::Atom) out.push_back(g.atom());
  canonicalize(out);
  return out;
}

FormulaStats stats(StateFormula f) {
  FormulaStats s;
  std::unordered_map<std::uint32_t, mpz_class> size;
  std::unordered_set<std::uint32_t> paths;
  for (StateFormula g : subformulae(f)) {
    mpz_class n = 1;
    if (g.kind() == SKind::Prob) {
      paths.insert(g.path().id());
      n += 1;  // the path node
    }
    children(g, [&](StateFormula c) { n += size.at(c.id()); });
    size[g.id()] = n;
    ++s.state_nodes;
  }
  s.path_nodes = paths.size();
  s.tree_size = size.at(f.id());
  return s;
}

std::size_t interned_count() { return interner().size(); }

}  // namespace pctlwb
