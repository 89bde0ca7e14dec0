#include "pctlwb/witness.hpp"

#include "pctlwb/reduction.hpp"

#include <algorithm>
#include <concepts>
#include <functional>
#include <deque>
#include <optional>

namespace pctlwb {

std::string to_string(const WitnessState& s) {
  std::string out = "[" + std::to_string(s.index) + ", {";
  for (std::size_t i = 0; i < s.props.size(); ++i) out += (i ? "," : "") + s.props[i].name();
  return out + "}, " + std::to_string(s.n1) + ", " + std::to_string(s.n2) + "]";
}

namespace {

bool is_live(const Prop& p) { return p.family == Family::r || p.family == Family::R; }

}  // namespace

bool is_free(const PropSet& props) { return std::none_of(props.begin(), props.end(), is_live); }

Vec2 counter_vec(const Geometry& g, std::uint64_t n) { return g.inc_iter(static_cast<std::size_t>(n)); }

std::uint64_t counter_field(const WitnessState& s, int k) { return k == 1 ? s.n1 : s.n2; }

namespace {

// Transition weight affine in the ā-split parameters.
struct Affine {
  Rational c;
  std::map<std::size_t, Rational> coeff;

  Affine() = default;
  // Implicit so gmp expressions and constants can stand in for weights.
  template <class T>
    requires std::constructible_from<Rational, const T&>
  Affine(const T& v) : c(v) {}  // NOLINT
  static Affine param(std::size_t id) {
    Affine a;
    a.coeff[id] = 1;
    return a;
  }
  Affine& operator+=(const Affine& o) {
    c += o.c;
    for (const auto& [k, v] : o.coeff)
      if ((coeff[k] += v) == 0) coeff.erase(k);
    return *this;
  }
  Affine operator-() const {
    Affine a = *this;
    a.c = -a.c;
    for (auto& [k, v] : a.coeff) v = -v;
    return a;
  }
  Rational eval(const std::vector<Rational>& vals) const {
    Rational v = c;
    for (const auto& [k, w] : coeff) v += w * vals.at(k);
    return v;
  }
};

Affine operator-(Affine a, const Affine& b) { return a += -b; }

struct Edge {
  WitnessState to;
  Affine p;
  std::string rule;
};

struct Param {
  StateId state;
  int copy;
  int phase;
  Label label;
  Label next_label;
  std::uint64_t counter;
  Rational printed;
};

struct Live {
  std::vector<Prop> r[3];  // by copy, index 0 unused
  std::vector<Prop> R[3];
  PropSet rest;
};

Live split(const PropSet& props) {
  Live l;
  for (const Prop& p : props) {
    if (p.family == Family::r) l.r[p.copy].push_back(p);
    else if (p.family == Family::R) l.R[p.copy].push_back(p);
    else l.rest.push_back(p);
  }
  return l;
}

class Builder {
 public:
  Builder(const CounterMachine& m, const LassoComputation& lasso, const WitnessConfig& cfg)
      : m_(m), lasso_(lasso), cfg_(cfg), geo_(cfg.constants) {}

  void close();
  MarkovChain instantiate(const std::vector<Rational>& vals, bool strict) const;
  std::vector<Rational> solve_params(std::vector<Diagnostic>& diags);

  std::vector<WitnessState> states;
  std::map<WitnessState, StateId> ids;
  std::vector<std::vector<Edge>> rows;
  std::vector<Param> params;
  std::vector<Diagnostic> diags;

 private:
  StateId intern(const WitnessState& s);
  Vec2 V(std::uint64_t n) const { return counter_vec(geo_, n); }
  Prop low(Family f, int k, int i, Label l) const { return Prop::lower(f, k, i, l); }
  Prop up(Family f, int k, int i) const { return Prop::upper(f, k, i); }
  WitnessState make(std::size_t j, PropSet base, std::initializer_list<Prop> add, std::uint64_t n1,
                    std::uint64_t n2) const {
    base.insert(base.end(), add.begin(), add.end());
    canonicalize(base);
    return WitnessState{j, std::move(base), n1, n2};
  }
  void residual(StateId s, std::vector<Edge>& row, const WitnessState& target, const std::string& rule,
                const std::optional<Rational>& printed, int split = 1);
  void expand(StateId s);
  void main_rule(StateId s, const WitnessState& st, const Live& live);
  void mixed_rule(StateId s, const WitnessState& st, const Live& live, int k);
  void single_r_rule(StateId s, const WitnessState& st, const Live& live, int k);
  void r_pair_rule(StateId s, const WitnessState& st, const Live& live);
  void single_R_rule(StateId s, const WitnessState& st, const Live& live, int k);

  const CounterMachine& m_;
  const LassoComputation& lasso_;
  const WitnessConfig& cfg_;
  Geometry geo_;
  std::deque<StateId> queue_;
};

StateId Builder::intern(const WitnessState& s) {
  if (auto it = ids.find(s); it != ids.end()) return it->second;
  if (states.size() >= cfg_.state_cap)
    throw WitnessError(WitnessError::Kind::StateCap, "state cap " + std::to_string(cfg_.state_cap) + " exceeded");
  StateId id = static_cast<StateId>(states.size());
  states.push_back(s);
  ids.emplace(s, id);
  rows.emplace_back();
  queue_.push_back(id);
  return id;
}

void Builder::close() {
  const Configuration& c0 = lasso_.configs.at(0);
  intern(make(0, {}, {low(Family::r, 1, 0, c0.label), low(Family::r, 2, 0, c0.label)}, c0.counters.at(0),
              c0.counters.at(1)));
  while (!queue_.empty()) {
    StateId s = queue_.front();
    queue_.pop_front();
    expand(s);
  }
}

void Builder::residual(StateId s, std::vector<Edge>& row, const WitnessState& target, const std::string& rule,
                       const std::optional<Rational>& printed, int split) {
  Affine sum;
  for (const Edge& e : row) sum += e.p;
  Affine q = Affine(Rational(1)) - sum;
  if (printed && (!q.coeff.empty() || q.c != *printed)) {
    std::string got = to_string(q.c);
    for (const auto& [k, w] : q.coeff)
      if (w != 0) got += " + (" + to_string(w) + ")*r" + std::to_string(k);
    diags.push_back({"residual-mismatch", rule + " at " + to_string(states[s]) + ": printed " + to_string(*printed) +
                                              ", row sum needs " + got});
  }
  if (split == 1) {
    row.push_back({target, q, rule + ":q"});
  } else {
    Affine half;
    half.c = q.c / split;
    for (const auto& [k, w] : q.coeff) half.coeff[k] = w / split;
    row.push_back({target, half, rule + ":q"});
  }
}

void Builder::expand(StateId s) {
  const WitnessState st = states[s];
  Live live = split(st.props);
  const std::size_t nr1 = live.r[1].size(), nr2 = live.r[2].size(), nR1 = live.R[1].size(), nR2 = live.R[2].size();
  auto fail = [&](const std::string& why) {
    throw WitnessError(WitnessError::Kind::NoRule, "no closure rule for " + to_string(st) + ": " + why);
  };
  if (nr1 + nr2 + nR1 + nR2 == 0) {
    rows[s].push_back({st, Affine(Rational(1)), "free"});
  } else if (nr1 == 1 && nr2 == 1 && nR1 + nR2 == 0) {
    main_rule(s, st, live);
  } else if (nr1 == 1 && nR2 == 1 && nr2 + nR1 == 0) {
    mixed_rule(s, st, live, 1);
  } else if (nr2 == 1 && nR1 == 1 && nr1 + nR2 == 0) {
    mixed_rule(s, st, live, 2);
  } else if (nr1 == 1 && nr2 + nR1 + nR2 == 0) {
    single_r_rule(s, st, live, 1);
  } else if (nr2 == 1 && nr1 + nR1 + nR2 == 0) {
    single_r_rule(s, st, live, 2);
  } else if (nR1 == 1 && nR2 == 1 && nr1 + nr2 == 0) {
    r_pair_rule(s, st, live);
  } else if (nR1 == 1 && nr1 + nr2 + nR2 == 0) {
    single_R_rule(s, st, live, 1);
  } else if (nR2 == 1 && nr1 + nr2 + nR1 == 0) {
    single_R_rule(s, st, live, 2);
  } else {
    fail("unexpected combination of r/R atoms");
  }
  // Merge parallel edges so each target appears once.
  auto& row = rows[s];
  std::vector<Edge> merged;
  for (Edge& e : row) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const Edge& x) { return x.to == e.to; });
    if (it == merged.end()) merged.push_back(std::move(e));
    else {
      it->p += e.p;
      it->rule += "+" + e.rule;
    }
  }
  row = std::move(merged);
  for (const Edge& e : row) intern(e.to);
}

void Builder::main_rule(StateId s, const WitnessState& st, const Live& live) {
  const Prop& r1 = live.r[1][0];
  const Prop& r2 = live.r[2][0];
  if (r1.phase != r2.phase || r1.label != r2.label)
    throw WitnessError(WitnessError::Kind::NoRule, "main state with mismatched r atoms: " + to_string(st));
  const int i = r1.phase;
  const Label l = r1.label;
  const std::size_t j = st.index;
  if (j >= lasso_.beta()) throw WitnessError(WitnessError::Kind::NoRule, "index beyond lasso: " + to_string(st));
  const Configuration& conf = lasso_.configs[j];
  if (conf.label != l || conf.counters.at(0) != st.n1 || conf.counters.at(1) != st.n2)
    throw WitnessError(WitnessError::Kind::NoRule, "main state disagrees with conf_" + std::to_string(j));
  const std::size_t nj = j + 1 < lasso_.beta() ? j + 1 : lasso_.alpha;
  const Configuration& next = lasso_.configs[nj];
  const Label l2 = next.label;
  const int si = succ_phase(i);
  const std::uint64_t c1 = st.n1, c2 = st.n2;
  const Vec2 v1 = V(c1), v2 = V(c2);
  const Rational& d = cfg_.constants.delta;
  const Rational& rho = cfg_.constants.rho;
  const PropSet& al = live.rest;
  const Prop R1 = up(Family::R, 1, i), R2 = up(Family::R, 2, i);
  auto x1 = [&](Family f) { return low(f, 1, i, l); };
  auto x2 = [&](Family f) { return low(f, 2, i, l); };
  const WitnessState next_main = make(nj, al, {low(Family::r, 1, si, l2), low(Family::r, 2, si, l2)},
                                      next.counters.at(0), next.counters.at(1));
  auto& row = rows[s];
  const Instruction& ins = m_.at(l);
  const bool inc1 = ins.updates.at(0) == Update::Inc, inc2 = ins.updates.at(1) == Update::Inc;
  auto dec0 = [](std::uint64_t c) { return c == 0 ? 0 : c - 1; };
  auto new_param = [&](int copy, std::uint64_t c) {
    Rational printed = rho - V(c + 1).v2 * (1 - V(c).v1);
    params.push_back(Param{s, copy, i, l, l2, c, printed});
    return Affine::param(params.size() - 1);
  };

  if (!inc1 && !inc2) {
    const std::string rule = "main/dec,dec";
    row.push_back({make(j, al, {x1(Family::a), x2(Family::d), R1, R2}, 0, 0), v1.v1, rule});
    row.push_back({make(j, al, {x1(Family::b), x2(Family::d), R1, R2}, 0, 0), v1.v2, rule});
    row.push_back({make(j, al, {x1(Family::c), x2(Family::d), R1, R2}, 0, 0), d - v1.v1, rule});
    row.push_back({make(j, al, {x1(Family::d), x2(Family::a), R1, R2}, 0, 0), v2.v1, rule});
    row.push_back({make(j, al, {x1(Family::d), x2(Family::b), R1, R2}, 0, 0), v2.v2, rule});
    row.push_back({make(j, al, {x1(Family::d), x2(Family::c), R1, R2}, 0, 0), d - v2.v1, rule});
    Rational p, pp = 0;
    if (v1.v1 > v2.v1) {
      p = v2.v1;
      pp = v1.v1 - v2.v1;
      row.push_back({next_main, p, rule});
      row.push_back({make(j, al, {low(Family::r, 1, si, l2), x2(Family::d), up(Family::R, 2, si)}, dec0(c1), 0), pp,
                     rule + ":split1"});
    } else if (v1.v1 < v2.v1) {
      p = v1.v1;
      pp = v2.v1 - v1.v1;
      row.push_back({next_main, p, rule});
      row.push_back({make(j, al, {x1(Family::d), low(Family::r, 2, si, l2), up(Family::R, 1, si)}, 0, dec0(c2)), pp,
                     rule + ":split2"});
    } else {
      p = v1.v1;
      row.push_back({next_main, p, rule});
    }
    residual(s, row, make(j, al, {x1(Family::d), x2(Family::d), R1, R2}, 0, 0), rule,
             Rational(1 - v1.v2 - v2.v2 - 2 * d - p - pp));
  } else if (!inc1 && inc2) {
    const std::string rule = "main/dec,inc";
    Affine r = new_param(2, c2);
    row.push_back({make(j, al, {x1(Family::a), x2(Family::d), R1, R2}, 0, c2 + 1), v1.v1, rule});
    row.push_back({make(j, al, {x1(Family::b), x2(Family::d), R1, R2}, 0, c2 + 1), v1.v2, rule});
    row.push_back({make(j, al, {x1(Family::c), x2(Family::d), R1, R2}, 0, c2 + 1), d - v1.v1, rule});
    row.push_back({make(j, al, {x1(Family::d), x2(Family::a), R1, R2}, 0, dec0(c2)), Affine(v2.v1) - r, rule});
    row.push_back({make(j, al, {x1(Family::d), x2(Family::abar), R1, R2}, 0, dec0(c2)), r, rule});
    row.push_back({make(j, al, {x1(Family::d), x2(Family::b), R1, R2}, 0, c2 + 1), v2.v2, rule});
    row.push_back({make(j, al, {x1(Family::d), x2(Family::c), R1, R2}, 0, c2 + 1), d - v2.v2, rule});
    row.push_back({next_main, v1.v1, rule});
    residual(s, row, make(j, al, {x1(Family::d), x2(Family::d), R1, R2}, 0, c2 + 1), rule,
             Rational(1 - v1.v2 - v2.v1 - v1.v1 - 2 * d));
  } else if (inc1 && !inc2) {
    const std::string rule = "main/inc,dec";
    Affine r = new_param(1, c1);
    row.push_back({make(j, al, {x1(Family::d), x2(Family::a), R1, R2}, c1 + 1, 0), v2.v1, rule});
    row.push_back({make(j, al, {x1(Family::d), x2(Family::b), R1, R2}, c1 + 1, 0), v2.v2, rule});
    row.push_back({make(j, al, {x1(Family::d), x2(Family::c), R1, R2}, c1 + 1, 0), d - v2.v1, rule});
    row.push_back({make(j, al, {x1(Family::a), x2(Family::d), R1, R2}, dec0(c1), 0), Affine(v1.v1) - r, rule});
    row.push_back({make(j, al, {x1(Family::abar), x2(Family::d), R1, R2}, dec0(c1), 0), r, rule});
    row.push_back({make(j, al, {x1(Family::b), x2(Family::d), R1, R2}, c1 + 1, 0), v1.v2, rule});
    row.push_back({make(j, al, {x1(Family::c), x2(Family::d), R1, R2}, c1 + 1, 0), d - v1.v2, rule});
    row.push_back({next_main, v2.v1, rule});
    residual(s, row, make(j, al, {x1(Family::d), x2(Family::d), R1, R2}, c1 + 1, 0), rule,
             Rational(1 - v2.v2 - v1.v1 - v2.v1 - 2 * d));
  } else {
    const std::string rule = "main/inc,inc";
    Affine ra = new_param(1, c1);
    Affine rb = new_param(2, c2);
    row.push_back({make(j, al, {x1(Family::a), x2(Family::d), R1, R2}, dec0(c1), c2 + 1), Affine(v1.v1) - ra, rule});
    row.push_back({make(j, al, {x1(Family::abar), x2(Family::d), R1, R2}, dec0(c1), c2 + 1), ra, rule});
    row.push_back({make(j, al, {x1(Family::b), x2(Family::d), R1, R2}, c1 + 1, c2 + 1), v1.v2, rule});
    row.push_back({make(j, al, {x1(Family::c), x2(Family::d), R1, R2}, c1 + 1, c2 + 1), d - v1.v2, rule});
    row.push_back({make(j, al, {x1(Family::d), x2(Family::a), R1, R2}, c1 + 1, dec0(c2)), Affine(v2.v1) - rb, rule});
    row.push_back({make(j, al, {x1(Family::d), x2(Family::abar), R1, R2}, c1 + 1, dec0(c2)), rb, rule});
    row.push_back({make(j, al, {x1(Family::d), x2(Family::b), R1, R2}, c1 + 1, c2 + 1), v2.v2, rule});
    row.push_back({make(j, al, {x1(Family::d), x2(Family::c), R1, R2}, c1 + 1, c2 + 1), d - v2.v2, rule});
    // Two q-entries share the residual; the printed value is for 2q.
    std::vector<Edge> probe = row;
    Affine sum;
    for (const Edge& e : probe) sum += e.p;
    Affine q2 = Affine(Rational(1)) - sum;
    Rational printed2q = 1 - v2.v2 - v1.v1 - v2.v1 - 2 * d;
    if (!q2.coeff.empty() || q2.c != printed2q)
      diags.push_back({"residual-mismatch", rule + " at " + to_string(st) + ": printed 2q = " + to_string(printed2q) +
                                                ", row sum needs 2q = " + to_string(q2.c)});
    Affine half;
    half.c = q2.c / 2;
    for (const auto& [k, w] : q2.coeff) half.coeff[k] = w / 2;
    row.push_back({next_main, half, rule + ":q"});
    row.push_back({make(j, al, {x1(Family::d), x2(Family::d), R1, R2}, c1 + 1, c2 + 1), half, rule + ":q"});
  }
}

void Builder::mixed_rule(StateId s, const WitnessState& st, const Live& live, int k) {
  const int o = 3 - k;
  const Prop& rk = live.r[k][0];
  const Prop& Ro = live.R[o][0];
  if (rk.phase != Ro.phase)
    throw WitnessError(WitnessError::Kind::NoRule, "mixed state with differing phases: " + to_string(st));
  const int i = rk.phase;
  const Label l = rk.label;
  const std::uint64_t c = counter_field(st, k);
  const Vec2 v = V(c);
  const auto& K = cfg_.constants;
  const PropSet& al = live.rest;
  auto fields = [&](std::uint64_t ck) { return k == 1 ? std::make_pair(ck, std::uint64_t{0}) : std::make_pair(std::uint64_t{0}, ck); };
  auto st_of = [&](std::initializer_list<Prop> add, std::uint64_t ck) {
    auto [a, b] = fields(ck);
    return make(st.index, al, add, a, b);
  };
  const Prop Rk = up(Family::R, k, i), Do = up(Family::D, o, i);
  const Prop dk = low(Family::d, k, i, l);
  const std::string rule = "mixed/r" + std::to_string(k);
  auto& row = rows[s];
  row.push_back({st_of({low(Family::a, k, i, l), Rk, Do}, 0), v.v1, rule});
  row.push_back({st_of({low(Family::b, k, i, l), Rk, Do}, 0), v.v2, rule});
  row.push_back({st_of({low(Family::c, k, i, l), Rk, Do}, 0), K.delta - v.v1, rule});
  row.push_back({st_of({low(Family::r, k, succ_phase(i), l), Do}, c == 0 ? 0 : c - 1), v.v1, rule});
  row.push_back({st_of({dk, Rk, up(Family::A, o, i)}, 0), K.z.v1, rule});
  row.push_back({st_of({dk, Rk, up(Family::B, o, i)}, 0), K.z.v2, rule});
  row.push_back({st_of({dk, Rk, up(Family::C, o, i)}, 0), K.delta - K.z.v1, rule});
  row.push_back({st_of({dk, Rk, up(Family::E, o, i)}, 0), K.lambda, rule});
  row.push_back({st_of({dk, up(Family::R, k, succ_phase(i)), up(Family::R, o, succ_phase(i)), Prop::k(o)}, 0), K.z.v1, rule});
  residual(s, row, st_of({dk, Rk, Do}, 0), rule,
           Rational(1 - v.v2 - v.v1 - K.z.v2 - K.z.v1 - 2 * K.delta - K.lambda));
}

void Builder::single_r_rule(StateId s, const WitnessState& st, const Live& live, int k) {
  const Prop& rk = live.r[k][0];
  const int i = rk.phase;
  const Label l = rk.label;
  const std::uint64_t c = counter_field(st, k);
  const Vec2 v = V(c);
  const PropSet& al = live.rest;
  auto st_of = [&](std::initializer_list<Prop> add, std::uint64_t ck) {
    return k == 1 ? make(st.index, al, add, ck, 0) : make(st.index, al, add, 0, ck);
  };
  const Prop Rk = up(Family::R, k, i);
  const std::string rule = "single-r" + std::to_string(k);
  auto& row = rows[s];
  row.push_back({st_of({low(Family::a, k, i, l), Rk}, 0), v.v1, rule});
  row.push_back({st_of({low(Family::b, k, i, l), Rk}, 0), v.v2, rule});
  row.push_back({st_of({low(Family::c, k, i, l), Rk}, 0), cfg_.constants.delta - v.v1, rule});
  row.push_back({st_of({low(Family::r, k, succ_phase(i), l)}, c == 0 ? 0 : c - 1), v.v1, rule});
  residual(s, row, st_of({low(Family::d, k, i, l), Rk}, 0), rule, Rational(1 - v.v2 - v.v1 - cfg_.constants.delta));
}

void Builder::r_pair_rule(StateId s, const WitnessState& st, const Live& live) {
  const Prop& R1 = live.R[1][0];
  const Prop& R2 = live.R[2][0];
  if (R1.phase != R2.phase)
    throw WitnessError(WitnessError::Kind::NoRule, "R-pair with differing phases: " + to_string(st));
  const int i = R1.phase, si = succ_phase(i);
  const Vec2 v1 = V(st.n1), v2 = V(st.n2);
  const auto& K = cfg_.constants;
  const PropSet& al = live.rest;
  const std::size_t j = st.index;
  auto U = [&](Family f, int k) { return up(f, k, i); };
  const std::string rule = "R-pair";
  auto& row = rows[s];
  row.push_back({make(j, al, {U(Family::A, 1), U(Family::D, 2)}, 0, 0), v1.v1, rule});
  row.push_back({make(j, al, {U(Family::B, 1), U(Family::D, 2)}, 0, 0), v1.v2, rule});
  row.push_back({make(j, al, {U(Family::C, 1), U(Family::D, 2)}, 0, 0), K.delta - v1.v1, rule});
  row.push_back({make(j, al, {U(Family::E, 1), U(Family::D, 2)}, 0, 0), K.lambda, rule});
  row.push_back({make(j, al, {up(Family::R, 1, si), Prop::k(1), U(Family::D, 2)}, st.n1 == 0 ? 0 : st.n1 - 1, 0), v1.v1, rule});
  row.push_back({make(j, al, {U(Family::D, 1), U(Family::A, 2)}, 0, 0), v2.v1, rule});
  row.push_back({make(j, al, {U(Family::D, 1), U(Family::B, 2)}, 0, 0), v2.v2, rule});
  row.push_back({make(j, al, {U(Family::D, 1), U(Family::C, 2)}, 0, 0), K.delta - v2.v1, rule});
  row.push_back({make(j, al, {U(Family::D, 1), U(Family::E, 2)}, 0, 0), K.lambda, rule});
  row.push_back({make(j, al, {U(Family::D, 1), up(Family::R, 2, si), Prop::k(2)}, 0, st.n2 == 0 ? 0 : st.n2 - 1), v2.v1, rule});
  residual(s, row, make(j, al, {U(Family::D, 1), U(Family::D, 2)}, 0, 0), rule,
           Rational(1 - v1.v2 - v1.v1 - v2.v2 - v2.v1 - 2 * K.lambda - 2 * K.delta));
}

void Builder::single_R_rule(StateId s, const WitnessState& st, const Live& live, int k) {
  const int i = live.R[k][0].phase;
  const std::uint64_t c = counter_field(st, k);
  const Vec2 v = V(c);
  const PropSet& al = live.rest;
  auto st_of = [&](std::initializer_list<Prop> add, std::uint64_t ck) {
    return k == 1 ? make(st.index, al, add, ck, 0) : make(st.index, al, add, 0, ck);
  };
  const std::string rule = "single-R" + std::to_string(k);
  auto& row = rows[s];
  row.push_back({st_of({up(Family::A, k, i)}, 0), v.v1, rule});
  row.push_back({st_of({up(Family::B, k, i)}, 0), v.v2, rule});
  row.push_back({st_of({up(Family::C, k, i)}, 0), cfg_.constants.delta - v.v1, rule});
  row.push_back({st_of({up(Family::R, k, succ_phase(i)), Prop::k(k)}, c == 0 ? 0 : c - 1), v.v1, rule});
  residual(s, row, st_of({up(Family::D, k, i)}, 0), rule, Rational(1 - v.v2 - v.v1 - cfg_.constants.delta));
}

MarkovChain Builder::instantiate(const std::vector<Rational>& vals, bool strict) const {
  MarkovChain chain;
  chain.name = m_.name + "_witness";
  for (std::size_t s = 0; s < states.size(); ++s) chain.add_state("s" + std::to_string(s), states[s].props);
  for (std::size_t s = 0; s < states.size(); ++s) {
    for (const Edge& e : rows[s]) {
      Rational p = e.p.eval(vals);
      if (p <= 0) {
        if (!strict && p == 0) continue;
        throw WitnessError(WitnessError::Kind::NonPositive,
                           "nonpositive probability " + to_string(p) + " from " + to_string(states[s]) + " to " +
                               to_string(e.to) + " (rule " + e.rule + "; lambda=" + to_string(cfg_.constants.lambda) +
                               ", z=" + to_string(cfg_.constants.z) + ", delta=" + to_string(cfg_.constants.delta) +
                               ", rho=" + to_string(cfg_.constants.rho) + ")");
      }
      chain.trans[s].push_back({ids.at(e.to), p});
    }
    std::sort(chain.trans[s].begin(), chain.trans[s].end(), [](const Transition& a, const Transition& b) { return a.to < b.to; });
  }
  chain.init = 0;
  return chain;
}

std::vector<Rational> Builder::solve_params(std::vector<Diagnostic>& out) {
  std::vector<Rational> vals;
  for (const Param& p : params) vals.push_back(p.printed);
  if (params.empty() || cfg_.r_mode == RMode::Printed) {
    for (std::size_t k = 0; k < params.size(); ++k)
      out.push_back({"r-printed", "r" + std::to_string(k) + " = " + to_string(vals[k]) + " at " + to_string(states[params[k].state])});
    return vals;
  }
  ReductionConfig rc;
  rc.constants = cfg_.constants;
  Reduction red(m_, rc);
  auto g2 = [&](const MarkovChain& chain, const Param& p) {
    StateFormula f = red.uinc_part(2, p.phase, p.label, p.next_label, p.copy);
    Checker ck(chain);
    return Rational(1 - ck.probabilities(f.path())[p.state]);
  };
  std::vector<Rational> base;
  for (const Param& p : params) base.push_back(V(p.counter).v1 / 2);
  MarkovChain chain0 = instantiate(base, false);
  std::vector<Rational> solved = base;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const Param& p = params[k];
    Rational v0 = g2(chain0, p);
    std::vector<Rational> probe = base;
    probe[k] = base[k] / 2;
    Rational v1 = g2(instantiate(probe, false), p);
    if (v1 == v0) {
      solved[k] = p.printed;
      out.push_back({"r-unsolvable", "UInc conjunct 2 does not depend on r" + std::to_string(k) + "; using printed value"});
      continue;
    }
    Rational slope = (v1 - v0) / (probe[k] - base[k]);
    solved[k] = base[k] + (cfg_.constants.rho - v0) / slope;
    out.push_back({"r-solved", "r" + std::to_string(k) + " = " + to_string(solved[k]) + " (printed " +
                                   to_string(p.printed) + ") at " + to_string(states[p.state])});
  }
  MarkovChain fin = instantiate(solved, false);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Rational got = g2(fin, params[k]);
    if (got != cfg_.constants.rho)
      out.push_back({"r-unsolvable", "re-verification of r" + std::to_string(k) + " gives " + to_string(got)});
  }
  return solved;
}

}  // namespace

WitnessReport build_witness(const CounterMachine& m, const LassoComputation& lasso, const WitnessConfig& cfg) {
  check_machine(m);
  if (m.d != 2) throw MachineError("witness needs a two-counter machine");
  if (!m.deterministic()) throw WitnessError(WitnessError::Kind::Nondeterministic, "witness needs a deterministic machine");
  if (lasso.configs.empty() || lasso.alpha < 1 || lasso.alpha >= lasso.beta() ||
      !(lasso.configs[lasso.alpha - 1] == lasso.configs.back()))
    throw std::invalid_argument("malformed lasso");
  cfg.constants.check();
  Builder b(m, lasso, cfg);
  b.close();
  WitnessReport rep;
  rep.constants = cfg.constants;
  std::vector<Rational> vals = b.solve_params(rep.diagnostics);
  rep.chain = b.instantiate(vals, true);
  rep.states = b.states;
  rep.state_map = b.ids;
  rep.init = 0;
  rep.diagnostics.insert(rep.diagnostics.begin(), b.diags.begin(), b.diags.end());
  return rep;
}

namespace {

struct Bodies {
  std::function<bool(const PropSet&)> phi;
  std::function<bool(const PropSet&)> psi;
  std::string key;
};

bool has(const PropSet& s, const Prop& p) { return std::binary_search(s.begin(), s.end(), p); }

std::optional<Bodies> bodies_for(const PropSet& props, int k) {
  for (const Prop& p : props) {
    if (p.copy != k) continue;
    if (p.family == Family::r) {
      Prop a = Prop::lower(Family::a, k, p.phase, p.label), ab = Prop::lower(Family::abar, k, p.phase, p.label),
           b = Prop::lower(Family::b, k, p.phase, p.label);
      return Bodies{[=](const PropSet& s) { return has(s, p) || has(s, a) || has(s, ab); },
                    [=](const PropSet& s) { return has(s, p) || has(s, b); }, p.name()};
    }
    if (p.family == Family::R) {
      Prop A = Prop::upper(Family::A, k, p.phase), B = Prop::upper(Family::B, k, p.phase);
      return Bodies{[=](const PropSet& s) { return has(s, p) || has(s, A); },
                    [=](const PropSet& s) { return has(s, p) || has(s, B); }, p.name()};
    }
  }
  return std::nullopt;
}

ProbVector g_prob(const MarkovChain& chain, const std::function<bool(const PropSet&)>& body) {
  StateSet all(chain.size(), 1), bad(chain.size(), 0);
  for (std::size_t s = 0; s < chain.size(); ++s) bad[s] = !body(chain.valuation[s]);
  ProbVector f = prob_until(chain, all, bad);
  for (auto& x : f) x = 1 - x;
  return f;
}

}  // namespace

std::map<StateId, Vec2> characteristic_vectors(const WitnessReport& report, int k) {
  std::map<std::string, std::pair<ProbVector, ProbVector>> cache;
  std::map<StateId, Vec2> out;
  for (std::size_t s = 0; s < report.chain.size(); ++s) {
    auto b = bodies_for(report.chain.valuation[s], k);
    if (!b) continue;
    auto it = cache.find(b->key);
    if (it == cache.end())
      it = cache.emplace(b->key, std::make_pair(g_prob(report.chain, b->phi), g_prob(report.chain, b->psi))).first;
    out[static_cast<StateId>(s)] = Vec2{it->second.first[s], it->second.second[s]};
  }
  return out;
}

Vec2 characteristic_vector(const WitnessReport& report, StateId s, int k) {
  auto b = bodies_for(report.chain.valuation.at(s), k);
  if (!b) throw std::invalid_argument("state " + report.chain.state_names[s] + " is not " + std::to_string(k) + "-relevant");
  return Vec2{g_prob(report.chain, b->phi)[s], g_prob(report.chain, b->psi)[s]};
}

namespace {

bool exclusive(const PropSet& props, const PropSet& L, const PropSet& O) {
  for (const Prop& p : O)
    if (has(props, p) != has(L, p)) return false;
  return true;
}

}  // namespace

std::vector<LintResult> lint_witness(const WitnessReport& rep) {
  const MarkovChain& ch = rep.chain;
  const auto& K = rep.constants;
  std::vector<LintResult> out;
  auto add = [&](const std::string& name, bool ok, const std::string& detail) { out.push_back({name, ok, detail}); };

  {
    auto v = validate(ch);
    std::string d;
    bool rowsum = true, pos = true;
    for (const auto& x : v) {
      if (x.rule == "row-sum" || x.rule == "empty-row") rowsum = false;
      if (x.rule == "nonpositive-probability") pos = false;
      if (d.empty()) d = describe(x, ch);
    }
    add("row-sum", rowsum, rowsum ? "" : d);
    add("positivity", pos, pos ? "" : d);
  }

  int m = 0;
  for (const auto& props : ch.valuation)
    for (const Prop& p : props)
      if (p.is_gadget()) m = std::max<int>(m, p.label);
  {
    bool ok = true;
    std::string d;
    for (int k = 1; k <= 2 && ok; ++k) {
      std::vector<std::pair<PropSet, PropSet>> markers;
      PropSet lower = set_lower(m, k), B = set_B(k);
      for (const Prop& x : set_C(m, k)) markers.push_back({{x}, lower});
      for (int i = 0; i < 3; ++i) {
        for (Family f : {Family::A, Family::B, Family::C, Family::D}) {
          markers.push_back({{Prop::upper(f, k, i)}, B});
          PropSet withk{Prop::upper(f, k, i), Prop::k(k)};
          canonicalize(withk);
          markers.push_back({withk, B});
        }
        markers.push_back({{Prop::upper(Family::E, k, i)}, B});
      }
      for (std::size_t s = 0; s < ch.size() && ok; ++s)
        for (const auto& [L, O] : markers) {
          if (!exclusive(ch.valuation[s], L, O)) continue;
          for (const Transition& t : ch.trans[s])
            if (!exclusive(ch.valuation[t.to], L, O)) {
              ok = false;
              d = "marker lost on " + ch.state_names[s] + " -> " + ch.state_names[t.to];
              break;
            }
          if (!ok) break;
        }
    }
    add("marker-persistence", ok, d);
  }
  {
    bool ok = true;
    std::string d;
    std::size_t checked = 0;
    for (int k = 1; k <= 2; ++k)
      for (int i = 0; i < 3; ++i) {
        Prop R = Prop::upper(Family::R, k, i), E = Prop::upper(Family::E, k, i);
        PropSet Rset{R};
        ProbVector g = g_prob(ch, [&](const PropSet& s) { return has(s, R) || has(s, E); });
        for (std::size_t s = 0; s < ch.size(); ++s) {
          if (!exclusive(ch.valuation[s], Rset, set_B(k))) continue;
          ++checked;
          if (g[s] != K.lambda && ok) {
            ok = false;
            d = ch.state_names[s] + ": G(R v E) = " + to_string(g[s]);
          }
        }
      }
    add("lambda", ok, ok ? std::to_string(checked) + " R states" : d);
  }
  {
    bool ok = true;
    std::string d;
    std::size_t checked = 0;
    for (int k = 1; k <= 2; ++k) {
      auto gam = characteristic_vectors(rep, k);
      for (int i = 0; i < 3; ++i) {
        Prop R = Prop::upper(Family::R, k, i), A = Prop::upper(Family::A, k, i), C = Prop::upper(Family::C, k, i);
        Prop Rn = Prop::upper(Family::R, k, succ_phase(i));
        ProbVector g = g_prob(ch, [&](const PropSet& s) { return has(s, R) || has(s, A) || has(s, C); });
        StateSet all(ch.size(), 1), tgt(ch.size(), 0);
        for (std::size_t s = 0; s < ch.size(); ++s) tgt[s] = has(ch.valuation[s], Rn) || has(ch.valuation[s], C);
        ProbVector f = prob_until(ch, all, tgt);
        for (std::size_t s = 0; s < ch.size(); ++s) {
          if (!has(ch.valuation[s], R)) continue;
          auto it = gam.find(static_cast<StateId>(s));
          if (it == gam.end() || it->second == K.z) continue;  // Zero states are exempt
          ++checked;
          if ((g[s] != K.delta || f[s] != K.delta) && ok) {
            ok = false;
            d = ch.state_names[s] + ": G = " + to_string(g[s]) + ", F = " + to_string(f[s]);
          }
        }
      }
    }
    add("copy-delta", ok, ok ? std::to_string(checked) + " nonzero R states" : d);
  }
  return out;
}

}  // namespace pctlwb
