#include "pctlwb/reduction.hpp"

#include <algorithm>

namespace pctlwb {

std::string_view fragment_name(Fragment f) { return f == Fragment::WithUntil ? "u" : "fg"; }
std::string_view variant_name(Variant v) { return v == Variant::Recurrent ? "recurrent" : "finite"; }

namespace {

constexpr Family kLower[] = {Family::r, Family::a, Family::abar, Family::b, Family::c, Family::d};
constexpr Family kMarkerLower[] = {Family::a, Family::abar, Family::b, Family::c, Family::d};
constexpr Family kUpper[] = {Family::A, Family::B, Family::C, Family::D, Family::E, Family::R};

std::string idx(int i, Label l, Label l2) {
  return "[i=" + std::to_string(i) + ",l=" + std::to_string(l) + ",l'=" + std::to_string(l2) + "]";
}

}  // namespace

PropSet set_B(int copy) {
  PropSet s{Prop::k(copy)};
  for (int i = 0; i < 3; ++i)
    for (Family f : kUpper) s.push_back(Prop::upper(f, copy, i));
  canonicalize(s);
  return s;
}

PropSet set_lower(int m, int copy) {
  PropSet s;
  for (int i = 0; i < 3; ++i)
    for (int l = 1; l <= m; ++l)
      for (Family f : kLower) s.push_back(Prop::lower(f, copy, i, l));
  canonicalize(s);
  return s;
}

PropSet set_A(int m, int copy) {
  PropSet s = set_B(copy);
  PropSet low = set_lower(m, copy);
  s.insert(s.end(), low.begin(), low.end());
  canonicalize(s);
  return s;
}

PropSet set_C(int m, int copy) {
  PropSet s;
  for (int i = 0; i < 3; ++i)
    for (int l = 1; l <= m; ++l)
      for (Family f : kMarkerLower) s.push_back(Prop::lower(f, copy, i, l));
  canonicalize(s);
  return s;
}

PropSet set_r(int m, int copy) {
  PropSet s;
  for (int i = 0; i < 3; ++i)
    for (int l = 1; l <= m; ++l) s.push_back(Prop::lower(Family::r, copy, i, l));
  canonicalize(s);
  return s;
}

PropSet universe(int m) {
  PropSet s = set_A(m, 1);
  PropSet t = set_A(m, 2);
  s.insert(s.end(), t.begin(), t.end());
  canonicalize(s);
  return s;
}

Reduction::Reduction(const CounterMachine& machine, ReductionConfig cfg)
    : machine_(machine), cfg_(std::move(cfg)), m_(machine.m()) {
  check_machine(machine_);
  if (machine_.d != 2) throw MachineError("reduction needs a two-counter machine, got d = " + std::to_string(machine_.d));
  cfg_.constants.check();
  if (cfg_.variant == Variant::Recurrent && cfg_.tau.empty()) throw std::invalid_argument("recurrent variant needs a nonempty tau");
  for (Label l : cfg_.tau)
    if (l < 1 || l > m_) throw std::invalid_argument("tau label " + std::to_string(l) + " outside 1..m");
}

StateFormula Reduction::named(StateFormula f, const std::string& name) {
  labels_.emplace(f.id(), name);
  return f;
}

const std::string* Reduction::label_of(StateFormula f) const {
  auto it = labels_.find(f.id());
  return it == labels_.end() ? nullptr : &it->second;
}

StateFormula Reduction::ex_A(const PropSet& L, int k) {
  auto key = std::make_pair(L, k * 4);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  return cache_[key] = mk_exclusive(L, set_A(m_, k));
}

StateFormula Reduction::ex_B(const PropSet& L, int k) {
  auto key = std::make_pair(L, k * 4 + 1);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  return cache_[key] = mk_exclusive(L, set_B(k));
}

StateFormula Reduction::ex_lower(const PropSet& L, int k) {
  auto key = std::make_pair(L, k * 4 + 2);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  return cache_[key] = mk_exclusive(L, set_lower(m_, k));
}

StateFormula Reduction::any_upper(Family f, int k) {
  return disj({v(up(f, 0, k)), v(up(f, 1, k)), v(up(f, 2, k))});
}

StateFormula Reduction::at(Label l, int k) {
  if (l < 1 || l > m_) throw std::invalid_argument("at: label out of range");
  return named(disj({ex_A({r(0, l, k)}, k), ex_A({r(1, l, k)}, k), ex_A({r(2, l, k)}, k)}),
               "at^" + std::to_string(k) + "_" + std::to_string(l));
}

StateFormula Reduction::rsuc(int i, Label l, Label l2, int k) {
  std::vector<StateFormula> ds{ex_A({r(succ_phase(i), l2, k)}, k)};
  for (int j = 0; j < 3; ++j)
    for (Family f : kMarkerLower) ds.push_back(ex_A({low(f, i, l, k), up(Family::R, j, k)}, k));
  return named(disj(ds), "rsuc^" + std::to_string(k) + idx(i, l, l2));
}

StateFormula Reduction::Rsuc(int i, int k) {
  std::vector<StateFormula> ds;
  for (Family f : {Family::A, Family::B, Family::C, Family::D, Family::E}) ds.push_back(ex_B({up(f, i, k)}, k));
  ds.push_back(ex_B({up(Family::R, succ_phase(i), k), Prop::k(k)}, k));
  return named(disj(ds), "Rsuc^" + std::to_string(k) + "_" + std::to_string(i));
}

StateFormula Reduction::RKsuc(int i, int k) {
  std::vector<StateFormula> ds;
  for (Family f : {Family::A, Family::B, Family::C, Family::D}) ds.push_back(ex_B({up(f, i, k), Prop::k(k)}, k));
  ds.push_back(ex_B({up(Family::R, succ_phase(i), k), Prop::k(k)}, k));
  return named(disj(ds), "RKsuc^" + std::to_string(k) + "_" + std::to_string(i));
}

StateFormula Reduction::succ(int k) {
  const Rational one(1);
  std::vector<StateFormula> cs;
  for (Label l = 1; l <= m_; ++l)
    for (int i = 0; i < 3; ++i) {
      StateFormula here = ex_A({r(i, l, k)}, k);
      std::vector<StateFormula> ds;
      for (Label l2 = 1; l2 <= m_; ++l2) ds.push_back(prob(until(here, rsuc(i, l, l2, k)), Cmp::Eq, one));
      cs.push_back(mk_g(Cmp::Eq, one, implies(here, disj(ds))));
    }
  for (int i = 0; i < 3; ++i) {
    StateFormula R = ex_B({up(Family::R, i, k)}, k);
    StateFormula RK = ex_B({up(Family::R, i, k), Prop::k(k)}, k);
    cs.push_back(mk_g(Cmp::Eq, one,
                      conj(implies(R, prob(until(R, Rsuc(i, k)), Cmp::Eq, one)),
                           implies(RK, prob(until(RK, RKsuc(i, k)), Cmp::Eq, one)))));
  }
  return named(conj(cs), "Succ^" + std::to_string(k));
}

StateFormula Reduction::succ_bar(int k) {
  const Rational one(1);
  std::vector<StateFormula> cs;
  for (int i = 0; i < 3; ++i)
    for (Label l = 1; l <= m_; ++l) {
      StateFormula here = ex_A({r(i, l, k)}, k);
      std::vector<StateFormula> ds;
      for (Label l2 = 1; l2 <= m_; ++l2) ds.push_back(mk_f(Cmp::Eq, one, rsuc(i, l, l2, k)));
      cs.push_back(mk_g(Cmp::Eq, one, implies(here, disj(ds))));
    }
  for (int i = 0; i < 3; ++i)
    for (Label l = 1; l <= m_; ++l) {
      std::vector<StateFormula> others;
      for (int z = 0; z < 3; ++z)
        for (Label z2 = 1; z2 <= m_; ++z2)
          if (z != i || z2 != l) others.push_back(ex_A({r(z, z2, k)}, k));
      cs.push_back(mk_g(Cmp::Eq, one, implies(ex_A({r(i, l, k)}, k), mk_f(Cmp::Lt, one, disj(others)))));
    }
  {
    std::vector<StateFormula> ds;
    for (const Prop& x : set_lower(m_, k)) ds.push_back(ex_lower({x}, k));
    cs.push_back(mk_g(Cmp::Eq, one, disj(ds)));
  }
  {
    std::vector<StateFormula> xs;
    for (const Prop& x : set_C(m_, k)) {
      std::vector<StateFormula> ds;
      for (int j = 0; j < 3; ++j) ds.push_back(ex_A({x, up(Family::R, j, k)}, k));
      xs.push_back(implies(v(x), disj(ds)));
    }
    cs.push_back(mk_g(Cmp::Eq, one, conj(xs)));
  }
  {
    std::vector<StateFormula> xs;
    for (const Prop& x : set_r(m_, k)) xs.push_back(implies(v(x), ex_A({x}, k)));
    cs.push_back(mk_g(Cmp::Eq, one, conj(xs)));
  }
  for (int i = 0; i < 3; ++i)
    cs.push_back(mk_g(Cmp::Eq, one, implies(ex_B({up(Family::R, i, k)}, k), mk_f(Cmp::Eq, one, Rsuc(i, k)))));
  for (int i = 0; i < 3; ++i)
    cs.push_back(mk_g(Cmp::Eq, one,
                      implies(ex_B({up(Family::R, i, k), Prop::k(k)}, k), mk_f(Cmp::Eq, one, RKsuc(i, k)))));
  for (int i = 0; i < 3; ++i) {
    std::vector<StateFormula> others;
    for (int z = 0; z < 3; ++z)
      if (z != i) others.push_back(ex_B({up(Family::R, z, k), Prop::k(k)}, k));
    StateFormula guard = disj(ex_B({up(Family::R, i, k)}, k), ex_B({up(Family::R, i, k), Prop::k(k)}, k));
    cs.push_back(mk_g(Cmp::Eq, one, implies(guard, mk_f(Cmp::Lt, one, disj(others)))));
  }
  {
    std::vector<StateFormula> anyb, succs;
    for (const Prop& x : set_B(k)) anyb.push_back(v(x));
    for (int i = 0; i < 3; ++i) {
      succs.push_back(Rsuc(i, k));
      succs.push_back(RKsuc(i, k));
    }
    cs.push_back(mk_g(Cmp::Eq, one, implies(disj(anyb), mk_g(Cmp::Eq, one, disj(succs)))));
  }
  cs.push_back(mk_g(Cmp::Eq, one, implies(v(Prop::k(k)), mk_g(Cmp::Eq, one, v(Prop::k(k))))));
  return named(conj(cs), "SuccBar^" + std::to_string(k));
}

StateFormula Reduction::mark(int k) {
  const Rational one(1);
  std::vector<StateFormula> cs;
  for (const Prop& x : set_C(m_, k)) {
    StateFormula e = ex_lower({x}, k);
    cs.push_back(implies(e, mk_g(Cmp::Eq, one, e)));
  }
  for (int i = 0; i < 3; ++i) {
    std::vector<PropSet> sets;
    for (Family f : {Family::A, Family::B, Family::C, Family::D}) {
      sets.push_back({up(f, i, k)});
      sets.push_back({up(f, i, k), Prop::k(k)});
    }
    sets.push_back({up(Family::E, i, k)});
    for (const PropSet& L : sets) {
      StateFormula e = ex_B(L, k);
      cs.push_back(implies(e, mk_g(Cmp::Eq, one, e)));
    }
  }
  return named(mk_g(Cmp::Eq, one, conj(cs)), "Mark^" + std::to_string(k));
}

StateFormula Reduction::lambda(int k) {
  std::vector<StateFormula> cs;
  for (int i = 0; i < 3; ++i)
    cs.push_back(implies(ex_B({up(Family::R, i, k)}, k),
                         mk_g(Cmp::Eq, cfg_.constants.lambda, disj(v(up(Family::R, i, k)), v(up(Family::E, i, k))))));
  return named(mk_g(Cmp::Eq, Rational(1), conj(cs)), "Lambda^" + std::to_string(k));
}

StateFormula Reduction::structure(int k) { return structure(k, cfg_.fragment); }

StateFormula Reduction::structure(int k, Fragment f) {
  StateFormula s = f == Fragment::WithUntil ? succ(k) : succ_bar(k);
  return named(conj({s, mark(k), lambda(k)}),
               (f == Fragment::WithUntil ? "Struct^" : "StructBar^") + std::to_string(k));
}

StateFormula Reduction::zero(int k) {
  const Rational& z1 = cfg_.constants.z.v1;
  const Rational& z2 = cfg_.constants.z.v2;
  std::vector<StateFormula> cs;
  for (int i = 0; i < 3; ++i)
    for (Label l = 1; l <= m_; ++l) {
      StateFormula rr = v(r(i, l, k));
      StateFormula phi = disj({rr, v(low(Family::a, i, l, k)), v(low(Family::abar, i, l, k))});
      StateFormula psi = disj(rr, v(low(Family::b, i, l, k)));
      cs.push_back(implies(rr, conj(mk_g(Cmp::Eq, z1, phi), mk_g(Cmp::Eq, z2, psi))));
    }
  for (int i = 0; i < 3; ++i) {
    StateFormula R = v(up(Family::R, i, k));
    cs.push_back(implies(R, conj(mk_g(Cmp::Eq, z1, disj(R, v(up(Family::A, i, k)))),
                                 mk_g(Cmp::Eq, z2, disj(R, v(up(Family::B, i, k)))))));
  }
  return named(conj(cs), "Zero^" + std::to_string(k));
}

StateFormula Reduction::eligible(int k) {
  const Rational& z1 = cfg_.constants.z.v1;
  const Rational& lo = cfg_.constants.beta_low();
  const Rational one(1);
  std::vector<StateFormula> cs;
  for (int i = 0; i < 3; ++i)
    for (Label l = 1; l <= m_; ++l) {
      StateFormula rr = v(r(i, l, k));
      StateFormula phi = disj({rr, v(low(Family::a, i, l, k)), v(low(Family::abar, i, l, k))});
      cs.push_back(mk_g(Cmp::Eq, one, implies(rr, conj(mk_g(Cmp::Le, z1, phi), mk_g(Cmp::Ge, lo, phi)))));
    }
  for (int i = 0; i < 3; ++i) {
    StateFormula R = v(up(Family::R, i, k));
    StateFormula phi = disj(R, v(up(Family::A, i, k)));
    cs.push_back(mk_g(Cmp::Eq, one, implies(R, conj(mk_g(Cmp::Le, z1, phi), mk_g(Cmp::Ge, lo, phi)))));
  }
  return named(conj(cs), "Eligible^" + std::to_string(k));
}

StateFormula Reduction::copy_i(int i, int k) {
  const Rational& d = cfg_.constants.delta;
  return named(conj(mk_g(Cmp::Eq, d, disj({v(up(Family::R, i, k)), v(up(Family::A, i, k)), v(up(Family::C, i, k))})),
                    mk_f(Cmp::Eq, d, disj(v(up(Family::R, succ_phase(i), k)), v(up(Family::C, i, k))))),
               "Copy^" + std::to_string(k) + "_" + std::to_string(i));
}

StateFormula Reduction::succ_i(int i, int k) {
  const Rational& lam = cfg_.constants.lambda;
  const int s = succ_phase(i), s2 = succ_phase(s);
  auto tail = [&](StateFormula head) {
    return disj({head, v(up(Family::C, s, k)), v(up(Family::D, s, k)), v(up(Family::R, s2, k))});
  };
  return named(conj(mk_f(Cmp::Eq, lam, tail(v(up(Family::B, s, k)))), mk_f(Cmp::Eq, lam, tail(v(up(Family::B, i, k))))),
               "Succ^" + std::to_string(k) + "_" + std::to_string(i));
}

StateFormula Reduction::decrement(int k) {
  std::vector<StateFormula> cs;
  StateFormula nz = neg(zero(k));
  for (int i = 0; i < 3; ++i)
    cs.push_back(implies(conj(v(up(Family::R, i, k)), nz), conj(copy_i(i, k), succ_i(i, k))));
  return named(conj(cs), "Decrement^" + std::to_string(k));
}

StateFormula Reduction::init(int k) {
  return named(conj({ex_A({r(0, 1, k)}, k), zero(k), eligible(k), mk_g(Cmp::Eq, Rational(1), decrement(k))}),
               "Init^" + std::to_string(k));
}

StateFormula Reduction::propagate(int i, Label l, Label l2, int k) {
  const Rational one(1);
  StateFormula target = rsuc(i, l, l2, k);
  if (cfg_.fragment == Fragment::WithUntil) return prob(until(ex_A({r(i, l, k)}, k), target), Cmp::Eq, one);
  return mk_f(Cmp::Eq, one, target);
}

StateFormula Reduction::udec(int i, Label l, Label l2, int k) {
  const auto& c = cfg_.constants;
  const int s = succ_phase(i), s2 = succ_phase(s);
  StateFormula here = v(r(i, l, k));
  StateFormula next = v(r(s, l2, k));
  StateFormula z = zero(k);
  StateFormula zero_branch =
      conj(mk_g(Cmp::Eq, c.z.v1, disj({here, next, v(low(Family::a, s, l2, k))})),
           mk_g(Cmp::Eq, c.z.v2, disj({here, next, v(low(Family::b, s, l2, k))})));
  StateFormula ucopy =
      conj(mk_g(Cmp::Eq, c.delta,
                disj({here, v(low(Family::a, i, l, k)), v(low(Family::abar, i, l, k)), v(low(Family::c, i, l, k))})),
           mk_f(Cmp::Eq, c.delta, disj(next, v(low(Family::c, i, l, k)))));
  std::vector<StateFormula> far;
  for (Label l3 = 1; l3 <= m_; ++l3) far.push_back(v(r(s2, l3, k)));
  StateFormula far_any = disj(far);
  auto tail = [&](StateFormula head) {
    return disj({head, v(low(Family::c, s, l2, k)), v(low(Family::d, s, l2, k)), far_any});
  };
  StateFormula usucc = conj(mk_f(Cmp::Eq, c.lambda, tail(v(low(Family::b, s, l2, k)))),
                            mk_f(Cmp::Eq, c.lambda, tail(v(low(Family::b, i, l, k)))));
  return named(conj(implies(z, zero_branch), implies(neg(z), conj(ucopy, usucc))),
               "UDec^" + std::to_string(k) + idx(i, l, l2));
}

StateFormula Reduction::uinc_part(int part, int i, Label l, Label l2, int k) {
  const auto& c = cfg_.constants;
  const int s = succ_phase(i);
  StateFormula here = v(r(i, l, k));
  StateFormula K = v(Prop::k(k));
  StateFormula a = v(low(Family::a, i, l, k));
  StateFormula abar = v(low(Family::abar, i, l, k));
  StateFormula b = v(low(Family::b, i, l, k));
  StateFormula cc = v(low(Family::c, i, l, k));
  StateFormula anyR = any_upper(Family::R, k);
  switch (part) {
    case 1:
      return mk_g(Cmp::Eq, c.lambda,
                  conj({disj({here, anyR, v(r(s, l2, k)), v(low(Family::a, s, l2, k)), v(low(Family::abar, s, l2, k)),
                              any_upper(Family::A, k)}),
                        neg(K), neg(a), neg(abar)}));
    case 2:
      return mk_g(Cmp::Eq, c.rho,
                  conj({disj({here, anyR, v(r(s, l2, k)), abar, any_upper(Family::B, k), v(low(Family::b, s, l2, k))}),
                        neg(a), implies(K, abar)}));
    case 3: {
      std::vector<StateFormula> eb;
      for (int j = 0; j < 3; ++j) eb.push_back(conj(v(up(Family::E, j, k)), b));
      return mk_g(Cmp::Eq, c.rho, conj(disj({here, anyR, abar, disj(eb)}), implies(K, abar)));
    }
    case 4: {
      std::vector<StateFormula> ak;
      for (int j = 0; j < 3; ++j) ak.push_back(implies(v(up(Family::A, j, k)), K));
      return mk_g(Cmp::Eq, c.lambda, conj(disj({here, a, abar}), conj(ak)));
    }
    case 5: {
      std::vector<StateFormula> ds{here, cc};
      for (int j = 0; j < 3; ++j) ds.push_back(conj(v(up(Family::R, j, k)), a));
      for (int j = 0; j < 3; ++j) ds.push_back(conj(v(up(Family::R, j, k)), abar));
      ds.push_back(any_upper(Family::B, k));
      return mk_g(Cmp::Eq, c.delta, conj(disj(ds), implies(K, cc)));
    }
    case 6:
      return mk_g(Cmp::Eq, c.delta, disj({here, b, cc}));
    default:
      throw std::invalid_argument("uinc_part: part must be 1..6");
  }
}

StateFormula Reduction::uinc(int i, Label l, Label l2, int k) {
  StateFormula nz = neg(zero(k));
  std::vector<StateFormula> cs;
  for (int p = 1; p <= 6; ++p) {
    StateFormula part = named(uinc_part(p, i, l, l2, k), "UInc^" + std::to_string(k) + idx(i, l, l2) + "#" + std::to_string(p));
    cs.push_back(p <= 3 ? part : implies(nz, part));
  }
  return named(conj(cs), "UInc^" + std::to_string(k) + idx(i, l, l2));
}

StateFormula Reduction::update(int i, Label l, Label l2, int k) {
  return machine_.at(l).updates.at(k - 1) == Update::Dec ? udec(i, l, l2, k) : uinc(i, l, l2, k);
}

StateFormula Reduction::step_phase(int i, Label l, Label l2, int k) {
  if (i < 0 || i > 2 || l < 1 || l > m_ || l2 < 1 || l2 > m_) throw std::invalid_argument("step: index out of range");
  return implies(ex_A({r(i, l, k)}, k), conj(propagate(i, l, l2, k), update(i, l, l2, k)));
}

StateFormula Reduction::step(Label l, Label l2, int k) {
  std::vector<StateFormula> cs;
  for (int i = 0; i < 3; ++i) cs.push_back(step_phase(i, l, l2, k));
  return named(conj(cs), "Step^" + std::to_string(k) + "[l=" + std::to_string(l) + ",l'=" + std::to_string(l2) + "]");
}

StateFormula Reduction::new_zero(Label l) { return zero(machine_.at(l).test); }

StateFormula Reduction::newsim(Label l, int k) {
  const int other = 3 - k;
  const Instruction& ins = machine_.at(l);
  StateFormula nz = new_zero(l);
  StateFormula there = at(l, other);
  std::vector<StateFormula> zs, ps;
  for (Label l2 : ins.zero) zs.push_back(step(l, l2, k));
  for (Label l2 : ins.pos) ps.push_back(step(l, l2, k));
  std::vector<StateFormula> cs{implies(conj(nz, there), disj(zs)), implies(conj(neg(nz), there), disj(ps))};
  for (int i = 0; i < 3; ++i)
    cs.push_back(implies(conj(ex_A({r(i, l, k)}, k), neg(there)), conj(propagate(i, l, l, k), udec(i, l, l, k))));
  return named(conj(cs), "NewSim^" + std::to_string(k) + "_" + std::to_string(l));
}

StateFormula Reduction::rec(int k) {
  std::vector<StateFormula> targets, cs;
  for (Label t : cfg_.tau) targets.push_back(at(t, k));
  for (Label l = 1; l <= m_; ++l) cs.push_back(implies(at(l, k), mk_f(Cmp::Gt, Rational(0), disj(targets))));
  return named(mk_g(Cmp::Eq, Rational(1), conj(cs)), "Rec^" + std::to_string(k));
}

StateFormula Reduction::psi(int k) {
  std::vector<StateFormula> sims;
  for (Label l = 1; l <= m_; ++l) sims.push_back(implies(at(l, k), newsim(l, k)));
  std::vector<StateFormula> cs{structure(k), init(k), named(mk_g(Cmp::Eq, Rational(1), conj(sims)), "Sim^" + std::to_string(k))};
  if (cfg_.variant == Variant::Recurrent) cs.push_back(rec(k));
  return named(conj(cs), (cfg_.variant == Variant::Recurrent ? "psi^" : "xi^") + std::to_string(k));
}

StateFormula Reduction::sync() {
  std::vector<StateFormula> cs;
  for (Label l = 1; l <= m_; ++l)
    for (int i = 0; i < 3; ++i) {
      StateFormula both = conj(v(r(i, l, 1)), v(r(i, l, 2)));
      std::vector<StateFormula> ds;
      const int s = succ_phase(i);
      for (Label l2 = 1; l2 <= m_; ++l2)
        ds.push_back(mk_g(Cmp::Gt, Rational(0),
                          disj({both, conj(v(r(s, l2, 1)), v(r(s, l2, 2))), v(low(Family::a, s, l2, 1))})));
      cs.push_back(mk_g(Cmp::Eq, Rational(1), implies(both, disj(ds))));
    }
  return named(conj(cs), "Sync");
}

StateFormula Reduction::recurrent() {
  if (cfg_.tau.empty()) throw std::invalid_argument("Recurrent needs a nonempty tau");
  std::vector<StateFormula> targets, cs;
  for (Label t : cfg_.tau) targets.push_back(conj(at(t, 1), at(t, 2)));
  for (Label l = 1; l <= m_; ++l)
    cs.push_back(implies(conj(at(l, 1), at(l, 2)), mk_f(Cmp::Gt, Rational(0), disj(targets))));
  return named(mk_g(Cmp::Eq, Rational(1), conj(cs)), "Recurrent");
}

StateFormula Reduction::compile() {
  parts_.clear();
  for (int k = 1; k <= 2; ++k) {
    std::string ks = std::to_string(k);
    parts_.emplace_back("Struct^" + ks, structure(k));
    parts_.emplace_back("Init^" + ks, init(k));
    std::vector<StateFormula> sims;
    for (Label l = 1; l <= m_; ++l) sims.push_back(implies(at(l, k), newsim(l, k)));
    parts_.emplace_back("Sim^" + ks, named(mk_g(Cmp::Eq, Rational(1), conj(sims)), "Sim^" + ks));
    if (cfg_.variant == Variant::Recurrent) parts_.emplace_back("Rec^" + ks, rec(k));
  }
  parts_.emplace_back("Sync", sync());
  if (cfg_.variant == Variant::Recurrent) parts_.emplace_back("Recurrent", recurrent());
  std::vector<StateFormula> cs;
  for (auto& [name, f] : parts_) cs.push_back(f);
  return named(conj(cs), cfg_.variant == Variant::Recurrent ? "phi_M" : "Psi_M");
}

StateFormula compile(const CounterMachine& m, const ReductionConfig& cfg) {
  Reduction r(m, cfg);
  return r.compile();
}

std::vector<AtomAudit> audit_atoms(Reduction& r) {
  if (r.parts().empty()) r.compile();
  PropSet all = universe(r.m());
  std::vector<AtomAudit> out;
  for (const auto& [name, f] : r.parts()) {
    AtomAudit a{name, {}};
    const bool crosses = name.rfind("Sim^", 0) == 0 || name == "Sync" || name == "Recurrent";
    int copy = 0;
    if (!crosses) copy = name.back() - '0';
    for (const Prop& p : atoms_of(f)) {
      bool ok = std::binary_search(all.begin(), all.end(), p) && (crosses || p.copy == copy);
      if (!ok) a.foreign.push_back(p.name());
    }
    out.push_back(std::move(a));
  }
  return out;
}

bool is_fg_fragment(StateFormula f) {
  for (StateFormula g : subformulae(f))
    if (g.kind() == SKind::Prob && g.path().kind() != PKind::Next && g.path().lhs().kind() != SKind::True) return false;
  return true;
}

}  // namespace pctlwb
