// One PASS/FAIL line per acceptance criterion. Tolerances are exact; runtime budgets are pinned below.
#include "pctlwb/checker.hpp"
#include "pctlwb/cli.hpp"
#include "pctlwb/geometry.hpp"
#include "pctlwb/machines.hpp"
#include "pctlwb/reduction.hpp"
#include "pctlwb/witness.hpp"

#include "generators.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace pctlwb;

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

std::string src(const std::string& rel) { return std::string(PCTLWB_SOURCE_DIR) + "/" + rel; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Rational kLambda(14, 225);
const Vec2 kZ{Rational(1, 12), Rational(1, 15)};

// Closed-form increment evaluated independently of the library.
Vec2 inc_oracle(const Vec2& v) {
  Rational x = kLambda / (1 - v.v1);
  return {x, v.v2 * x};
}

Outcome geometry_exactness() {
  Geometry g(GadgetConstants::standard());
  std::mt19937_64 rng(1);
  const Rational lo(1, 15), hi(14, 15);
  for (int n = 0; n < 1000; ++n) {
    Vec2 v = sample_point(g.constants(), rng);
    Vec2 w = g.inc(v);
    if (!(w == inc_oracle(v))) return {false, "inc disagrees with closed form at " + to_string(v)};
    if (!(g.dec(w) == v)) return {false, "dec(inc(v)) != v at " + to_string(v)};
    if (!(lo < w.v1 && w.v1 < hi && 0 <= w.v2 && w.v2 <= 1)) return {false, "inc leaves the strip at " + to_string(v)};
    if (!(w.v1 < v.v1)) return {false, "inc(v)_1 >= v_1 at " + to_string(v)};
  }
  PropertyOptions opt;
  opt.samples = 1000;
  opt.seed = 1;
  std::size_t checked = 0;
  for (const auto& r : check_properties(g, opt)) {
    if (!r.ok()) return {false, "property " + r.name + ": " + *r.counterexample};
    checked += r.checked;
  }
  return {true, "1000 samples, " + std::to_string(checked) + " property checks"};
}

Outcome endpoints() {
  auto [lo, hi] = interval_endpoints(kLambda);
  if (lo != Rational(1, 15) || hi != Rational(14, 15)) return {false, "got " + to_string(lo) + ", " + to_string(hi)};
  try {
    interval_endpoints(Rational(14, 255));
    return {false, "14/255 accepted"};
  } catch (const GeometryError& e) {
    if (std::string(e.what()).find("irrational endpoints") == std::string::npos) return {false, e.what()};
  }
  return {true, "(1/15, 14/15); 14/255 rejected"};
}

Outcome limit_proxy() {
  Geometry g(GadgetConstants::standard());
  Vec2 v = kZ;
  Rational prev = v.v1 - Rational(1, 15);
  for (std::size_t n = 1; n <= 64; ++n) {
    v = inc_oracle(v);
    if (!(g.inc_iter(n) == v)) return {false, "inc_iter disagrees at n=" + std::to_string(n)};
    Rational gap = v.v1 - Rational(1, 15);
    if (!(gap < prev)) return {false, "gap not decreasing at n=" + std::to_string(n)};
    prev = gap;
  }
  if (!(prev < Rational(1, 1000000))) return {false, "gap at 64 is " + to_string(prev)};
  return {true, "gap at n=64 below 1/10^6"};
}

Outcome bounded_oracle() {
  std::mt19937_64 rng(42);
  std::size_t states = 0;
  for (int trial = 0; trial < 200; ++trial) {
    MarkovChain c = testgen::random_chain(rng, 6);
    StateSet s1 = testgen::random_set(rng, c.size()), s2 = testgen::random_set(rng, c.size());
    std::uint32_t k = rng() % 7;
    ProbVector p = prob_bounded_until(c, s1, s2, k);
    for (std::size_t s = 0; s < c.size(); ++s, ++states)
      if (p[s] != brute_force_bounded(c, s1, s2, k, static_cast<StateId>(s)))
        return {false, "trial " + std::to_string(trial) + " state " + std::to_string(s)};
  }
  return {true, "200 chains, " + std::to_string(states) + " states"};
}

Outcome until_fixpoint() {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    MarkovChain c = testgen::random_chain(rng, 6);
    StateSet s1 = testgen::random_set(rng, c.size()), s2 = testgen::random_set(rng, c.size());
    ProbVector x = prob_until(c, s1, s2);
    // Independent prob-0 set: states that cannot reach s2 through s1.
    StateSet pos = s2;
    for (bool grew = true; grew;) {
      grew = false;
      for (std::size_t s = 0; s < c.size(); ++s)
        if (!pos[s] && s1[s])
          for (const Transition& t : c.trans[s])
            if (pos[t.to] && !pos[s]) pos[s] = grew = true;
    }
    for (std::size_t s = 0; s < c.size(); ++s) {
      Rational want;
      if (s2[s]) want = 1;
      else if (!pos[s]) want = 0;
      else
        for (const Transition& t : c.trans[s]) want += t.p * x[t.to];
      if (x[s] != want)
        return {false, "trial " + std::to_string(trial) + " state " + std::to_string(s) + " residual " +
                           to_string(Rational(x[s] - want))};
    }
  }
  MarkovChain ex = parse_chain("state s:\nstate t:\ns -> s 1/2\ns -> t 1/2\nt -> t 1\n");
  if (prob_until(ex, make_set(ex, {0}), make_set(ex, {1}))[0] != 1) return {false, "loop example != 1"};
  return {true, "200 chains, zero residual; loop example = 1"};
}

CounterMachine m0() { return parse_machine(slurp(src("tests/data/m0.machine"))); }

const WitnessReport& m0_witness() {
  static const WitnessReport rep = [] {
    CounterMachine m = m0();
    auto l = std::get<LassoComputation>(run_deterministic(m));
    return build_witness(m, l, WitnessConfig{});
  }();
  return rep;
}

Outcome witness_wellformed() {
  CounterMachine m = m0();
  auto run = run_deterministic(m);
  if (!std::holds_alternative<LassoComputation>(run)) return {false, "m0 unbounded"};
  const auto& l = std::get<LassoComputation>(run);
  if (l.alpha != 1 || l.beta() != 3) return {false, "lasso (" + std::to_string(l.alpha) + ", " + std::to_string(l.beta()) + ")"};
  const WitnessReport& rep = m0_witness();
  for (std::size_t s = 0; s < rep.chain.size(); ++s) {
    Rational sum;
    for (const Transition& t : rep.chain.trans[s]) {
      if (!(t.p > 0 && t.p <= 1)) return {false, "probability " + to_string(t.p) + " at " + rep.chain.state_names[s]};
      sum += t.p;
    }
    if (sum != 1) return {false, "row sum " + to_string(sum) + " at " + rep.chain.state_names[s]};
  }
  if (auto v = validate(rep.chain); !v.empty()) return {false, describe(v.front(), rep.chain)};
  return {true, std::to_string(rep.chain.size()) + " states"};
}

Outcome characteristic() {
  const WitnessReport& rep = m0_witness();
  std::size_t checked = 0;
  for (int k = 1; k <= 2; ++k)
    for (std::size_t s = 0; s < rep.chain.size(); ++s) {
      bool relevant = false;
      for (const Prop& p : rep.chain.valuation[s]) relevant = relevant || (p.family == Family::r && p.copy == k);
      if (!relevant) continue;
      Vec2 want = kZ;
      for (std::uint64_t n = counter_field(rep.states[s], k); n > 0; --n) want = inc_oracle(want);
      Vec2 got = characteristic_vector(rep, static_cast<StateId>(s), k);
      if (!(got == want))
        return {false, rep.chain.state_names[s] + " copy " + std::to_string(k) + ": " + to_string(got)};
      ++checked;
    }
  return {checked > 0, std::to_string(checked) + " r-relevant (state, copy) pairs equal (1/12, 1/15)"};
}

Outcome flagship() {
  std::ostringstream out, err;
  int rc = run_cli({"verify", "--machine", src("tests/data/m0.machine"), "--variant", "finite", "--fragment", "u"},
                   out, err);
  std::string text = out.str();
  std::cout << text << err.str();
  bool sat = text.rfind("verdict: SAT", 0) == 0;
  return {rc == kOk && sat, sat ? "init satisfies Psi_M" : "init does not satisfy Psi_M (exit " + std::to_string(rc) + ")"};
}

Outcome fragment_implication() {
  const WitnessReport& rep = m0_witness();
  ReductionConfig cfg;
  Reduction red(m0(), cfg);
  Checker ck(rep.chain);
  std::size_t bar_states = 0;
  for (int k = 1; k <= 2; ++k) {
    const StateSet& bar = ck.sat(red.structure(k, Fragment::FGOnly));
    const StateSet& full = ck.sat(red.structure(k, Fragment::WithUntil));
    for (std::size_t s = 0; s < bar.size(); ++s) {
      bar_states += bar[s] != 0;
      if (bar[s] && !full[s]) return {false, "copy " + std::to_string(k) + " at " + rep.chain.state_names[s]};
    }
  }
  return {true, "inclusion holds on " + std::to_string(rep.chain.size()) + " states (" + std::to_string(bar_states) +
                    " satisfy Struct-bar)"};
}

Outcome minsky_reduction() {
  MinskyMachine mm = parse_minsky(slurp(src("tests/data/two_test.minsky")));
  const int m = mm.m();
  CounterMachine n = minsky_to_counter(mm);
  if (n.m() != 3 * m) return {false, std::to_string(n.m()) + " instructions"};
  auto run = run_deterministic(n, 10000);
  if (!std::holds_alternative<LassoComputation>(run)) return {false, "no lasso within 10^4 steps"};
  const auto& l = std::get<LassoComputation>(run);

  std::istringstream golden(slurp(src("tests/data/two_test.golden")));
  std::vector<Label> minsky_labels;
  std::vector<Configuration> trace;
  std::size_t alpha = 0, beta = 0;
  for (std::string line; std::getline(golden, line);) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "minsky_labels") {
      for (Label x; ls >> x;) minsky_labels.push_back(x);
    } else if (key == "n_trace") {
      for (std::string tok; ls >> tok;) {
        Configuration c;
        char colon, comma;
        std::uint64_t a, b;
        std::istringstream ts(tok);
        ts >> c.label >> colon >> a >> comma >> b;
        c.counters = {a, b};
        trace.push_back(c);
      }
    } else if (key == "alpha") {
      ls >> alpha;
    } else if (key == "beta") {
      ls >> beta;
    }
  }
  if (l.configs != trace) return {false, "configuration trace differs from the golden file"};
  if (l.alpha != alpha || l.beta() != beta) return {false, "lasso indices differ from the golden file"};
  std::vector<Label> projected;
  for (const Configuration& c : l.configs)
    if (c.label <= 2 * m) projected.push_back(c.label <= m ? c.label : c.label - m);
  if (projected != minsky_labels) return {false, "visited labels do not follow the Minsky trace"};
  return {true, std::to_string(n.m()) + " instructions, lasso (" + std::to_string(alpha) + ", " + std::to_string(beta) +
                    ") matches the hand trace"};
}

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "geometry exactness", 10, geometry_exactness},
      {2, "interval endpoints", 1, endpoints},
      {3, "limit proxy", 1, limit_proxy},
      {4, "bounded until vs path enumeration", 60, bounded_oracle},
      {5, "unbounded until fixpoint", 30, until_fixpoint},
      {6, "witness well-formedness", 5, witness_wellformed},
      {7, "characteristic vectors", 60, characteristic},
      {8, "end-to-end verify on m0", 600, flagship},
      {9, "Struct-bar implies Struct", 600, fragment_implication},
      {10, "Minsky reduction", 5, minsky_reduction},
  };
  int failed = 0;
  std::vector<std::string> lines;
  for (const Criterion& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      o.ok = false;
      o.detail += "; over the " + std::to_string(static_cast<int>(c.budget_s)) + " s budget";
    }
    std::ostringstream line;
    line << (o.ok ? "PASS " : "FAIL ") << c.id << " " << c.name << ": " << o.detail << " [" << std::fixed
         << std::setprecision(2) << secs << " s]";
    lines.push_back(line.str());
    failed += !o.ok;
  }
  std::cout << "\n";
  for (const auto& l : lines) std::cout << l << "\n";
  return failed == 0 ? 0 : 1;
}
