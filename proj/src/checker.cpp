#include "pctlwb/checker.hpp"

#include <algorithm>
#include <functional>

namespace pctlwb {

StateSet make_set(const MarkovChain& chain, const std::vector<StateId>& members) {
  StateSet s(chain.size(), 0);
  for (StateId m : members) s.at(m) = 1;
  return s;
}

ProbVector prob_next(const MarkovChain& chain, const StateSet& target) {
  ProbVector out(chain.size(), Rational(0));
  for (std::size_t s = 0; s < chain.size(); ++s)
    for (const Transition& t : chain.trans[s])
      if (target[t.to]) out[s] += t.p;
  return out;
}

ProbVector prob_bounded_until(const MarkovChain& chain, const StateSet& s1, const StateSet& s2, std::uint32_t k) {
  const std::size_t n = chain.size();
  ProbVector x(n, Rational(0));
  for (std::size_t s = 0; s < n; ++s)
    if (s2[s]) x[s] = 1;
  for (std::uint32_t step = 0; step < k; ++step) {
    ProbVector y(n, Rational(0));
    for (std::size_t s = 0; s < n; ++s) {
      if (s2[s]) {
        y[s] = 1;
      } else if (s1[s]) {
        for (const Transition& t : chain.trans[s]) y[s] += t.p * x[t.to];
      }
    }
    x = std::move(y);
  }
  return x;
}

StateSet prob_positive(const MarkovChain& chain, const StateSet& s1, const StateSet& s2) {
  const std::size_t n = chain.size();
  std::vector<std::vector<StateId>> pred(n);
  for (std::size_t s = 0; s < n; ++s)
    for (const Transition& t : chain.trans[s]) pred[t.to].push_back(static_cast<StateId>(s));
  StateSet can(n, 0);
  std::vector<StateId> stack;
  for (std::size_t s = 0; s < n; ++s)
    if (s2[s]) {
      can[s] = 1;
      stack.push_back(static_cast<StateId>(s));
    }
  while (!stack.empty()) {
    StateId u = stack.back();
    stack.pop_back();
    for (StateId p : pred[u])
      if (!can[p] && s1[p]) {
        can[p] = 1;
        stack.push_back(p);
      }
  }
  return can;
}

namespace {

// Iterative Tarjan restricted to `active`; SCCs come out successors-first.
std::vector<std::vector<StateId>> sccs(const MarkovChain& chain, const StateSet& active) {
  const std::size_t n = chain.size();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<StateId> stack;
  std::vector<std::vector<StateId>> out;
  int counter = 0;
  struct Frame {
    StateId v;
    std::size_t edge;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (!active[root] || index[root] != -1) continue;
    std::vector<Frame> call{{static_cast<StateId>(root), 0}};
    index[root] = low[root] = counter++;
    stack.push_back(static_cast<StateId>(root));
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& row = chain.trans[f.v];
      if (f.edge < row.size()) {
        StateId w = row[f.edge++].to;
        if (!active[w]) continue;
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      StateId v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<StateId> comp;
        StateId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
    }
  }
  return out;
}

// Solves (I - A) x = b in place over the rationals; b becomes x.
void gauss_solve(std::vector<std::vector<Rational>>& a, std::vector<Rational>& b) {
  const std::size_t k = b.size();
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    while (piv < k && a[piv][col] == 0) ++piv;
    if (piv == k) throw std::logic_error("singular after prob-0 elimination");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col || a[r][col] == 0) continue;
      Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < k; ++c)
        if (a[col][c] != 0) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t r = 0; r < k; ++r) b[r] /= a[r][r];
}

}  // namespace

ProbVector prob_until(const MarkovChain& chain, const StateSet& s1, const StateSet& s2) {
  const std::size_t n = chain.size();
  StateSet can = prob_positive(chain, s1, s2);
  ProbVector x(n, Rational(0));
  StateSet open(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    if (s2[s]) x[s] = 1;
    else if (can[s]) open[s] = 1;
  }
  std::vector<int> slot(n, -1);
  for (const auto& comp : sccs(chain, open)) {
    const std::size_t k = comp.size();
    for (std::size_t i = 0; i < k; ++i) slot[comp[i]] = static_cast<int>(i);
    std::vector<std::vector<Rational>> a(k, std::vector<Rational>(k, Rational(0)));
    std::vector<Rational> b(k, Rational(0));
    for (std::size_t i = 0; i < k; ++i) {
      a[i][i] = 1;
      for (const Transition& t : chain.trans[comp[i]]) {
        if (open[t.to] && slot[t.to] >= 0 && std::binary_search(comp.begin(), comp.end(), t.to))
          a[i][slot[t.to]] -= t.p;
        else
          b[i] += t.p * x[t.to];
      }
    }
    if (k == 1) {
      if (a[0][0] == 0) throw std::logic_error("singular after prob-0 elimination");
      x[comp[0]] = b[0] / a[0][0];
    } else {
      gauss_solve(a, b);
      for (std::size_t i = 0; i < k; ++i) x[comp[i]] = b[i];
    }
    for (StateId s : comp) slot[s] = -1;
  }
  return x;
}

Rational brute_force_bounded(const MarkovChain& chain, const StateSet& s1, const StateSet& s2, std::uint32_t k,
                             StateId s) {
  std::function<Rational(StateId, std::uint32_t)> walk = [&](StateId u, std::uint32_t left) -> Rational {
    if (s2[u]) return Rational(1);
    if (!s1[u] || left == 0) return Rational(0);
    Rational sum = 0;
    for (const Transition& t : chain.trans[u]) sum += t.p * walk(t.to, left - 1);
    return sum;
  };
  return walk(s, k);
}

const ProbVector& Checker::probabilities(PathFormula p) {
  if (auto it = probs_.find(p.id()); it != probs_.end()) return it->second;
  ProbVector v;
  switch (p.kind()) {
    case PKind::Next: v = prob_next(chain_, sat(p.lhs())); break;
    case PKind::Until: v = prob_until(chain_, sat(p.lhs()), sat(p.rhs())); break;
    case PKind::BoundedUntil: v = prob_bounded_until(chain_, sat(p.lhs()), sat(p.rhs()), p.steps()); break;
  }
  return probs_.emplace(p.id(), std::move(v)).first->second;
}

const StateSet& Checker::eval_node(StateFormula f) {
  const std::size_t n = chain_.size();
  StateSet out(n, 0);
  switch (f.kind()) {
    case SKind::True: std::fill(out.begin(), out.end(), 1); break;
    case SKind::Atom:
      for (std::size_t s = 0; s < n; ++s) out[s] = chain_.has(f.atom(), static_cast<StateId>(s));
      break;
    case SKind::Not: {
      const StateSet& a = sat_.at(f.lhs().id());
      for (std::size_t s = 0; s < n; ++s) out[s] = !a[s];
      break;
    }
    case SKind::And: {
      const StateSet& a = sat_.at(f.lhs().id());
      const StateSet& b = sat_.at(f.rhs().id());
      for (std::size_t s = 0; s < n; ++s) out[s] = a[s] && b[s];
      break;
    }
    case SKind::Prob: {
      const ProbVector& p = probabilities(f.path());
      for (std::size_t s = 0; s < n; ++s) out[s] = compare(p[s], f.cmp(), f.bound());
      break;
    }
  }
  return sat_.emplace(f.id(), std::move(out)).first->second;
}

const StateSet& Checker::sat(StateFormula f) {
  if (auto it = sat_.find(f.id()); it != sat_.end()) return it->second;
  for (StateFormula g : subformulae(f))
    if (!sat_.count(g.id())) eval_node(g);
  return sat_.at(f.id());
}

SatMap sat(const MarkovChain& chain, StateFormula f) {
  Checker c(chain);
  SatMap out;
  for (StateFormula g : subformulae(f)) out[g.id()] = c.sat(g);
  return out;
}

}  // namespace pctlwb
