#pragma once

#include "pctlwb/checker.hpp"
#include "pctlwb/markov.hpp"

#include <random>

namespace pctlwb::testgen {

// Random chain with <= max_states states, <= 3 atoms, rational rows summing to 1.
inline MarkovChain random_chain(std::mt19937_64& rng, int max_states = 6) {
  std::uniform_int_distribution<int> nstates(1, max_states);
  const int n = nstates(rng);
  MarkovChain c;
  const char* names[] = {"a", "b", "c"};
  for (int s = 0; s < n; ++s) {
    PropSet props;
    for (const char* nm : names)
      if (rng() % 2) props.push_back(Prop::named(nm));
    canonicalize(props);
    c.add_state("s" + std::to_string(s), props);
  }
  for (int s = 0; s < n; ++s) {
    // Integer weights on a random subset of targets, normalised.
    std::vector<std::pair<int, long>> w;
    long total = 0;
    for (int t = 0; t < n; ++t) {
      if (rng() % 3 == 0) continue;
      long x = 1 + static_cast<long>(rng() % 7);
      w.push_back({t, x});
      total += x;
    }
    if (w.empty()) {
      w.push_back({static_cast<int>(rng() % n), 1});
      total = 1;
    }
    for (auto [t, x] : w) {
      Rational p(x, total);
      p.canonicalize();
      c.trans[s].push_back({t, p});
    }
  }
  c.init = 0;
  return c;
}

inline StateSet random_set(std::mt19937_64& rng, std::size_t n) {
  StateSet s(n);
  for (auto& x : s) x = rng() % 2;
  return s;
}

}  // namespace pctlwb::testgen
