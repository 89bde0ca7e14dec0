#include "pctlwb/markov.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace pctlwb {

StateId MarkovChain::add_state(std::string state_name, PropSet props) {
  canonicalize(props);
  state_names.push_back(std::move(state_name));
  valuation.push_back(std::move(props));
  trans.emplace_back();
  return static_cast<StateId>(state_names.size() - 1);
}

bool MarkovChain::has(const Prop& p, StateId s) const {
  const PropSet& v = valuation[s];
  return std::binary_search(v.begin(), v.end(), p);
}

std::optional<StateId> MarkovChain::find(std::string_view state_name) const {
  for (std::size_t i = 0; i < state_names.size(); ++i)
    if (state_names[i] == state_name) return static_cast<StateId>(i);
  return std::nullopt;
}

std::vector<Violation> validate(const MarkovChain& chain) {
  std::vector<Violation> out;
  const auto n = static_cast<StateId>(chain.size());
  if (chain.init && (*chain.init < 0 || *chain.init >= n)) out.push_back({*chain.init, "init", "unknown init state"});
  for (StateId s = 0; s < n; ++s) {
    const auto& row = chain.trans[s];
    if (row.empty()) {
      out.push_back({s, "empty-row", "no outgoing transitions"});
      continue;
    }
    Rational sum = 0;
    for (const Transition& t : row) {
      if (t.to < 0 || t.to >= n) out.push_back({s, "dangling-target", "target " + std::to_string(t.to) + " does not exist"});
      if (t.p <= 0) out.push_back({s, "nonpositive-probability", "probability " + to_string(t.p)});
      sum += t.p;
    }
    if (sum != 1) out.push_back({s, "row-sum", "row sums to " + to_string(sum) + " != 1"});
  }
  return out;
}

std::string describe(const Violation& v, const MarkovChain& chain) {
  std::string who = (v.state >= 0 && v.state < static_cast<StateId>(chain.size())) ? chain.state_names[v.state]
                                                                                   : std::to_string(v.state);
  return "state " + who + ": " + v.rule + ": " + v.detail;
}

std::vector<StateId> reachable(const MarkovChain& chain, StateId s) {
  if (s < 0 || s >= static_cast<StateId>(chain.size())) throw std::out_of_range("unknown state " + std::to_string(s));
  std::vector<char> seen(chain.size(), 0);
  std::vector<StateId> stack{s}, out;
  seen[s] = 1;
  while (!stack.empty()) {
    StateId u = stack.back();
    stack.pop_back();
    out.push_back(u);
    for (const Transition& t : chain.trans[u]) {
      if (t.to < 0 || t.to >= static_cast<StateId>(chain.size()) || seen[t.to]) continue;
      seen[t.to] = 1;
      stack.push_back(t.to);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ChainParseError::ChainParseError(const std::string& msg, int l)
    : std::runtime_error("line " + std::to_string(l) + ": " + msg), line(l) {}

namespace {

std::vector<std::string> words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

}  // namespace

// Transitions may reference states declared later, so they are resolved after the scan.
MarkovChain parse_chain(std::string_view text) {
  MarkovChain chain;
  std::unordered_map<std::string, StateId> ids;
  struct Pending {
    std::string from, to;
    Rational p;
    int line;
  };
  std::vector<Pending> pending;
  std::optional<std::pair<std::string, int>> init;

  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    // "state 0: a" and "state 0 : a" are both accepted.
    std::string line;
    for (char c : raw) {
      if (c == ':') line += " : ";
      else line += c;
    }
    auto w = words(line);
    if (w.empty()) continue;
    if (w[0] == "chain") {
      if (w.size() != 2) throw ChainParseError("expected 'chain NAME'", lineno);
      chain.name = w[1];
    } else if (w[0] == "state") {
      if (w.size() < 3 || w[2] != ":") throw ChainParseError("expected 'state ID : props'", lineno);
      if (ids.count(w[1])) throw ChainParseError("duplicate state id '" + w[1] + "'", lineno);
      PropSet props;
      for (std::size_t i = 3; i < w.size(); ++i) props.push_back(Prop::named(w[i]));
      ids[w[1]] = chain.add_state(w[1], std::move(props));
    } else if (w[0] == "init") {
      if (w.size() != 2) throw ChainParseError("expected 'init ID'", lineno);
      if (init) throw ChainParseError("duplicate init line", lineno);
      init = {w[1], lineno};
    } else if (w.size() == 4 && w[1] == "->") {
      Rational p;
      try {
        p = parse_rational(w[3]);
      } catch (const std::invalid_argument& e) {
        throw ChainParseError(e.what(), lineno);
      }
      pending.push_back({w[0], w[2], p, lineno});
    } else {
      throw ChainParseError("unrecognized line '" + raw + "'", lineno);
    }
  }
  for (const Pending& t : pending) {
    auto from = ids.find(t.from);
    auto to = ids.find(t.to);
    if (from == ids.end()) throw ChainParseError("unknown state '" + t.from + "'", t.line);
    if (to == ids.end()) throw ChainParseError("unknown state '" + t.to + "'", t.line);
    chain.trans[from->second].push_back({to->second, t.p});
  }
  if (init) {
    auto it = ids.find(init->first);
    if (it == ids.end()) throw ChainParseError("unknown init state '" + init->first + "'", init->second);
    chain.init = it->second;
  }
  return chain;
}

std::string print_chain(const MarkovChain& chain) {
  std::string out = "chain " + chain.name + "\n";
  for (std::size_t s = 0; s < chain.size(); ++s) {
    out += "state " + chain.state_names[s] + " :";
    for (const Prop& p : chain.valuation[s]) out += " " + p.name();
    out += "\n";
  }
  for (std::size_t s = 0; s < chain.size(); ++s)
    for (const Transition& t : chain.trans[s])
      out += chain.state_names[s] + " -> " + chain.state_names[t.to] + " " + to_fraction(t.p) + "\n";
  if (chain.init) out += "init " + chain.state_names[*chain.init] + "\n";
  return out;
}

}  // namespace pctlwb
