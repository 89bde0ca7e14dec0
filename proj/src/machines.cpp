#include "pctlwb/machines.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <sstream>

namespace pctlwb {

bool CounterMachine::deterministic() const {
  return std::all_of(instructions.begin(), instructions.end(),
                     [](const Instruction& i) { return i.zero.size() == 1 && i.pos.size() == 1; });
}

namespace {

void check_targets(const LabelSet& s, int m, const std::string& where) {
  if (s.empty()) throw MachineError(where + ": empty target set");
  for (Label l : s)
    if (l < 1 || l > m) throw MachineError(where + ": target " + std::to_string(l) + " outside 1.." + std::to_string(m));
  if (!std::is_sorted(s.begin(), s.end()) || std::adjacent_find(s.begin(), s.end()) != s.end())
    throw MachineError(where + ": target set not sorted and duplicate-free");
}

}  // namespace

void check_machine(const CounterMachine& m) {
  if (m.d < 1) throw MachineError("machine needs at least one counter");
  if (m.instructions.empty()) throw MachineError("machine has no instructions");
  for (int l = 1; l <= m.m(); ++l) {
    const Instruction& ins = m.at(l);
    std::string where = "instruction " + std::to_string(l);
    if (ins.test < 1 || ins.test > m.d) throw MachineError(where + ": tested counter out of range");
    if (static_cast<int>(ins.updates.size()) != m.d) throw MachineError(where + ": update count differs from d");
    check_targets(ins.zero, m.m(), where);
    check_targets(ins.pos, m.m(), where);
  }
}

std::string to_string(const Configuration& c) {
  std::string s = "(" + std::to_string(c.label);
  for (auto v : c.counters) s += ", " + std::to_string(v);
  return s + ")";
}

Configuration initial_configuration(int d) { return Configuration{1, std::vector<std::uint64_t>(d, 0)}; }

std::vector<Configuration> successors(const CounterMachine& m, const Configuration& c) {
  const Instruction& ins = m.at(c.label);
  const LabelSet& targets = c.counters.at(ins.test - 1) == 0 ? ins.zero : ins.pos;
  std::vector<std::uint64_t> next = c.counters;
  for (int j = 0; j < m.d; ++j) {
    if (ins.updates[j] == Update::Inc) ++next[j];
    else if (next[j] > 0) --next[j];
  }
  std::vector<Configuration> out;
  for (Label l : targets) out.push_back(Configuration{l, next});
  return out;
}

std::variant<LassoComputation, Unbounded> run_deterministic(const CounterMachine& m, std::size_t max_steps) {
  check_machine(m);
  if (!m.deterministic()) throw MachineError("run_deterministic: machine is nondeterministic");
  std::map<Configuration, std::size_t> seen;
  LassoComputation lasso;
  Configuration c = initial_configuration(m.d);
  for (std::size_t step = 0; step <= max_steps; ++step) {
    lasso.configs.push_back(c);
    auto [it, fresh] = seen.emplace(c, lasso.configs.size() - 1);
    if (!fresh) {
      lasso.alpha = it->second + 1;
      return lasso;
    }
    c = successors(m, c).front();
  }
  return Unbounded{max_steps};
}

int MinskyMachine::counters() const {
  int d = 0;
  for (const auto& i : instructions) d = std::max(d, i.counter);
  return d;
}

void check_minsky(const MinskyMachine& m) {
  if (m.instructions.empty()) throw MachineError("minsky machine has no instructions");
  for (int l = 1; l <= m.m(); ++l) {
    const MinskyInstruction& ins = m.at(l);
    std::string where = "instruction " + std::to_string(l);
    if (ins.counter < 1) throw MachineError(where + ": bad counter");
    check_targets(ins.next, m.m(), where);
    if (ins.next.size() > 2) throw MachineError(where + ": more than two targets");
    if (ins.kind == MinskyKind::Test) {
      check_targets(ins.branch, m.m(), where);
      if (ins.branch.size() > 2) throw MachineError(where + ": more than two targets");
    }
  }
}

std::vector<Configuration> minsky_successors(const MinskyMachine& m, const Configuration& c) {
  const MinskyInstruction& ins = m.at(c.label);
  std::vector<std::uint64_t> next = c.counters;
  auto& v = next.at(ins.counter - 1);
  const LabelSet* targets = &ins.next;
  if (ins.kind == MinskyKind::Inc) {
    ++v;
  } else if (v > 0) {
    --v;
    targets = &ins.branch;
  }
  std::vector<Configuration> out;
  for (Label l : *targets) out.push_back(Configuration{l, next});
  return out;
}

CounterMachine minsky_to_counter(const MinskyMachine& mm) {
  check_minsky(mm);
  if (mm.counters() > 2) throw MachineError("minsky_to_counter: machine must have two counters");
  const int m = mm.m();
  auto active = [&](Label l) { return mm.at(l).counter; };
  auto retarget = [&](const LabelSet& s, int j) {
    LabelSet out;
    for (Label l : s) out.push_back(active(l) == j ? l + m : l + 2 * m);
    std::sort(out.begin(), out.end());
    return out;
  };
  auto updates = [](int j, Update on_j, Update other) {
    std::vector<Update> u(2, other);
    u[j - 1] = on_j;
    return u;
  };
  CounterMachine n;
  n.name = mm.name + "_n";
  n.d = 2;
  n.instructions.resize(3 * static_cast<std::size_t>(m));
  for (Label i = 1; i <= m; ++i) {
    const MinskyInstruction& ins = mm.at(i);
    const int j = ins.counter;
    Instruction& first = n.instructions[i - 1];
    Instruction& second = n.instructions[i + m - 1];
    if (ins.kind == MinskyKind::Inc) {
      LabelSet x = retarget(ins.next, j);
      first = Instruction{j, x, x, {Update::Inc, Update::Inc}};
      second = Instruction{j, ins.next, ins.next, updates(j, Update::Inc, Update::Dec)};
    } else {
      first = Instruction{j, retarget(ins.next, j), retarget(ins.branch, j), updates(j, Update::Dec, Update::Inc)};
      second = Instruction{j, ins.next, ins.branch, {Update::Dec, Update::Dec}};
    }
    n.instructions[i + 2 * m - 1] = Instruction{1, {i + m}, {i + m}, updates(j, Update::Dec, Update::Inc)};
  }
  check_machine(n);
  return n;
}

MachineParseError::MachineParseError(const std::string& msg, int l)
    : std::runtime_error("line " + std::to_string(l) + ": " + msg), line(l) {}

namespace {

std::string strip(std::string_view s) {
  auto hash = s.find('#');
  if (hash != std::string_view::npos) s = s.substr(0, hash);
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

LabelSet parse_labels(const std::string& body, int line) {
  LabelSet out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::string t = strip(item);
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
      throw MachineParseError("bad label '" + t + "'", line);
    out.push_back(std::stoi(t));
  }
  if (out.empty()) throw MachineParseError("empty target set", line);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string print_labels(const LabelSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

// Collects numbered instruction lines into dense 1..m order.
template <class T>
std::vector<T> densify(std::map<int, std::pair<T, int>>& by_label) {
  std::vector<T> out;
  int expect = 1;
  for (auto& [l, v] : by_label) {
    if (l != expect) throw MachineParseError("labels must be 1..m without gaps (missing " + std::to_string(expect) + ")", v.second);
    out.push_back(std::move(v.first));
    ++expect;
  }
  if (out.empty()) throw MachineParseError("no instructions", 0);
  return out;
}

}  // namespace

CounterMachine parse_machine(std::string_view text) {
  static const std::regex header_re(R"(machine\s+(\S+))");
  static const std::regex counters_re(R"(counters\s+(\d+))");
  static const std::regex ins_re(
      R"((\d+)\s*:\s*if\s+C(\d+)\s*=\s*0\s+goto\s*\{([^}]*)\}\s*else\s+goto\s*\{([^}]*)\}\s*;\s*(.*))");
  CounterMachine m;
  bool have_d = false;
  std::map<int, std::pair<Instruction, int>> by_label;
  std::stringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = strip(raw);
    if (s.empty()) continue;
    std::smatch mt;
    if (std::regex_match(s, mt, header_re)) {
      m.name = mt[1];
    } else if (std::regex_match(s, mt, counters_re)) {
      m.d = std::stoi(mt[1]);
      have_d = true;
    } else if (std::regex_match(s, mt, ins_re)) {
      Instruction ins;
      int label = std::stoi(mt[1]);
      ins.test = std::stoi(mt[2]);
      ins.zero = parse_labels(mt[3], line);
      ins.pos = parse_labels(mt[4], line);
      std::stringstream ups(mt[5].str());
      std::string u;
      while (ups >> u) {
        if (u == "inc") ins.updates.push_back(Update::Inc);
        else if (u == "dec") ins.updates.push_back(Update::Dec);
        else throw MachineParseError("unknown update '" + u + "'", line);
      }
      if (!by_label.emplace(label, std::make_pair(std::move(ins), line)).second)
        throw MachineParseError("duplicate label " + std::to_string(label), line);
    } else {
      throw MachineParseError("unrecognized line '" + s + "'", line);
    }
  }
  if (!have_d) throw MachineParseError("missing 'counters D' header", line);
  m.instructions = densify(by_label);
  try {
    check_machine(m);
  } catch (const MachineError& e) {
    throw MachineParseError(e.what(), 0);
  }
  return m;
}

std::string print_machine(const CounterMachine& m) {
  std::string out = "machine " + m.name + "\ncounters " + std::to_string(m.d) + "\n";
  for (int l = 1; l <= m.m(); ++l) {
    const Instruction& ins = m.at(l);
    out += std::to_string(l) + ": if C" + std::to_string(ins.test) + " = 0 goto " + print_labels(ins.zero) +
           " else goto " + print_labels(ins.pos) + " ;";
    for (Update u : ins.updates) out += u == Update::Inc ? " inc" : " dec";
    out += "\n";
  }
  return out;
}

MinskyMachine parse_minsky(std::string_view text) {
  static const std::regex header_re(R"(minsky\s+(\S+))");
  static const std::regex inc_re(R"((\d+)\s*:\s*inc\s+c(\d+)\s+goto\s*\{([^}]*)\})");
  static const std::regex test_re(R"((\d+)\s*:\s*test\s+c(\d+)\s+zero\s*\{([^}]*)\}\s*else\s*\{([^}]*)\})");
  MinskyMachine m;
  std::map<int, std::pair<MinskyInstruction, int>> by_label;
  std::stringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = strip(raw);
    if (s.empty()) continue;
    std::smatch mt;
    MinskyInstruction ins;
    if (std::regex_match(s, mt, header_re)) {
      m.name = mt[1];
      continue;
    } else if (std::regex_match(s, mt, inc_re)) {
      ins.kind = MinskyKind::Inc;
      ins.counter = std::stoi(mt[2]);
      ins.next = parse_labels(mt[3], line);
    } else if (std::regex_match(s, mt, test_re)) {
      ins.kind = MinskyKind::Test;
      ins.counter = std::stoi(mt[2]);
      ins.next = parse_labels(mt[3], line);
      ins.branch = parse_labels(mt[4], line);
    } else {
      throw MachineParseError("unrecognized line '" + s + "'", line);
    }
    int label = std::stoi(mt[1]);
    if (!by_label.emplace(label, std::make_pair(std::move(ins), line)).second)
      throw MachineParseError("duplicate label " + std::to_string(label), line);
  }
  m.instructions = densify(by_label);
  try {
    check_minsky(m);
  } catch (const MachineError& e) {
    throw MachineParseError(e.what(), 0);
  }
  return m;
}

std::string print_minsky(const MinskyMachine& m) {
  std::string out = "minsky " + m.name + "\n";
  for (int l = 1; l <= m.m(); ++l) {
    const MinskyInstruction& ins = m.at(l);
    out += std::to_string(l) + ": ";
    if (ins.kind == MinskyKind::Inc)
      out += "inc c" + std::to_string(ins.counter) + " goto " + print_labels(ins.next);
    else
      out += "test c" + std::to_string(ins.counter) + " zero " + print_labels(ins.next) + " else " +
             print_labels(ins.branch);
    out += "\n";
  }
  return out;
}

}  // namespace pctlwb
