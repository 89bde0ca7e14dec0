#include "pctlwb/cli.hpp"

#include "pctlwb/checker.hpp"
#include "pctlwb/explain.hpp"
#include "pctlwb/formula.hpp"
#include "pctlwb/geometry.hpp"
#include "pctlwb/machines.hpp"
#include "pctlwb/markov.hpp"
#include "pctlwb/reduction.hpp"
#include "pctlwb/witness.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace pctlwb {

using json = nlohmann::json;

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

namespace {

// Input problems: bad files, bad flags, inconsistent constants.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

class Run {
 public:
  explicit Run(std::string command) { manifest_["command"] = std::move(command); }

  std::string read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    manifest_["inputs"][path] = sha256_hex(text);
    return text;
  }
  void write(const std::string& path, const std::string& text) {
    std::ofstream o(path, std::ios::binary);
    if (!o) throw InputError("cannot write " + path);
    o << text;
    manifest_["outputs"][path] = sha256_hex(text);
  }
  template <class F>
  auto timed(const std::string& stage, F&& f) {
    auto t0 = Clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      manifest_["timings"][stage] = ms(t0);
    } else {
      auto r = f();
      manifest_["timings"][stage] = ms(t0);
      return r;
    }
  }
  void constants(const GadgetConstants& c) {
    manifest_["constants"] = {{"lambda", to_string(c.lambda)}, {"z", {to_string(c.z.v1), to_string(c.z.v2)}},
                              {"delta", to_string(c.delta)},   {"rho", to_string(c.rho)},
                              {"i_lo", to_string(c.i_lo)},     {"i_hi", to_string(c.i_hi)}};
  }
  json& operator[](const std::string& k) { return manifest_[k]; }
  void save(const std::string& out) {
    if (!manifest_.contains("seed")) manifest_["seed"] = nullptr;
    if (!manifest_.contains("timings")) manifest_["timings"] = json::object();
    std::ofstream o(out + ".manifest");
    if (!o) throw InputError("cannot write " + out + ".manifest");
    o << manifest_.dump(2) << "\n";
  }

 private:
  static double ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  }
  json manifest_;
};

Fragment parse_fragment(const std::string& s) {
  if (s == "u") return Fragment::WithUntil;
  if (s == "fg") return Fragment::FGOnly;
  throw InputError("fragment must be u or fg");
}

Variant parse_variant(const std::string& s) {
  if (s == "recurrent") return Variant::Recurrent;
  if (s == "finite") return Variant::FiniteSat;
  throw InputError("variant must be recurrent or finite");
}

LabelSet parse_tau(const std::string& s) {
  LabelSet tau;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      tau.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw InputError("bad tau label '" + item + "'");
    }
  }
  std::sort(tau.begin(), tau.end());
  tau.erase(std::unique(tau.begin(), tau.end()), tau.end());
  return tau;
}

RMode parse_rmode(const std::string& s) {
  if (s == "solved") return RMode::Solved;
  if (s == "printed") return RMode::Printed;
  throw InputError("r-mode must be solved or printed");
}

LassoComputation lasso_or_budget(const CounterMachine& m, std::size_t max_steps) {
  auto res = run_deterministic(m, max_steps);
  if (auto* u = std::get_if<Unbounded>(&res))
    throw BudgetError("no lasso within " + std::to_string(u->max_steps) + " steps");
  return std::get<LassoComputation>(res);
}

json witness_json(const WitnessReport& rep) {
  json states = json::array();
  for (std::size_t s = 0; s < rep.states.size(); ++s) states.push_back({rep.chain.state_names[s], to_string(rep.states[s])});
  json diags = json::array();
  for (const auto& d : rep.diagnostics) diags.push_back({{"kind", d.kind}, {"message", d.message}});
  return {{"states", states}, {"diagnostics", diags}};
}

struct Options {
  std::string chain, formula, state, machine, out, fragment = "u", variant = "finite", tau, program, points,
      r_mode = "solved", lambda, lambda_shift;
  bool probs = false;
  std::size_t max_steps = 100000, state_cap = 100000, samples = 1000, depth = 64, lines = 60;
  std::uint64_t seed = 1;
};

int cmd_check(const Options& o, std::ostream& out) {
  Run run("check");
  MarkovChain chain = parse_chain(run.read(o.chain));
  if (auto v = validate(chain); !v.empty()) throw InputError("invalid chain: " + describe(v.front(), chain));
  StateFormula f = parse_formula(run.read(o.formula));
  std::vector<StateId> which;
  if (!o.state.empty()) {
    auto s = chain.find(o.state);
    if (!s) throw InputError("unknown state " + o.state);
    which.push_back(*s);
  } else {
    for (std::size_t s = 0; s < chain.size(); ++s) which.push_back(static_cast<StateId>(s));
  }
  Checker ck(chain);
  std::vector<StateFormula> tops;
  std::vector<StateFormula> stack{f};
  while (!stack.empty()) {
    StateFormula g = stack.back();
    stack.pop_back();
    if (g.kind() == SKind::And) {
      stack.push_back(g.rhs());
      stack.push_back(g.lhs());
    } else if (g.kind() == SKind::Prob) {
      tops.push_back(g);
    }
  }
  for (StateId s : which) {
    out << chain.state_names[s] << ": " << (ck.holds(f, s) ? "true" : "false") << "\n";
    if (o.probs)
      for (StateFormula p : tops)
        out << "  " << print_path(p.path()) << " = " << to_string(ck.probabilities(p.path())[s]) << "\n";
  }
  return kOk;
}

ReductionConfig reduction_config(const Options& o, const GadgetConstants& c) {
  ReductionConfig rc;
  rc.constants = c;
  rc.fragment = parse_fragment(o.fragment);
  rc.variant = parse_variant(o.variant);
  rc.tau = parse_tau(o.tau);
  if (rc.variant == Variant::Recurrent && rc.tau.empty()) throw InputError("--tau is required for the recurrent variant");
  return rc;
}

int cmd_reduce(const Options& o, std::ostream& out) {
  Run run("reduce");
  CounterMachine m = parse_machine(run.read(o.machine));
  ReductionConfig rc = reduction_config(o, GadgetConstants::standard());
  if (m.d != 2) throw InputError("reduction needs d = 2, got " + std::to_string(m.d));
  Reduction red(m, rc);
  StateFormula f = run.timed("compile", [&] { return red.compile(); });
  std::string text = run.timed("print", [&] { return print_formula(f); });
  run.write(o.out, text + "\n");
  FormulaStats st = stats(f);
  json parts = json::array();
  for (const auto& [name, g] : red.parts()) parts.push_back(name);
  run.constants(rc.constants);
  run["fragment"] = std::string(fragment_name(rc.fragment));
  run["variant"] = std::string(variant_name(rc.variant));
  run["verdicts"] = {{"atoms", atoms_of(f).size()},
                     {"state_nodes", st.state_nodes},
                     {"path_nodes", st.path_nodes},
                     {"tree_size", st.tree_size.get_str()},
                     {"parts", parts}};
  run.save(o.out);
  out << "wrote " << o.out << ": " << atoms_of(f).size() << " atoms, " << st.state_nodes << " state nodes\n";
  return kOk;
}

int cmd_witness(const Options& o, std::ostream& out) {
  Run run("witness");
  CounterMachine m = parse_machine(run.read(o.machine));
  LassoComputation lasso = run.timed("run", [&] { return lasso_or_budget(m, o.max_steps); });
  WitnessConfig wc;
  wc.state_cap = o.state_cap;
  wc.r_mode = parse_rmode(o.r_mode);
  WitnessReport rep = run.timed("closure", [&] { return build_witness(m, lasso, wc); });
  run.write(o.out, print_chain(rep.chain));
  run.constants(rep.constants);
  run["lasso"] = {{"alpha", lasso.alpha}, {"beta", lasso.beta()}};
  run["witness"] = witness_json(rep);
  run["verdicts"] = {{"states", rep.chain.size()}};
  run.save(o.out);
  out << "wrote " << o.out << ": " << rep.chain.size() << " states, " << rep.diagnostics.size() << " diagnostics\n";
  for (const auto& d : rep.diagnostics) out << "  [" << d.kind << "] " << d.message << "\n";
  return kOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  Run run("verify");
  CounterMachine m = parse_machine(run.read(o.machine));
  GadgetConstants c = GadgetConstants::standard();
  if (!o.lambda.empty()) c = GadgetConstants::make(parse_rational(o.lambda), c.z, c.delta, c.rho);
  ReductionConfig rc = reduction_config(o, c);
  if (m.d != 2) throw InputError("reduction needs d = 2, got " + std::to_string(m.d));
  auto t0 = Clock::now();
  LassoComputation lasso = lasso_or_budget(m, o.max_steps);
  WitnessConfig wc;
  wc.constants = c;
  wc.state_cap = o.state_cap;
  wc.r_mode = parse_rmode(o.r_mode);
  WitnessReport rep = build_witness(m, lasso, wc);
  Reduction red(m, rc);
  StateFormula f = red.compile();
  Checker ck(rep.chain);
  bool ok = ck.holds(f, rep.init);
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  out << "verdict: " << (ok ? "SAT" : "UNSAT") << " at " << rep.chain.state_names[rep.init] << " "
      << to_string(rep.states[rep.init]) << "\n";
  out << "witness states: " << rep.chain.size() << ", formula nodes: " << stats(f).state_nodes
      << ", time: " << std::fixed << std::setprecision(2) << secs << " s\n";
  for (const auto& [name, g] : red.parts())
    out << "  " << name << ": " << (ck.holds(g, rep.init) ? "holds" : "FAILS") << "\n";
  if (!ok) {
    ExplainOptions eo;
    eo.max_lines = o.lines;
    for (const std::string& line : explain_failure(ck, f, rep.init, red.labels(), eo)) out << "  " << line << "\n";
  }
  bool incl = true;
  if (rc.fragment == Fragment::FGOnly) {
    for (int k = 1; k <= 2; ++k) {
      const StateSet& bar = ck.sat(red.structure(k, Fragment::FGOnly));
      const StateSet& full = ck.sat(red.structure(k, Fragment::WithUntil));
      std::size_t nbar = 0, bad = 0;
      for (std::size_t s = 0; s < bar.size(); ++s) {
        nbar += bar[s] != 0;
        bad += bar[s] && !full[s];
      }
      out << "Struct-bar^" << k << " => Struct^" << k << ": " << (bad ? "VIOLATED" : "holds") << " (" << nbar
          << " Struct-bar states, " << bad << " counterexamples)\n";
      incl = incl && bad == 0;
    }
  }
  return ok && incl ? kOk : kConstruction;
}

int cmd_geometry(const Options& o, std::ostream& out) {
  Run run("geometry");
  Geometry g(GadgetConstants::standard());
  PropertyOptions lo;
  lo.samples = o.samples;
  lo.seed = o.seed;
  if (!o.lambda_shift.empty()) lo.inc_lambda = g.constants().lambda + parse_rational(o.lambda_shift);
  auto reports = run.timed("properties", [&] { return check_properties(g, lo); });
  reports.push_back(run.timed("limit", [&] { return check_limit_proxy(g, o.depth); }));
  bool ok = true;
  json verdicts = json::object();
  for (const auto& r : reports) {
    out << (r.ok() ? "PASS " : "FAIL ") << r.name << " (" << r.checked << " checks)";
    if (r.counterexample) out << ": " << *r.counterexample;
    out << "\n";
    verdicts[r.name] = r.ok();
    ok = ok && r.ok();
  }
  if (!o.points.empty()) {
    std::ostringstream pts;
    pts << "# n x y\n";
    for (std::size_t n = 0; n <= o.depth; ++n) {
      Vec2 v = g.inc_iter(n);
      pts << n << " " << to_fraction(v.v1) << " " << to_fraction(v.v2) << "\n";
    }
    run.write(o.points, pts.str());
    run.constants(g.constants());
    run["seed"] = o.seed;
    run["verdicts"] = verdicts;
    run.save(o.points);
  }
  return ok ? kOk : kConstruction;
}

int cmd_minsky(const Options& o, std::ostream& out) {
  Run run("minsky-compile");
  MinskyMachine mm = parse_minsky(run.read(o.program));
  CounterMachine cm = minsky_to_counter(mm);
  run.write(o.out, print_machine(cm));
  run["verdicts"] = {{"minsky_instructions", mm.m()},
                     {"instructions", cm.m()},
                     {"recurrence_labels", {1, mm.m() + 1}}};
  run.save(o.out);
  out << "wrote " << o.out << ": " << cm.m() << " instructions; M recurrent iff the output is {1, " << mm.m() + 1
      << "}-recurrent\n";
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"PCTL witness builder"};
  app.require_subcommand(1);
  Options o;

  auto* check = app.add_subcommand("check", "model-check a formula on a chain");
  check->add_option("--chain", o.chain)->required();
  check->add_option("--formula", o.formula)->required();
  check->add_option("--state", o.state);
  check->add_flag("--probs", o.probs, "print probabilities of top-level Prob nodes");

  auto* reduce = app.add_subcommand("reduce", "compile a two-counter machine to a formula");
  reduce->add_option("--machine", o.machine)->required();
  reduce->add_option("--fragment", o.fragment);
  reduce->add_option("--variant", o.variant);
  reduce->add_option("--tau", o.tau, "comma-separated labels");
  reduce->add_option("-o", o.out)->required();

  auto* witness = app.add_subcommand("witness", "build the witness chain of a bounded machine");
  witness->add_option("--machine", o.machine)->required();
  witness->add_option("--max-steps", o.max_steps);
  witness->add_option("--state-cap", o.state_cap);
  witness->add_option("--r-mode", o.r_mode);
  witness->add_option("-o", o.out)->required();

  auto* verify = app.add_subcommand("verify", "reduce, build the witness and check it");
  verify->add_option("--machine", o.machine)->required();
  verify->add_option("--fragment", o.fragment);
  verify->add_option("--variant", o.variant);
  verify->add_option("--tau", o.tau);
  verify->add_option("--lambda", o.lambda);
  verify->add_option("--max-steps", o.max_steps);
  verify->add_option("--state-cap", o.state_cap);
  verify->add_option("--r-mode", o.r_mode);
  verify->add_option("--explain-lines", o.lines);

  auto* geometry = app.add_subcommand("geometry", "run the exact Inc/Dec property suites");
  geometry->add_option("--samples", o.samples);
  geometry->add_option("--seed", o.seed);
  geometry->add_option("--emit-points", o.points);
  geometry->add_option("--depth", o.depth);
  geometry->add_option("--lambda-shift", o.lambda_shift, "perturb lambda inside inc only");

  auto* minsky = app.add_subcommand("minsky-compile", "translate a Minsky program to a counter machine");
  minsky->add_option("--program", o.program)->required();
  minsky->add_option("-o", o.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInput;
  }

  try {
    if (*check) return cmd_check(o, out);
    if (*reduce) return cmd_reduce(o, out);
    if (*witness) return cmd_witness(o, out);
    if (*verify) return cmd_verify(o, out);
    if (*geometry) return cmd_geometry(o, out);
    if (*minsky) return cmd_minsky(o, out);
  } catch (const BudgetError& e) {
    err << "budget: " << e.what() << "\n";
    return kBudget;
  } catch (const WitnessError& e) {
    const bool cap = e.kind == WitnessError::Kind::StateCap;
    err << (cap ? "budget: " : "construction: ") << e.what() << "\n";
    return cap ? kBudget : kConstruction;
  } catch (const ParseError& e) {
    err << "formula parse error: " << e.what() << "\n";
    return kInput;
  } catch (const ChainParseError& e) {
    err << "chain parse error: " << e.what() << "\n";
    return kInput;
  } catch (const MachineParseError& e) {
    err << "machine parse error: " << e.what() << "\n";
    return kInput;
  } catch (const GeometryError& e) {
    err << "constants: " << e.what() << "\n";
    return kInput;
  } catch (const InputError& e) {
    err << e.what() << "\n";
    return kInput;
  } catch (const std::invalid_argument& e) {
    err << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    err << "internal: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"pctlwb"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace pctlwb
