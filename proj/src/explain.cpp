#include "pctlwb/explain.hpp"

#include <deque>
#include <optional>

namespace pctlwb {

namespace {

class Explainer {
 public:
  Explainer(Checker& ck, const std::unordered_map<std::uint32_t, std::string>& labels, const ExplainOptions& opt)
      : ck_(ck), labels_(labels), opt_(opt) {}

  void fails(StateFormula f, StateId s, const std::string& path, std::size_t depth);
  std::vector<std::string> lines;

 private:
  std::string name(StateFormula f) const {
    if (auto it = labels_.find(f.id()); it != labels_.end()) return it->second;
    std::string t = print_formula(f);
    if (t.size() > opt_.max_formula_chars) t = t.substr(0, opt_.max_formula_chars) + "...";
    return t;
  }
  bool full() const { return lines.size() >= opt_.max_lines; }
  void emit(const std::string& path, StateId s, const std::string& what) {
    if (full()) return;
    lines.push_back(path + " | " + ck_.chain().state_names[s] + " | " + what);
    if (full()) lines.push_back("(line budget exhausted)");
  }
  std::optional<StateId> reachable_in(StateId s, const StateSet& target) const;

  Checker& ck_;
  const std::unordered_map<std::uint32_t, std::string>& labels_;
  const ExplainOptions& opt_;
};

std::optional<StateId> Explainer::reachable_in(StateId s, const StateSet& target) const {
  for (StateId t : reachable(ck_.chain(), s))
    if (target[t]) return t;
  return std::nullopt;
}

// Named sub-conjunctions stay whole so their label shows up in the path.
void flatten(StateFormula f, std::vector<StateFormula>& out, const std::unordered_map<std::uint32_t, std::string>& labels,
             bool root = true) {
  if (f.kind() == SKind::And && (root || !labels.count(f.id()))) {
    flatten(f.lhs(), out, labels, false);
    flatten(f.rhs(), out, labels, false);
  } else {
    out.push_back(f);
  }
}

void Explainer::fails(StateFormula f, StateId s, const std::string& path, std::size_t depth) {
  if (full()) return;
  // Only named builders and leaves appear in the path; connective plumbing is skipped.
  auto join = [&](const std::string& part) { return path.empty() ? part : path + " > " + part; };
  const auto label = labels_.find(f.id());
  const bool leaf = f.kind() == SKind::Prob || f.kind() == SKind::Atom || f.kind() == SKind::True;
  const std::string here = label != labels_.end() ? join(label->second) : leaf ? join(name(f)) : path;
  if (depth >= opt_.max_depth) {
    emit(here, s, "false (depth budget)");
    return;
  }
  switch (f.kind()) {
    case SKind::True:
      emit(here, s, "true is never false");
      return;
    case SKind::Atom:
      emit(here, s, "atom absent");
      return;
    case SKind::And: {
      std::vector<StateFormula> parts;
      flatten(f, parts, labels_);
      for (StateFormula p : parts)
        if (!ck_.holds(p, s)) fails(p, s, here, depth + 1);
      return;
    }
    case SKind::Not: {
      StateFormula g = f.lhs();
      // !(a & !b) is a => b: a holds, so b must be what fails.
      if (g.kind() == SKind::And && g.rhs().kind() == SKind::Not) {
        fails(g.rhs().lhs(), s, here, depth + 1);
        return;
      }
      if (g.kind() == SKind::And) {
        std::vector<StateFormula> parts;
        flatten(g, parts, labels_);
        bool all_neg = true;
        for (StateFormula p : parts) all_neg = all_neg && p.kind() == SKind::Not;
        if (all_neg) {  // a disjunction: every disjunct fails
          emit(here, s, "no disjunct holds");
          for (StateFormula p : parts) fails(p.lhs(), s, here, depth + 1);
          return;
        }
      }
      if (g.kind() == SKind::Not) {
        fails(g.lhs(), s, here, depth + 1);
        return;
      }
      emit(here, s, "negated subformula holds");
      return;
    }
    case SKind::Prob: {
      PathFormula p = f.path();
      const Rational& x = ck_.probabilities(p)[s];
      emit(here, s, "P = " + to_string(x) + ", required " + std::string(cmp_text(f.cmp())) + " " + to_string(f.bound()));
      // G_{=1} body is P=0[true U !body]: show a reachable state where the body fails.
      if (p.kind() == PKind::Until && p.lhs().kind() == SKind::True && f.cmp() == Cmp::Eq && f.bound() == 0) {
        StateFormula bad = p.rhs();
        if (auto t = reachable_in(s, ck_.sat(bad)); t && bad.kind() == SKind::Not)
          fails(bad.lhs(), *t, here + " @" + ck_.chain().state_names[*t], depth + 1);
      }
      return;
    }
  }
}

}  // namespace

std::vector<std::string> explain_failure(Checker& checker, StateFormula f, StateId s,
                                         const std::unordered_map<std::uint32_t, std::string>& labels,
                                         const ExplainOptions& opt) {
  Explainer e(checker, labels, opt);
  if (checker.holds(f, s)) return {"holds at " + checker.chain().state_names[s]};
  e.fails(f, s, "", 0);
  return e.lines;
}

}  // namespace pctlwb
