#include "conseq/logic.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace conseq {

namespace {

void validate_formula(const Formula& f, const Signature& sig, const VarSet& vars) {
  if (f.is_variable()) {
    if (f.var() >= vars.size()) throw std::invalid_argument("variable index out of range");
    return;
  }
  if (f.conn() >= sig.size()) throw std::invalid_argument("connective index out of range");
  if (static_cast<int>(f.args().size()) != sig.at(f.conn()).arity)
    throw std::invalid_argument("arity mismatch in formula");
  for (const auto& a : f.args()) validate_formula(a, sig, vars);
}

// deepest occurrence of each variable (distance from root), and of any
// constant leaf
void leaf_depths(const Formula& f, int dist, std::map<int, int>& var_depth, int& const_depth) {
  if (f.is_variable()) {
    auto [it, fresh] = var_depth.emplace(f.var(), dist);
    if (!fresh) it->second = std::max(it->second, dist);
    return;
  }
  if (f.args().empty()) {
    const_depth = std::max(const_depth, dist);
    return;
  }
  for (const auto& a : f.args()) leaf_depths(a, dist + 1, var_depth, const_depth);
}

}  // namespace

void LogicPresentation::validate() const {
  if (vars.size() == 0) throw std::invalid_argument("presentation needs at least one variable");
  check_disjoint(sig, vars);
  for (const auto& r : rules) {
    for (const auto& p : r.premises) validate_formula(p, sig, vars);
    validate_formula(r.conclusion, sig, vars);
  }
}

LogicPresentation LogicPresentation::with_extra_vars(const std::vector<std::string>& extra) const {
  LogicPresentation out = *this;
  out.vars = vars.extended(extra);
  return out;
}

bool rules_nondeepening(const LogicPresentation& l) {
  for (const auto& r : l.rules) {
    std::map<int, int> concl_vars;
    int concl_const = -1;
    leaf_depths(r.conclusion, 0, concl_vars, concl_const);
    if (r.premises.empty()) {
      if (!concl_vars.empty()) return false;  // axiom with free variables
      continue;
    }
    std::map<int, int> prem_vars;
    int prem_const = -1;
    for (const auto& p : r.premises) leaf_depths(p, 0, prem_vars, prem_const);
    for (const auto& [v, d] : concl_vars) {
      auto it = prem_vars.find(v);
      if (it == prem_vars.end() || it->second < d) return false;
    }
  }
  return true;
}

int Universe::find(const Formula& f) const {
  for (int i = 0; i < size(); ++i)
    if (formulas[i] == f) return i;
  return -1;
}

Mask Universe::mask_of(const std::vector<Formula>& fs) const {
  Mask m = 0;
  for (const auto& f : fs) {
    int i = find(f);
    if (i < 0) throw std::invalid_argument("formula outside the enumerated universe");
    m |= Mask{1} << i;
  }
  return m;
}

std::vector<Formula> Universe::unmask(Mask m) const {
  std::vector<Formula> out;
  for (int i = 0; i < size(); ++i)
    if (bit(m, i)) out.push_back(formulas[i]);
  return out;
}

std::shared_ptr<const Carrier> Universe::as_carrier() const {
  auto c = std::make_shared<Carrier>();
  for (const auto& f : formulas) c->labels.push_back(format_formula(f, sig, vars));
  return c;
}

std::shared_ptr<const Universe> make_universe(const LogicPresentation& l) {
  l.validate();
  auto u = std::make_shared<Universe>();
  u->sig = l.sig;
  u->vars = l.vars;
  u->depth = l.constants_only() ? 0 : l.bounds.max_depth;
  u->formulas = enumerate_formulas(l.sig, l.vars, u->depth);
  bool skeletons_fit = true;
  for (const auto& r : l.rules) {
    std::map<int, int> vd;
    int cd = -1;  // deepest constant leaf of the conclusion
    leaf_depths(r.conclusion, 0, vd, cd);
    if (cd > u->depth) skeletons_fit = false;
  }
  u->exact = l.constants_only() || (rules_nondeepening(l) && skeletons_fit);
  return u;
}

// --- ground-instance saturation over an enumerated universe --------------

namespace {

struct GroundInstance {
  Mask premises = 0;
  int conclusion = -1;
  int rule = -1;
  Substitution subst;
};

std::vector<GroundInstance> ground_instances(const LogicPresentation& l, const Universe& u) {
  std::vector<GroundInstance> out;
  std::set<std::pair<Mask, int>> seen;
  std::unordered_map<Formula, int, FormulaHash> index;
  for (int i = 0; i < u.size(); ++i) index.emplace(u.formulas[i], i);
  auto find = [&](const Formula& f) {
    auto it = index.find(f);
    return it == index.end() ? -1 : it->second;
  };

  for (int ri = 0; ri < static_cast<int>(l.rules.size()); ++ri) {
    const Rule& r = l.rules[ri];
    std::vector<int> rule_vars;
    {
      std::set<int> vs;
      for (const auto& p : r.premises)
        for (int v : p.variables()) vs.insert(v);
      for (int v : r.conclusion.variables()) vs.insert(v);
      rule_vars.assign(vs.begin(), vs.end());
    }
    for (const auto& sigma : enumerate_substitutions(rule_vars, u.formulas)) {
      int concl = find(sigma(r.conclusion));
      if (concl < 0) continue;
      Mask prem = 0;
      bool ok = true;
      for (const auto& p : r.premises) {
        int pi = find(sigma(p));
        if (pi < 0) {
          ok = false;
          break;
        }
        prem |= Mask{1} << pi;
      }
      if (!ok) continue;
      if (!seen.emplace(prem, concl).second) continue;
      out.push_back({prem, concl, ri, sigma});
    }
  }
  return out;
}

Mask saturate_mask(const std::vector<GroundInstance>& inst, Mask start) {
  Mask cur = start;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& gi : inst)
      if (!bit(cur, gi.conclusion) && is_subset(gi.premises, cur)) {
        cur |= Mask{1} << gi.conclusion;
        changed = true;
      }
  }
  return cur;
}

}  // namespace

RelationTable closure_table(const LogicPresentation& l, std::shared_ptr<const Universe> u,
                            Exec exec) {
  if (!u) u = make_universe(l);
  if (!u->exact) throw std::invalid_argument("closure table needs an exact universe");
  if (u->size() > 20) throw std::invalid_argument("universe too large for a full table");
  auto inst = ground_instances(l, *u);
  RelationTable t{u, std::vector<Mask>(std::size_t{1} << u->size())};
  std::int64_t total = static_cast<std::int64_t>(t.derivable.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
#endif
  for (std::int64_t s = 0; s < total; ++s)
    t.derivable[s] = saturate_mask(inst, static_cast<Mask>(s));
  return t;
}

// --- matching-based saturation on explicit fact sets ---------------------

namespace {

struct FactBase {
  std::vector<Formula> facts;
  std::unordered_map<Formula, int, FormulaHash> index;
  std::vector<DerivationStep> steps;  // parallel to facts

  bool add(Formula f, DerivationStep step) {
    if (index.count(f)) return false;
    index.emplace(f, static_cast<int>(facts.size()));
    facts.push_back(f);
    steps.push_back(std::move(step));
    return true;
  }
};

// backtracking premise matcher; calls out(sigma) for every way of matching
// all premises against current facts
template <typename F>
void match_premises(const std::vector<Formula>& premises, std::size_t i, const FactBase& base,
                    std::size_t limit, const Substitution& acc, F&& out) {
  if (i == premises.size()) {
    out(acc);
    return;
  }
  for (std::size_t fi = 0; fi < limit; ++fi) {
    if (auto m = match(acc(premises[i]), base.facts[fi])) {
      Substitution next = acc;
      for (const auto& [v, img] : m->mapping()) next.set(v, img);
      match_premises(premises, i + 1, base, limit, next, out);
    }
  }
}

struct MatchSaturation {
  FactBase base;
  bool closed = false;
};

MatchSaturation saturate_matching(const LogicPresentation& l, const std::vector<Formula>& start,
                                  const std::vector<Formula>* free_pool, std::size_t max_facts,
                                  int max_rounds) {
  MatchSaturation sat;
  for (const auto& f : start) sat.base.add(f, DerivationStep{f, -1, {}, {}});

  for (int round = 0; round < max_rounds; ++round) {
    bool changed = false;
    for (int ri = 0; ri < static_cast<int>(l.rules.size()); ++ri) {
      const Rule& r = l.rules[ri];
      std::size_t limit = sat.base.facts.size();
      std::vector<std::pair<Substitution, std::vector<Formula>>> firings;
      match_premises(r.premises, 0, sat.base, limit, Substitution::identity(),
                     [&](const Substitution& sigma) {
                       std::vector<Formula> used;
                       used.reserve(r.premises.size());
                       for (const auto& p : r.premises) used.push_back(sigma(p));
                       firings.emplace_back(sigma, std::move(used));
                     });
      for (auto& [sigma, used] : firings) {
        // instantiate conclusion variables that no premise bound
        std::vector<int> free_vars;
        for (int v : r.conclusion.variables())
          if (!sigma.find(v)) free_vars.push_back(v);
        const std::vector<Formula>& pool = free_pool ? *free_pool : sat.base.facts;
        auto completions =
            free_vars.empty() ? std::vector<Substitution>{Substitution::identity()}
                              : enumerate_substitutions(free_vars, pool);
        for (const auto& extra : completions) {
          Substitution full = sigma;
          for (const auto& [v, img] : extra.mapping()) full.set(v, img);
          Formula concl = full(r.conclusion);
          if (sat.base.add(concl, DerivationStep{concl, ri, full, used})) changed = true;
          if (sat.base.facts.size() > max_facts) return sat;  // closed stays false
        }
      }
    }
    if (!changed) {
      sat.closed = true;
      return sat;
    }
  }
  return sat;  // round budget exhausted
}

std::optional<Derivation> extract_derivation(const FactBase& base, const Formula& goal) {
  auto it = base.index.find(goal);
  if (it == base.index.end()) return std::nullopt;
  Derivation d;
  std::vector<int> stack{it->second};
  // collect needed steps, then emit in derivation (index) order
  std::vector<bool> needed(base.facts.size(), false);
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    if (needed[i]) continue;
    needed[i] = true;
    for (const auto& p : base.steps[i].used) stack.push_back(base.index.at(p));
  }
  for (std::size_t i = 0; i < base.facts.size(); ++i)
    if (needed[i]) d.steps.push_back(base.steps[i]);
  return d;
}

}  // namespace

bool replay_derivation(const LogicPresentation& l, const std::vector<Formula>& premises,
                       const Formula& goal, const Derivation& d, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  std::unordered_set<Formula, FormulaHash> have(premises.begin(), premises.end());
  std::unordered_set<Formula, FormulaHash> derived;
  for (const auto& step : d.steps) {
    if (step.rule == -1) {
      if (!have.count(step.derived)) return fail("claimed premise is not among the premises");
      derived.insert(step.derived);
      continue;
    }
    if (step.rule < 0 || step.rule >= static_cast<int>(l.rules.size()))
      return fail("rule index out of range");
    const Rule& r = l.rules[step.rule];
    if (step.used.size() != r.premises.size()) return fail("wrong premise count for rule");
    for (std::size_t i = 0; i < r.premises.size(); ++i) {
      if (step.subst(r.premises[i]) != step.used[i])
        return fail("premise does not match rule instance");
      if (!derived.count(step.used[i])) return fail("premise used before being derived");
    }
    if (step.subst(r.conclusion) != step.derived) return fail("conclusion mismatch");
    derived.insert(step.derived);
  }
  if (!derived.count(goal)) return fail("derivation does not reach the goal");
  return true;
}

namespace {

MatchSaturation run_matching(const LogicPresentation& l, const std::vector<Formula>& premises) {
  std::vector<Formula> pool;
  const std::vector<Formula>* pool_ptr = nullptr;
  if (l.constants_only()) {
    pool = enumerate_formulas(l.sig, l.vars, 0);
    pool_ptr = &pool;
  }
  return saturate_matching(l, premises, pool_ptr, /*max_facts=*/200000, l.bounds.max_iterations);
}

}  // namespace

Verdict derive(const LogicPresentation& l, const std::vector<Formula>& premises,
               const Formula& goal) {
  l.validate();
  for (const auto& f : premises) validate_formula(f, l.sig, l.vars);
  validate_formula(goal, l.sig, l.vars);

  bool exact = l.constants_only() || rules_nondeepening(l);
  auto sat = run_matching(l, premises);

  if (auto d = extract_derivation(sat.base, goal)) return Verdict::yes(std::move(*d));
  if (sat.closed && exact) return Verdict::no_exhaustive();
  if (!sat.closed) return Verdict::unknown("saturation budget exhausted (max_iterations/fact cap)");
  return Verdict::unknown("fact space not provably finite; fixpoint only covers explored depth");
}

bool SaturationResult::contains(const Formula& f) const {
  return std::find(facts.begin(), facts.end(), f) != facts.end();
}

SaturationResult saturate(const LogicPresentation& l, const std::vector<Formula>& premises) {
  l.validate();
  for (const auto& f : premises) validate_formula(f, l.sig, l.vars);
  auto sat = run_matching(l, premises);
  SaturationResult out;
  out.facts = std::move(sat.base.facts);
  out.closed = sat.closed;
  out.exhaustive = sat.closed && (l.constants_only() || rules_nondeepening(l));
  return out;
}

std::vector<Formula> theory_of(const LogicPresentation& l, const std::vector<Formula>& gamma) {
  auto u = make_universe(l);
  if (!u->exact)
    throw std::invalid_argument("theory_of needs an exact universe; use membership queries");
  auto inst = ground_instances(l, *u);
  Mask m = saturate_mask(inst, u->mask_of(gamma));
  return u->unmask(m);
}

bool is_theory(const LogicPresentation& l, const Universe& u, Mask t) {
  auto inst = ground_instances(l, u);
  for (const auto& gi : inst)
    if (is_subset(gi.premises, t) && !bit(t, gi.conclusion)) return false;
  return true;
}

SetOperator as_closure_operator(const LogicPresentation& l, std::shared_ptr<const Universe> u) {
  if (!u) u = make_universe(l);
  if (!u->exact) throw std::invalid_argument("closure operator needs an exact universe");
  auto inst = std::make_shared<std::vector<GroundInstance>>(ground_instances(l, *u));
  return SetOperator(u->as_carrier(),
                     [inst](Mask s) { return saturate_mask(*inst, s); });
}

ConsequenceRelation kary_part_of_logic(const LogicPresentation& l, ArityBound bound) {
  ConsequenceRelation rel;
  rel.description = bound.is_omega() ? "derivability" : std::to_string(bound.n) + "-ary part";
  rel.arity = bound;
  rel.query = [l, bound](const std::vector<Formula>& gamma_in, const Formula& phi) -> Verdict {
    if (bound.is_omega()) return derive(l, gamma_in, phi);
    std::vector<Formula> gamma;
    for (const auto& f : gamma_in)
      if (std::find(gamma.begin(), gamma.end(), f) == gamma.end()) gamma.push_back(f);
    if (static_cast<int>(gamma.size()) > 20)
      return Verdict::unknown("premise set too large for sub-premise enumeration");
    bool saw_unknown = false;
    int n = static_cast<int>(gamma.size());
    for (Mask sub = 0; sub < (Mask{1} << n); ++sub) {
      if (popcount(sub) >= bound.n) continue;
      std::vector<Formula> g;
      for (int i = 0; i < n; ++i)
        if (bit(sub, i)) g.push_back(gamma[i]);
      Verdict v = derive(l, g, phi);
      if (v.truth == Truth::yes) return v;
      if (v.truth == Truth::unknown) saw_unknown = true;
    }
    if (saw_unknown) return Verdict::unknown("some sub-premise query hit bounds");
    return Verdict::no_exhaustive();
  };
  return rel;
}

RelationTable kary_table(const RelationTable& t, ArityBound bound) {
  if (bound.is_omega()) return t;
  int n = t.size();
  std::vector<Mask> f(t.derivable.size(), 0);
  for (Mask s = 0; s < f.size(); ++s)
    if (popcount(s) < bound.n) f[s] = t.derivable[s];
  RelationTable out{t.u, subset_or_transform(std::move(f), n)};
  return out;
}

bool table_subset(const RelationTable& a, const RelationTable& b) {
  for (Mask s = 0; s < a.derivable.size(); ++s)
    if (!is_subset(a.derivable[s], b.derivable[s])) return false;
  return true;
}

RelationTable reflexive_monotone_table(std::shared_ptr<const Universe> u) {
  RelationTable t{u, std::vector<Mask>(std::size_t{1} << u->size())};
  for (Mask s = 0; s < t.derivable.size(); ++s) t.derivable[s] = s;
  return t;
}

std::vector<std::vector<int>> universe_endomorphisms(const Universe& u) {
  std::vector<std::vector<int>> out;
  std::vector<int> var_ids(u.vars.size());
  for (int i = 0; i < u.vars.size(); ++i) var_ids[i] = i;
  std::unordered_map<Formula, int, FormulaHash> index;
  for (int i = 0; i < u.size(); ++i) index.emplace(u.formulas[i], i);
  for (const auto& sigma : enumerate_substitutions(var_ids, u.formulas)) {
    std::vector<int> img(u.size());
    for (int i = 0; i < u.size(); ++i) {
      auto it = index.find(sigma(u.formulas[i]));
      img[i] = it == index.end() ? -1 : it->second;
    }
    out.push_back(std::move(img));
  }
  return out;
}

StructuralityReport structurality_check(const RelationTable& t) {
  StructuralityReport rep;
  auto endos = universe_endomorphisms(*t.u);
  int n = t.size();
  for (const auto& img : endos) {
    for (Mask gamma = 0; gamma < t.derivable.size(); ++gamma) {
      Mask sg = 0;
      bool in_range = true;
      for (int i = 0; i < n && in_range; ++i)
        if (bit(gamma, i)) {
          if (img[i] < 0)
            in_range = false;
          else
            sg |= Mask{1} << img[i];
        }
      if (!in_range) continue;
      Mask cons = t.derivable[gamma];
      for (int phi = 0; phi < n; ++phi)
        if (bit(cons, phi) && img[phi] >= 0 && !t.holds(sg, img[phi])) {
          rep.structural = false;
          rep.subst = img;
          rep.gamma = gamma;
          rep.phi = phi;
          return rep;
        }
    }
  }
  return rep;
}

int arity_profile(const RelationTable& t) {
  for (int n = 1; n <= t.size() + 1; ++n)
    if (kary_table(t, ArityBound::finite(n)) == t) return n;
  return t.size() + 1;  // unreachable
}

RelationTable structural_closure(const RelationTable& t) {
  int n = t.size();
  auto endos = universe_endomorphisms(*t.u);
  std::vector<Mask> g(t.derivable.size(), 0);
  for (const auto& img : endos) {
    for (Mask gamma = 0; gamma < t.derivable.size(); ++gamma) {
      Mask sg = 0;
      bool in_range = true;
      for (int i = 0; i < n && in_range; ++i)
        if (bit(gamma, i)) {
          if (img[i] < 0)
            in_range = false;
          else
            sg |= Mask{1} << img[i];
        }
      if (!in_range) continue;
      Mask image = 0;
      for (int phi = 0; phi < n; ++phi)
        if (bit(t.derivable[gamma], phi) && img[phi] >= 0) image |= Mask{1} << img[phi];
      g[sg] |= image;
    }
  }
  auto sc = subset_or_transform(std::move(g), n);
  for (Mask s = 0; s < sc.size(); ++s) sc[s] |= s;  // reflexive pairs
  return RelationTable{t.u, std::move(sc)};
}

std::vector<int> universe_embedding(const Universe& small, const Universe& big) {
  std::vector<int> emb(small.size());
  for (int i = 0; i < small.size(); ++i) {
    // variable indices agree because the small variable list is a prefix
    emb[i] = big.find(small.formulas[i]);
    if (emb[i] < 0) throw std::invalid_argument("sub-universe formula missing above");
  }
  return emb;
}

RelationTable restrict_table(const RelationTable& big, std::shared_ptr<const Universe> small) {
  auto emb = universe_embedding(*small, *big.u);
  RelationTable out{small, std::vector<Mask>(std::size_t{1} << small->size())};
  for (Mask s = 0; s < out.derivable.size(); ++s) {
    Mask bs = 0;
    for (int i = 0; i < small->size(); ++i)
      if (bit(s, i)) bs |= Mask{1} << emb[i];
    Mask cons = big.derivable[bs];
    Mask r = 0;
    for (int i = 0; i < small->size(); ++i)
      if (bit(cons, emb[i])) r |= Mask{1} << i;
    out.derivable[s] = r;
  }
  return out;
}

ConservativityReport is_conservative_extension(const RelationTable& small,
                                               const RelationTable& big) {
  ConservativityReport rep;
  auto restricted = restrict_table(big, small.u);
  for (Mask s = 0; s < small.derivable.size(); ++s) {
    Mask a = small.derivable[s];
    Mask b = restricted.derivable[s];
    if (a == b) continue;
    rep.conservative = false;
    for (int i = 0; i < small.size(); ++i)
      if (bit(a, i) != bit(b, i)) {
        rep.gamma = small.u->unmask(s);
        rep.phi = small.u->formulas[i];
        rep.direction = bit(a, i) ? "holds below, fails above" : "holds above, fails below";
        return rep;
      }
  }
  return rep;
}

// --- presentation text format --------------------------------------------

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

}  // namespace

LogicPresentation parse_presentation(const std::string& text) {
  std::vector<Connective> conns;
  std::vector<std::string> vars;
  SearchBounds bounds;
  std::vector<std::pair<int, std::string>> rule_lines;  // line no, text after "rule"

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string trimmed = line;
    auto hash = trimmed.find('#');
    if (hash != std::string::npos) trimmed.erase(hash);
    auto words = split_ws(trimmed);
    if (words.empty()) continue;
    const std::string& head = words[0];
    if (head == "sig") {
      for (std::size_t i = 1; i < words.size(); ++i) {
        auto colon = words[i].find(':');
        if (colon == std::string::npos)
          throw std::invalid_argument("line " + std::to_string(lineno) +
                                      ": sig entries look like name:arity");
        conns.push_back({words[i].substr(0, colon), std::stoi(words[i].substr(colon + 1))});
      }
    } else if (head == "vars") {
      vars.insert(vars.end(), words.begin() + 1, words.end());
    } else if (head == "bounds") {
      for (std::size_t i = 1; i < words.size(); ++i) {
        auto eq = words[i].find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("line " + std::to_string(lineno) + ": bounds take key=value");
        std::string key = words[i].substr(0, eq);
        int val = std::stoi(words[i].substr(eq + 1));
        if (key == "depth")
          bounds.max_depth = val;
        else if (key == "iters")
          bounds.max_iterations = val;
        else
          throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown bound " + key);
      }
    } else if (head == "rule") {
      auto pos = trimmed.find("rule");
      rule_lines.emplace_back(lineno, trimmed.substr(pos + 4));
    } else {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown directive " + head);
    }
  }

  LogicPresentation l;
  l.sig = Signature(conns);
  l.vars = VarSet(vars);
  l.bounds = bounds;
  for (auto& [ln, body] : rule_lines) {
    auto arrow = body.find("=>");
    if (arrow == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(ln) + ": rule needs =>");
    std::string prem = body.substr(0, arrow);
    std::string concl = body.substr(arrow + 2);
    Rule r;
    // premises: comma separated, possibly empty
    std::string cur;
    int depth = 0;
    auto flush = [&]() {
      std::string s = cur;
      cur.clear();
      auto ws = split_ws(s);
      if (ws.empty()) return;
      std::string joined;
      for (auto& w : ws) joined += w;
      r.premises.push_back(parse_formula(joined, l.sig, l.vars));
    };
    for (char c : prem) {
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (c == ',' && depth == 0) {
        flush();
        continue;
      }
      cur += c;
    }
    flush();
    try {
      r.conclusion = parse_formula(concl, l.sig, l.vars);
    } catch (const ParseError& e) {
      throw std::invalid_argument("line " + std::to_string(ln) + ": " + e.what());
    }
    l.rules.push_back(std::move(r));
  }
  l.validate();
  return l;
}

LogicPresentation load_presentation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_presentation(ss.str());
}

std::string format_presentation(const LogicPresentation& l) {
  std::ostringstream out;
  out << "sig";
  for (const auto& c : l.sig.connectives()) out << ' ' << c.name << ':' << c.arity;
  out << "\nvars";
  for (const auto& v : l.vars.names()) out << ' ' << v;
  out << '\n';
  for (const auto& r : l.rules) {
    out << "rule ";
    for (std::size_t i = 0; i < r.premises.size(); ++i) {
      if (i) out << ", ";
      out << format_formula(r.premises[i], l.sig, l.vars);
    }
    out << (r.premises.empty() ? "=> " : " => ") << format_formula(r.conclusion, l.sig, l.vars)
        << '\n';
  }
  out << "bounds depth=" << l.bounds.max_depth << " iters=" << l.bounds.max_iterations << '\n';
  return out.str();
}

// --- worked instances -----------------------------------------------------

LogicPresentation preset_staged_union() {
  return parse_presentation(
      "sig m11:0 m12:0 m21:0 m22:0 i1:0 i2:0 star:0\n"
      "vars x\n"
      "rule m11, m12 => i1\n"
      "rule m21, m22 => i2\n"
      "rule i1, i2 => star\n");
}

LogicPresentation preset_single_rule() {
  return parse_presentation(
      "sig a:0\n"
      "vars x\n"
      "rule x => a\n");
}

LogicPresentation preset_two_stage() {
  return parse_presentation(
      "sig p:0 q:0 i:0 s:0\n"
      "vars x\n"
      "rule p, q => i\n"
      "rule i => s\n");
}

LogicPresentation preset_axiom_mix() {
  return parse_presentation(
      "sig a:0 b:0 c:0\n"
      "vars x\n"
      "rule => a\n"
      "rule x, a => b\n"
      "rule b, c => a\n");
}

LogicPresentation preset_no_rules() {
  return parse_presentation(
      "sig a:0 b:0\n"
      "vars x\n");
}

LogicPresentation preset_two_var() {
  return parse_presentation(
      "sig a:0 b:0\n"
      "vars x1 x2\n"
      "rule x1, x2 => a\n"
      "rule a, x1 => b\n");
}

}  // namespace conseq
