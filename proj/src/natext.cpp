#include "conseq/natext.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace conseq {

namespace {

std::vector<Formula> dedupe(const std::vector<Formula>& fs) {
  std::vector<Formula> out;
  for (const auto& f : fs)
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  return out;
}

void collect_subformulas(const Formula& f, std::vector<Formula>& out) {
  if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  for (const auto& a : f.args()) collect_subformulas(a, out);
}

int max_depth_of(const std::vector<Formula>& gamma, const Formula& goal) {
  int d = goal.depth();
  for (const auto& f : gamma) d = std::max(d, f.depth());
  return d;
}

bool base_negatives_exact(const LogicPresentation& l) {
  return l.constants_only() || rules_nondeepening(l);
}

std::string join_formulas(const std::vector<Formula>& fs, const Signature& sig,
                          const VarSet& vars) {
  std::string out;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (i) out += ", ";
    out += format_formula(fs[i], sig, vars);
  }
  return out;
}

}  // namespace

ExtensionProblem::ExtensionProblem(LogicPresentation base, std::vector<std::string> extra_vars)
    : base_(std::move(base)), extra_(std::move(extra_vars)) {
  base_.validate();
  over_y_ = base_.with_extra_vars(extra_);
}

std::shared_ptr<const Universe> ExtensionProblem::ux() const {
  if (!ux_) ux_ = make_universe(base_);
  return ux_;
}

std::shared_ptr<const Universe> ExtensionProblem::uy() const {
  if (!uy_) uy_ = make_universe(over_y_);
  return uy_;
}

// --- per-query constructions ----------------------------------------------

Verdict los_suszko(const ExtensionProblem& p, const std::vector<Formula>& gamma,
                   const Formula& goal) {
  const auto& ly = p.over_y();
  int ny = ly.vars.size();
  int nx = p.x_size();
  if (ny > 8) return Verdict::unknown("variable permutation scan caps at 8 variables");

  std::vector<int> perm(ny);
  std::iota(perm.begin(), perm.end(), 0);
  bool saw_unknown = false;
  do {
    Substitution rename;
    for (int i = 0; i < ny; ++i) rename.set(i, Formula::variable(perm[i]));
    Formula rgoal = rename(goal);
    if (!rgoal.uses_only(nx)) continue;
    std::vector<Formula> rgamma;
    for (const auto& g : gamma) {
      Formula rg = rename(g);
      if (rg.uses_only(nx)) rgamma.push_back(rg);
    }
    Verdict v = derive(p.base(), rgamma, rgoal);
    if (v.truth == Truth::yes) {
      Verdict out = Verdict::yes(std::move(*v.derivation));
      std::ostringstream note;
      note << "via permutation";
      for (int i = 0; i < ny; ++i)
        if (perm[i] != i) note << ' ' << ly.vars.at(i) << "->" << ly.vars.at(perm[i]);
      out.note = note.str();
      return out;
    }
    if (v.truth == Truth::unknown) saw_unknown = true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (saw_unknown) return Verdict::unknown("base derivability unresolved for some permutation");
  return Verdict::no_exhaustive();
}

Verdict shoesmith_smiley(const ExtensionProblem& p, const std::vector<Formula>& gamma,
                         const Formula& goal) {
  const auto& base = p.base();
  int dmax = max_depth_of(gamma, goal);
  auto patterns = enumerate_formulas(base.sig, base.vars, dmax);
  if (patterns.size() > 5000) return Verdict::unknown("pattern space too large");

  std::vector<Formula> images;
  collect_subformulas(goal, images);
  for (const auto& g : gamma) collect_subformulas(g, images);

  std::vector<int> xvars(base.vars.size());
  std::iota(xvars.begin(), xvars.end(), 0);
  auto gamma_set = dedupe(gamma);
  bool exact = base_negatives_exact(base);
  bool saw_unknown = false;

  for (const auto& v : enumerate_substitutions(xvars, images)) {
    std::vector<Formula> gamma_pre;
    std::vector<Formula> goal_pre;
    for (const auto& psi : patterns) {
      Formula img = v(psi);
      if (std::find(gamma_set.begin(), gamma_set.end(), img) != gamma_set.end())
        gamma_pre.push_back(psi);
      if (img == goal) goal_pre.push_back(psi);
    }
    if (goal_pre.empty()) continue;
    auto sat = saturate(base, gamma_pre);
    if (!sat.closed) saw_unknown = true;
    for (const auto& psi : goal_pre)
      if (sat.contains(psi)) {
        Verdict out{Truth::yes, true, std::nullopt, {}};
        std::ostringstream note;
        note << "via substitution";
        for (const auto& [var, img] : v.mapping())
          note << ' ' << base.vars.at(var) << ":=" << format_formula(img, base.sig, p.over_y().vars);
        note << " and pattern " << format_formula(psi, base.sig, base.vars);
        out.note = note.str();
        Verdict d = derive(base, gamma_pre, psi);
        if (d.truth == Truth::yes) out.derivation = d.derivation;
        return out;
      }
  }
  if (saw_unknown || !exact)
    return Verdict::unknown("pattern search truncated by saturation bounds");
  return Verdict::no_exhaustive();
}

Verdict minus_query(const ExtensionProblem& p, const std::vector<Formula>& gamma,
                    const Formula& goal) {
  return derive(p.over_y(), gamma, goal);
}

Verdict plus_query(const ExtensionProblem& p, const std::vector<Formula>& gamma,
                   const Formula& goal) {
  const auto& base = p.base();
  const auto& ly = p.over_y();
  int ny = ly.vars.size();

  int depth = base.constants_only() ? 0 : base.bounds.max_depth;
  auto targets = enumerate_formulas(base.sig, base.vars, depth);
  bool exhaustible = base.constants_only();

  // mixed-radix scan over sigma: Y -> Fm(X), capped so non-exhaustible
  // signatures degrade to a bounded sample
  long cap = 200000;
  double space = 1;
  for (int i = 0; i < ny; ++i) space *= static_cast<double>(targets.size());
  bool truncated = space > static_cast<double>(cap);

  bool saw_unknown = false;
  std::vector<std::size_t> idx(ny, 0);
  long used = 0;
  while (used++ < cap) {
    Substitution sigma;
    for (int i = 0; i < ny; ++i) sigma.set(i, targets[idx[i]]);
    std::vector<Formula> sg;
    sg.reserve(gamma.size());
    for (const auto& g : gamma) sg.push_back(sigma(g));
    Verdict v = derive(base, sg, sigma(goal));
    if (v.truth == Truth::no && v.exhaustive) {
      Verdict out = Verdict::no_exhaustive();
      std::ostringstream note;
      note << "counter-substitution";
      for (const auto& [var, img] : sigma.mapping())
        note << ' ' << ly.vars.at(var) << ":=" << format_formula(img, base.sig, base.vars);
      out.note = note.str();
      return out;
    }
    if (v.truth != Truth::yes) saw_unknown = true;
    int j = ny - 1;
    while (j >= 0 && ++idx[j] == targets.size()) idx[j--] = 0;
    if (j < 0) break;
  }
  if (used > cap) truncated = true;
  if (saw_unknown) return Verdict::unknown("some instance query unresolved");
  if (!exhaustible || truncated)
    return Verdict::unknown("every scanned substitution derives, but the space is not exhaustible");
  return {Truth::yes, true, std::nullopt, "all substitutions into the base language derive"};
}

Verdict plus_kary_query(const ExtensionProblem& p, ArityBound bound,
                        const std::vector<Formula>& gamma, const Formula& goal) {
  if (bound.is_omega()) return plus_query(p, gamma, goal);
  auto g = dedupe(gamma);
  int n = static_cast<int>(g.size());
  if (n > 20) return Verdict::unknown("premise set too large for sub-premise enumeration");
  bool saw_unknown = false;
  for (Mask sub = 0; sub < (Mask{1} << n); ++sub) {
    if (popcount(sub) >= bound.n) continue;
    std::vector<Formula> part;
    for (int i = 0; i < n; ++i)
      if (bit(sub, i)) part.push_back(g[i]);
    Verdict v = plus_query(p, part, goal);
    if (v.truth == Truth::yes) return v;
    if (v.truth == Truth::unknown) saw_unknown = true;
  }
  if (saw_unknown) return Verdict::unknown("some sub-premise query unresolved");
  return Verdict::no_exhaustive();
}

ExtKind ext_kind_from_string(const std::string& s) {
  if (s == "ls") return ExtKind::ls;
  if (s == "ss") return ExtKind::ss;
  if (s == "minus") return ExtKind::minus;
  if (s == "plus") return ExtKind::plus;
  throw std::invalid_argument("unknown extension method: " + s);
}

std::string to_string(ExtKind k) {
  switch (k) {
    case ExtKind::ls: return "ls";
    case ExtKind::ss: return "ss";
    case ExtKind::minus: return "minus";
    case ExtKind::plus: return "plus";
  }
  return {};
}

ExtensionRelation make_extension(const ExtensionProblem& p, ExtKind kind, ArityBound arity,
                                 bool want_table) {
  ExtensionRelation out;
  out.kind = kind;
  out.arity = arity;
  out.rel.description = to_string(kind) + " extension";
  out.rel.arity = arity;
  auto pp = std::make_shared<ExtensionProblem>(p);
  switch (kind) {
    case ExtKind::ls:
      out.rel.query = [pp](const std::vector<Formula>& g, const Formula& f) {
        return los_suszko(*pp, g, f);
      };
      break;
    case ExtKind::ss:
      out.rel.query = [pp](const std::vector<Formula>& g, const Formula& f) {
        return shoesmith_smiley(*pp, g, f);
      };
      break;
    case ExtKind::minus:
      out.rel.query = [pp](const std::vector<Formula>& g, const Formula& f) {
        return minus_query(*pp, g, f);
      };
      break;
    case ExtKind::plus:
      out.rel.query = [pp, arity](const std::vector<Formula>& g, const Formula& f) {
        return plus_kary_query(*pp, arity, g, f);
      };
      break;
  }
  if (want_table && p.exact()) {
    switch (kind) {
      case ExtKind::ls: out.table = ls_table(p); break;
      case ExtKind::ss: out.table = ss_table(p); break;
      case ExtKind::minus: out.table = minus_table(p); break;
      case ExtKind::plus: out.table = kary_table(plus_table(p), arity); break;
    }
  }
  return out;
}

// --- whole-relation tables -------------------------------------------------

namespace {

void require_exact(const ExtensionProblem& p, const char* what) {
  if (!p.exact())
    throw std::invalid_argument(std::string(what) + " needs a constants-only signature");
}

// uy index -> renamed uy index under a variable permutation
std::vector<int> perm_index_map(const Universe& uy, const std::vector<int>& perm) {
  std::vector<int> out(uy.size());
  for (int i = 0; i < uy.size(); ++i) {
    const Formula& f = uy.formulas[i];
    out[i] = f.is_variable() ? uy.find(Formula::variable(perm[f.var()])) : i;
  }
  return out;
}

}  // namespace

RelationTable ls_table(const ExtensionProblem& p) {
  require_exact(p, "ls table");
  auto ux = p.ux();
  auto uy = p.uy();
  int nu = uy->size();
  if (nu > 20) throw std::invalid_argument("universe too large for tables");
  auto base_ct = closure_table(p.base(), ux);
  int nx = p.x_size();

  // uy <-> ux index translation for formulas over X
  std::vector<int> to_ux(nu, -1);
  for (int i = 0; i < nu; ++i)
    if (uy->formulas[i].uses_only(nx)) to_ux[i] = ux->find(uy->formulas[i]);

  int ny = p.over_y().vars.size();
  std::vector<int> perm(ny);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> perm_maps;
  do {
    perm_maps.push_back(perm_index_map(*uy, perm));
  } while (std::next_permutation(perm.begin(), perm.end()));

  RelationTable t{uy, std::vector<Mask>(std::size_t{1} << nu, 0)};
  for (Mask gamma = 0; gamma < t.derivable.size(); ++gamma) {
    Mask out = 0;
    for (const auto& pm : perm_maps) {
      Mask sx = 0;
      for (int i = 0; i < nu; ++i)
        if (bit(gamma, i) && to_ux[pm[i]] >= 0) sx |= Mask{1} << to_ux[pm[i]];
      Mask cons = base_ct.derivable[sx];
      for (int phi = 0; phi < nu; ++phi)
        if (to_ux[pm[phi]] >= 0 && bit(cons, to_ux[pm[phi]])) out |= Mask{1} << phi;
    }
    t.derivable[gamma] = out;
  }
  return t;
}

RelationTable ss_table(const ExtensionProblem& p) {
  require_exact(p, "ss table");
  auto ux = p.ux();
  auto uy = p.uy();
  int nu = uy->size();
  if (nu > 20) throw std::invalid_argument("universe too large for tables");
  auto base_ct = closure_table(p.base(), ux);
  int nx = p.x_size();

  // v: X-variables -> uy formulas, acting on X-patterns
  std::vector<int> const_to_uy(ux->size(), -1);
  for (int i = 0; i < ux->size(); ++i)
    if (!ux->formulas[i].is_variable()) const_to_uy[i] = uy->find(ux->formulas[i]);

  int total_v = 1;
  for (int i = 0; i < nx; ++i) total_v *= nu;

  RelationTable t{uy, std::vector<Mask>(std::size_t{1} << nu, 0)};
  std::vector<int> vmap(nx);
  for (int code = 0; code < total_v; ++code) {
    int c = code;
    for (int i = 0; i < nx; ++i) {
      vmap[i] = c % nu;
      c /= nu;
    }
    // pattern image in uy
    std::vector<int> vhat(ux->size());
    for (int i = 0; i < ux->size(); ++i) {
      const Formula& f = ux->formulas[i];
      vhat[i] = f.is_variable() ? vmap[f.var()] : const_to_uy[i];
    }
    for (Mask gamma = 0; gamma < t.derivable.size(); ++gamma) {
      Mask pre = 0;
      for (int i = 0; i < ux->size(); ++i)
        if (bit(gamma, vhat[i])) pre |= Mask{1} << i;
      Mask cons = base_ct.derivable[pre];
      Mask img = 0;
      for (int i = 0; i < ux->size(); ++i)
        if (bit(cons, i)) img |= Mask{1} << vhat[i];
      t.derivable[gamma] |= img;
    }
  }
  return t;
}

RelationTable hull_table(const RelationTable& t) {
  RelationTable out{t.u, t.derivable};
  int n = t.size();
  for (Mask s = 0; s < out.derivable.size(); ++s) {
    Mask cur = s;
    for (int i = 0; i <= n; ++i) {
      Mask next = t.derivable[cur] | cur;
      if (next == cur) break;
      cur = next;
    }
    out.derivable[s] = cur;
  }
  return out;
}

SetOperator ss_operator(const ExtensionProblem& p) {
  auto t = std::make_shared<RelationTable>(ss_table(p));
  return SetOperator(t->u->as_carrier(), [t](Mask s) { return t->derivable[s] | s; });
}

SetOperator ss_operator_on(const ExtensionProblem& p, const std::vector<Formula>& probe) {
  auto carrier = std::make_shared<Carrier>();
  const auto& ly = p.over_y();
  for (const auto& f : probe) carrier->labels.push_back(format_formula(f, ly.sig, ly.vars));
  auto pp = std::make_shared<ExtensionProblem>(p);
  auto formulas = std::make_shared<std::vector<Formula>>(probe);
  return SetOperator(carrier, [pp, formulas](Mask s) {
    std::vector<Formula> gamma;
    for (std::size_t i = 0; i < formulas->size(); ++i)
      if (bit(s, static_cast<int>(i))) gamma.push_back((*formulas)[i]);
    Mask out = s;
    for (std::size_t i = 0; i < formulas->size(); ++i)
      if (!bit(s, static_cast<int>(i)) &&
          shoesmith_smiley(*pp, gamma, (*formulas)[i]).truth == Truth::yes)
        out |= Mask{1} << i;
    return out;
  });
}

RelationTable minus_table(const ExtensionProblem& p, Exec exec) {
  require_exact(p, "minus table");
  auto by_rules = closure_table(p.over_y(), p.uy(), exec);
  auto by_hull = hull_table(ss_table(p));
  if (!(by_rules == by_hull))
    throw std::logic_error(
        "internal: rule saturation over Y and hull of the substitution-image operator disagree");
  return by_rules;
}

RelationTable plus_table(const ExtensionProblem& p, Exec exec) {
  require_exact(p, "plus table");
  auto ux = p.ux();
  auto uy = p.uy();
  int nu = uy->size();
  if (nu > 20) throw std::invalid_argument("universe too large for tables");
  auto base_ct = closure_table(p.base(), ux, exec);
  int ny = p.over_y().vars.size();
  int nxu = ux->size();

  // all sigma: Y-variables -> Fm(X), acting on uy formulas
  long total = 1;
  for (int i = 0; i < ny; ++i) total *= nxu;
  std::vector<std::vector<int>> sigma_maps;
  sigma_maps.reserve(total);
  std::vector<int> to_ux(nu, -1);
  for (int i = 0; i < nu; ++i)
    if (!uy->formulas[i].is_variable()) to_ux[i] = ux->find(uy->formulas[i]);
  for (long code = 0; code < total; ++code) {
    long c = code;
    std::vector<int> smap(ny);
    for (int i = 0; i < ny; ++i) {
      smap[i] = static_cast<int>(c % nxu);
      c /= nxu;
    }
    std::vector<int> shat(nu);
    for (int i = 0; i < nu; ++i) {
      const Formula& f = uy->formulas[i];
      shat[i] = f.is_variable() ? smap[f.var()] : to_ux[i];
    }
    sigma_maps.push_back(std::move(shat));
  }

  RelationTable t{uy, std::vector<Mask>(std::size_t{1} << nu, 0)};
  std::int64_t masks = static_cast<std::int64_t>(t.derivable.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
#endif
  for (std::int64_t gamma = 0; gamma < masks; ++gamma) {
    Mask keep = full_mask(nu);
    for (const auto& shat : sigma_maps) {
      Mask sx = 0;
      for (int i = 0; i < nu; ++i)
        if (bit(static_cast<Mask>(gamma), i)) sx |= Mask{1} << shat[i];
      Mask cons = base_ct.derivable[sx];
      Mask ok = 0;
      for (int i = 0; i < nu; ++i)
        if (bit(cons, shat[i])) ok |= Mask{1} << i;
      keep &= ok;
      if (!keep) break;
    }
    t.derivable[gamma] = keep;
  }
  return t;
}

int base_arity_profile(const ExtensionProblem& p) {
  return arity_profile(closure_table(p.base(), p.ux()));
}

namespace {

std::string first_difference(const RelationTable& a, const RelationTable& b,
                             const std::string& what) {
  for (Mask s = 0; s < a.derivable.size(); ++s) {
    Mask d = a.derivable[s] ^ b.derivable[s];
    if (!d) continue;
    int phi = std::countr_zero(d);
    const auto& u = *a.u;
    return what + " differ at {" + join_formulas(u.unmask(s), u.sig, u.vars) + "} => " +
           format_formula(u.formulas[phi], u.sig, u.vars);
  }
  return {};
}

std::string first_noninclusion(const RelationTable& a, const RelationTable& b,
                               const std::string& what) {
  for (Mask s = 0; s < a.derivable.size(); ++s) {
    Mask extra = a.derivable[s] & ~b.derivable[s];
    if (!extra) continue;
    int phi = std::countr_zero(extra);
    const auto& u = *a.u;
    return what + " fails at {" + join_formulas(u.unmask(s), u.sig, u.vars) + "} => " +
           format_formula(u.formulas[phi], u.sig, u.vars);
  }
  return {};
}

}  // namespace

ChainReport check_chain(const ExtensionProblem& p, Exec exec) {
  require_exact(p, "chain check");
  ChainReport rep;
  auto ls = ls_table(p);
  auto ss = ss_table(p);
  auto minus = minus_table(p, exec);
  rep.plus_arity = base_arity_profile(p);
  auto plus_n = kary_table(plus_table(p, exec), ArityBound::finite(rep.plus_arity));

  rep.ls_in_ss = table_subset(ls, ss);
  if (!rep.ls_in_ss) rep.failures.push_back(first_noninclusion(ls, ss, "ls within ss"));
  rep.ss_in_minus = table_subset(ss, minus);
  if (!rep.ss_in_minus) rep.failures.push_back(first_noninclusion(ss, minus, "ss within minus"));
  rep.minus_in_plus = table_subset(minus, plus_n);
  if (!rep.minus_in_plus)
    rep.failures.push_back(first_noninclusion(minus, plus_n, "minus within plus"));

  auto sc = structural_closure(ls);
  rep.ss_is_structural_closure_of_ls = sc == ss;
  if (!rep.ss_is_structural_closure_of_ls)
    rep.failures.push_back(first_difference(sc, ss, "structural closure of ls vs ss"));

  auto hull = hull_table(ss);
  rep.minus_is_hull_of_ss = hull == minus;
  if (!rep.minus_is_hull_of_ss)
    rep.failures.push_back(first_difference(hull, minus, "hull of ss vs minus"));
  return rep;
}

NatExtCheck is_natural_extension(const ExtensionProblem& p, const RelationTable& rel) {
  NatExtCheck out;
  auto base_ct = closure_table(p.base(), p.ux());
  auto cons = is_conservative_extension(base_ct, rel);
  out.conservative = cons.conservative;
  if (!cons.conservative)
    out.witness = "conservativity: {" + join_formulas(cons.gamma, p.base().sig, p.base().vars) +
                  "} => " + format_formula(cons.phi, p.base().sig, p.base().vars) + " " +
                  cons.direction;

  auto table = rel.derivable;
  SetOperator op(rel.u->as_carrier(), [table](Mask s) { return table[s]; });
  auto check = is_closure_operator(op, Exec::serial);
  out.closure_ok = check.ok();

  auto st = structurality_check(rel);
  out.structural = st.structural;

  out.base_arity = arity_profile(base_ct);
  out.rel_arity = arity_profile(rel);
  out.arity_matches = out.base_arity == out.rel_arity;
  return out;
}

namespace {

RelationTable table_from_family(std::shared_ptr<const Universe> u,
                                const std::vector<Mask>& closed) {
  int n = u->size();
  RelationTable t{u, std::vector<Mask>(std::size_t{1} << n)};
  Mask full = full_mask(n);
  for (Mask s = 0; s < t.derivable.size(); ++s) {
    Mask acc = full;
    for (Mask c : closed)
      if (is_subset(s, c)) acc &= c;
    t.derivable[s] = acc;
  }
  return t;
}

std::vector<Mask> closed_sets_of(const RelationTable& t) {
  std::vector<Mask> out;
  for (Mask s = 0; s < t.derivable.size(); ++s)
    if (t.derivable[s] == s) out.push_back(s);
  return out;
}

// cheap pre-check used inside the enumeration loops
bool conservative_over_base(const RelationTable& base_ct, const std::vector<Mask>& closed,
                            const std::vector<int>& emb, int nx_size) {
  // closure of every embedded subset, compared against the base closure
  for (Mask s = 0; s < base_ct.derivable.size(); ++s) {
    Mask sy = 0;
    for (int i = 0; i < nx_size; ++i)
      if (bit(s, i)) sy |= Mask{1} << emb[i];
    Mask acc = ~Mask{0};
    for (Mask c : closed)
      if (is_subset(sy, c)) acc &= c;
    // restrict back
    Mask back = 0;
    for (int i = 0; i < nx_size; ++i)
      if (bit(acc, emb[i])) back |= Mask{1} << i;
    if (back != base_ct.derivable[s]) return false;
  }
  return true;
}

}  // namespace

NatExtLattice enumerate_natural_extensions(const ExtensionProblem& p, Exec exec) {
  require_exact(p, "natural-extension enumeration");
  auto ux = p.ux();
  auto uy = p.uy();
  int nu = uy->size();
  NatExtLattice L;
  L.uy = uy;
  L.arity = base_arity_profile(p);
  auto base_ct = closure_table(p.base(), ux, exec);
  auto minus = minus_table(p, exec);
  auto plus_n = kary_table(plus_table(p, exec), ArityBound::finite(L.arity));
  auto emb = universe_embedding(*ux, *uy);

  std::vector<RelationTable> found;
  auto admit = [&](const std::vector<Mask>& closed) -> std::optional<RelationTable> {
    if (!conservative_over_base(base_ct, closed, emb, ux->size())) return std::nullopt;
    auto t = table_from_family(uy, closed);
    if (arity_profile(t) != L.arity) return std::nullopt;
    if (!structurality_check(t).structural) return std::nullopt;
    return t;
  };

  if (nu <= 5) {
    L.mode = "moore-scan";
    auto fams = moore_families(nu, exec);
    std::vector<char> keep(fams.size(), 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1024) if (exec == Exec::parallel)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(fams.size()); ++i) {
      std::vector<Mask> closed;
      for (int s = 0; s < (1 << nu); ++s)
        if ((fams[i] >> s) & 1) closed.push_back(static_cast<Mask>(s));
      if (admit(closed)) keep[i] = 1;
    }
    for (std::size_t i = 0; i < fams.size(); ++i)
      if (keep[i]) {
        std::vector<Mask> closed;
        for (int s = 0; s < (1 << nu); ++s)
          if ((fams[i] >> s) & 1) closed.push_back(static_cast<Mask>(s));
        found.push_back(*admit(closed));
      }
  } else {
    L.mode = "interval";
    auto th_minus = closed_sets_of(minus);
    auto th_plus = closed_sets_of(plus_n);
    std::vector<Mask> diff;
    for (Mask s : th_minus)
      if (!std::binary_search(th_plus.begin(), th_plus.end(), s)) diff.push_back(s);
    if (diff.size() > 22)
      throw std::invalid_argument("interval between the extreme extensions too large to scan");
    std::uint64_t subsets = std::uint64_t{1} << diff.size();
    std::vector<char> keep(subsets, 0);
    std::vector<RelationTable> tables(subsets);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64) if (exec == Exec::parallel)
#endif
    for (std::int64_t code = 0; code < static_cast<std::int64_t>(subsets); ++code) {
      std::vector<Mask> closed = th_plus;
      for (std::size_t j = 0; j < diff.size(); ++j)
        if ((code >> j) & 1) closed.push_back(diff[j]);
      std::sort(closed.begin(), closed.end());
      // intersection-closure check
      bool ok = true;
      for (std::size_t a = 0; a < closed.size() && ok; ++a)
        for (std::size_t b = a + 1; b < closed.size() && ok; ++b)
          if (!std::binary_search(closed.begin(), closed.end(), closed[a] & closed[b])) ok = false;
      if (!ok) continue;
      if (auto t = admit(closed)) {
        keep[code] = 1;
        tables[code] = std::move(*t);
      }
    }
    for (std::uint64_t code = 0; code < subsets; ++code)
      if (keep[code]) found.push_back(std::move(tables[code]));
  }

  // deterministic order: weaker relations first (fewer derivable pairs)
  auto strength = [](const RelationTable& t) {
    long total = 0;
    for (Mask m : t.derivable) total += popcount(m);
    return total;
  };
  std::stable_sort(found.begin(), found.end(), [&](const RelationTable& a, const RelationTable& b) {
    long sa = strength(a), sb = strength(b);
    if (sa != sb) return sa < sb;
    return a.derivable < b.derivable;
  });
  // dedupe identical tables (moore families are unique, but be safe)
  found.erase(std::unique(found.begin(), found.end(),
                          [](const RelationTable& a, const RelationTable& b) { return a == b; }),
              found.end());
  L.extensions = std::move(found);

  for (std::size_t i = 0; i < L.extensions.size(); ++i) {
    if (L.extensions[i] == minus) L.bottom = static_cast<int>(i);
    if (L.extensions[i] == plus_n) L.top = static_cast<int>(i);
  }

  std::size_t k = L.extensions.size();
  L.leq.assign(k, std::vector<bool>(k, false));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) L.leq[i][j] = table_subset(L.extensions[i], L.extensions[j]);

  auto find_index = [&](const RelationTable& t) -> int {
    for (std::size_t i = 0; i < k; ++i)
      if (L.extensions[i] == t) return static_cast<int>(i);
    return -1;
  };
  L.sup_of.assign(k, std::vector<int>(k, -1));
  L.glb_of.assign(k, std::vector<int>(k, -1));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      L.sup_of[i][j] = find_index(natext_sup({L.extensions[i], L.extensions[j]},
                                             ArityBound::finite(L.arity)));
      L.glb_of[i][j] = find_index(natext_glb({L.extensions[i], L.extensions[j]},
                                             ArityBound::finite(L.arity)));
    }
  return L;
}

bool NatExtLattice::closed_under_sup_and_glb() const {
  for (const auto& row : sup_of)
    for (int v : row)
      if (v < 0) return false;
  for (const auto& row : glb_of)
    for (int v : row)
      if (v < 0) return false;
  return true;
}

RelationTable natext_sup(const std::vector<RelationTable>& rels, ArityBound bound) {
  if (rels.empty()) throw std::invalid_argument("empty family");
  // sets closed under every member
  std::vector<Mask> common;
  for (Mask s = 0; s < rels.front().derivable.size(); ++s) {
    bool closed = true;
    for (const auto& r : rels)
      if (r.derivable[s] != s) {
        closed = false;
        break;
      }
    if (closed) common.push_back(s);
  }
  RelationTable c = table_from_family(rels.front().u, common);
  return kary_table(c, bound);
}

RelationTable natext_glb(const std::vector<RelationTable>& rels, ArityBound bound) {
  if (rels.empty()) throw std::invalid_argument("empty family");
  RelationTable t{rels.front().u, rels.front().derivable};
  for (std::size_t i = 1; i < rels.size(); ++i)
    for (Mask s = 0; s < t.derivable.size(); ++s) t.derivable[s] &= rels[i].derivable[s];
  return kary_table(t, bound);
}

// --- witnesses and search ---------------------------------------------------

namespace {

std::vector<std::string> split_top_level(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
      continue;
    }
    cur += c;
  }
  out.push_back(cur);
  // trim
  for (auto& w : out) {
    auto b = w.find_first_not_of(" \t");
    auto e = w.find_last_not_of(" \t");
    w = b == std::string::npos ? "" : w.substr(b, e - b + 1);
  }
  out.erase(std::remove(out.begin(), out.end(), std::string{}), out.end());
  return out;
}

std::vector<Formula> parse_formula_list(const std::vector<std::string>& strs,
                                        const LogicPresentation& l) {
  std::vector<Formula> out;
  for (const auto& s : strs) out.push_back(parse_formula(s, l.sig, l.vars));
  return out;
}

Substitution parse_subst(const std::string& spec, const LogicPresentation& l) {
  Substitution s;
  for (const auto& item : split_top_level(spec, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("substitution items look like v=term");
    std::string var = item.substr(0, eq);
    auto b = var.find_first_not_of(" \t");
    auto e = var.find_last_not_of(" \t");
    var = var.substr(b, e - b + 1);
    int vi = l.vars.index_of(var);
    if (vi < 0) throw std::invalid_argument("unknown variable in substitution: " + var);
    s.set(vi, parse_formula(item.substr(eq + 1), l.sig, l.vars));
  }
  return s;
}

bool certified(const Verdict& v, bool want_yes) {
  if (want_yes) return v.truth == Truth::yes;
  return v.truth == Truth::no && v.exhaustive;
}

}  // namespace

bool verify_witness(const WitnessRecord& w, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  ExtensionProblem p(w.base, w.extend_vars);
  const auto& ly = p.over_y();
  for (const auto& c : w.claims) {
    try {
      if (c.kind == "derive" || c.kind == "ls" || c.kind == "ss" || c.kind == "minus" ||
          c.kind == "plus") {
        auto gamma = parse_formula_list(c.premises, ly);
        Formula goal = parse_formula(c.goal, ly.sig, ly.vars);
        Verdict v;
        if (c.kind == "derive")
          v = c.arity ? kary_part_of_logic(ly, ArityBound::finite(c.arity)).query(gamma, goal)
                      : derive(ly, gamma, goal);
        else if (c.kind == "ls")
          v = los_suszko(p, gamma, goal);
        else if (c.kind == "ss")
          v = shoesmith_smiley(p, gamma, goal);
        else if (c.kind == "minus")
          v = minus_query(p, gamma, goal);
        else
          v = c.arity ? plus_kary_query(p, ArityBound::finite(c.arity), gamma, goal)
                      : plus_query(p, gamma, goal);
        if (!certified(v, c.expect_yes))
          return fail("claim failed: " + c.kind + " " + c.goal +
                      (c.expect_yes ? " expected yes" : " expected certified no"));
      } else if (c.kind == "cut-failure-ss") {
        auto gamma = parse_formula_list(c.premises, ly);
        auto delta = parse_formula_list(c.delta, ly);
        Formula goal = parse_formula(c.goal, ly.sig, ly.vars);
        for (const auto& d : delta)
          if (!certified(shoesmith_smiley(p, gamma, d), true))
            return fail("cut-failure: intermediate not derivable: " +
                        format_formula(d, ly.sig, ly.vars));
        std::vector<Formula> ext = gamma;
        ext.insert(ext.end(), delta.begin(), delta.end());
        if (!certified(shoesmith_smiley(p, ext, goal), true))
          return fail("cut-failure: goal not derivable from extended set");
        if (!certified(shoesmith_smiley(p, gamma, goal), false))
          return fail("cut-failure: goal unexpectedly derivable (or not refutable) directly");
      } else if (c.kind == "structurality-failure-ls") {
        auto gamma = parse_formula_list(c.premises, ly);
        Formula goal = parse_formula(c.goal, ly.sig, ly.vars);
        Substitution sigma = parse_subst(c.subst, ly);
        if (!certified(los_suszko(p, gamma, goal), true))
          return fail("structurality-failure: original pair not derivable");
        std::vector<Formula> sg;
        for (const auto& g : gamma) sg.push_back(sigma(g));
        if (!certified(los_suszko(p, sg, sigma(goal)), false))
          return fail("structurality-failure: substituted pair still derivable (or undecided)");
      } else if (c.kind == "multiple-natexts") {
        auto lat = enumerate_natural_extensions(p);
        if (static_cast<int>(lat.extensions.size()) < 2)
          return fail("multiple-natexts: enumeration found fewer than two extensions");
      } else {
        return fail("unknown claim kind: " + c.kind);
      }
    } catch (const std::exception& e) {
      return fail(std::string("claim raised: ") + e.what());
    }
  }
  return true;
}

// --- counterexample search ---------------------------------------------------

namespace {

struct Candidate {
  LogicPresentation logic;
  std::vector<std::string> extra;
};

// deterministic Fisher-Yates; std::shuffle is implementation-defined
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = rng() % i;
    std::swap(v[i - 1], v[j]);
  }
}

std::vector<LogicPresentation> small_presentations(const std::string& sig_line,
                                                   const std::vector<std::string>& premise_pool,
                                                   const std::vector<std::string>& concl_pool,
                                                   int max_rules) {
  // rule candidates: one or two premises from the pool, conclusions from
  // concl_pool; only non-deepening rules are kept so that negative verdicts
  // stay exhaustive
  std::vector<std::string> rule_texts;
  for (std::size_t i = 0; i < premise_pool.size(); ++i)
    for (const auto& c : concl_pool) rule_texts.push_back(premise_pool[i] + " => " + c);
  for (std::size_t i = 0; i < premise_pool.size(); ++i)
    for (std::size_t j = i + 1; j < premise_pool.size(); ++j)
      for (const auto& c : concl_pool)
        rule_texts.push_back(premise_pool[i] + ", " + premise_pool[j] + " => " + c);

  std::vector<LogicPresentation> out;
  auto try_add = [&](const std::vector<std::string>& rules) {
    std::string text = sig_line + "\nvars x\n";
    for (const auto& r : rules) text += "rule " + r + "\n";
    text += "bounds depth=2 iters=200\n";
    try {
      LogicPresentation l = parse_presentation(text);
      if (!rules_nondeepening(l)) return;
      out.push_back(std::move(l));
    } catch (const std::exception&) {
    }
  };
  for (std::size_t i = 0; i < rule_texts.size(); ++i) try_add({rule_texts[i]});
  if (max_rules >= 2)
    for (std::size_t i = 0; i < rule_texts.size(); ++i)
      for (std::size_t j = i + 1; j < rule_texts.size(); ++j) try_add({rule_texts[i], rule_texts[j]});
  return out;
}

SearchOutcome search_ss_cut_failure(const SearchConfig& cfg) {
  SearchOutcome out;
  std::vector<Candidate> candidates;
  struct Space {
    std::string sig;
    std::vector<std::string> prem;
    std::vector<std::string> concl;
  };
  std::vector<Space> spaces = {
      {"sig a:0 b:0 f:1 g:1", {"x", "a", "b", "f(x)", "g(x)"}, {"a", "b", "x"}},
      {"sig a:0 f:1 g:1", {"x", "a", "f(x)", "g(x)"}, {"a", "x"}},
  };
  for (const auto& sp : spaces)
    for (auto& l : small_presentations(sp.sig, sp.prem, sp.concl, cfg.max_rules))
      candidates.push_back({std::move(l), {"y1"}});
  seeded_shuffle(candidates, cfg.seed);
  out.candidates_seen = static_cast<long>(candidates.size());

  for (const auto& cand : candidates) {
    if (out.probes_used >= cfg.budget) break;
    ExtensionProblem p(cand.logic, cand.extra);
    const auto& ly = p.over_y();
    // probe premise sets: pairs of unary-wrapped variables and constants
    std::vector<std::string> atoms;
    for (const auto& c : cand.logic.sig.connectives()) {
      if (c.arity == 0) atoms.push_back(c.name);
      if (c.arity == 1) {
        atoms.push_back(c.name + "(y1)");
        atoms.push_back(c.name + "(x)");
      }
    }
    std::vector<std::string> goals;
    for (const auto& c : cand.logic.sig.connectives())
      if (c.arity == 0) goals.push_back(c.name);

    for (std::size_t i = 0; i < atoms.size() && out.probes_used < cfg.budget; ++i)
      for (std::size_t j = i + 1; j < atoms.size() && out.probes_used < cfg.budget; ++j) {
        std::vector<Formula> gamma = {parse_formula(atoms[i], ly.sig, ly.vars),
                                      parse_formula(atoms[j], ly.sig, ly.vars)};
        // one-step consequences among the candidate goals
        std::vector<std::string> step1;
        std::vector<std::string> open_goals;
        for (const auto& gname : goals) {
          ++out.probes_used;
          Formula g = parse_formula(gname, ly.sig, ly.vars);
          Verdict v = shoesmith_smiley(p, gamma, g);
          if (v.truth == Truth::yes)
            step1.push_back(gname);
          else if (v.truth == Truth::no && v.exhaustive)
            open_goals.push_back(gname);
        }
        if (step1.empty() || open_goals.empty()) continue;
        std::vector<Formula> ext = gamma;
        for (const auto& s : step1) ext.push_back(parse_formula(s, ly.sig, ly.vars));
        for (const auto& gname : open_goals) {
          ++out.probes_used;
          Formula g = parse_formula(gname, ly.sig, ly.vars);
          if (shoesmith_smiley(p, ext, g).truth != Truth::yes) continue;
          // found: gamma |/-ss g, but the ss-consequences of gamma reach g
          WitnessRecord w;
          w.base = cand.logic;
          w.extend_vars = cand.extra;
          w.property = "ss-cut-failure";
          std::vector<std::string> gamma_strs = {atoms[i], atoms[j]};
          for (const auto& s : step1)
            w.claims.push_back({"ss", 0, gamma_strs, s, {}, "", true});
          std::vector<std::string> ext_strs = gamma_strs;
          ext_strs.insert(ext_strs.end(), step1.begin(), step1.end());
          w.claims.push_back({"ss", 0, ext_strs, gname, {}, "", true});
          w.claims.push_back({"ss", 0, gamma_strs, gname, {}, "", false});
          w.claims.push_back({"cut-failure-ss", 0, gamma_strs, gname, step1, "", true});
          out.witness = std::move(w);
          return out;
        }
      }
  }
  return out;
}

SearchOutcome search_ls_structurality_failure(const SearchConfig& cfg) {
  SearchOutcome out;
  std::vector<Candidate> candidates;
  struct Space {
    std::string sig;
    std::vector<std::string> prem;
    std::vector<std::string> concl;
  };
  std::vector<Space> spaces = {
      {"sig a:0 f:1 h:2", {"x", "a", "f(x)", "h(x,x)"}, {"x", "a"}},
      {"sig a:0 b:0 h:2", {"x", "a", "b", "h(x,x)"}, {"x", "a", "b"}},
  };
  std::vector<std::string> extras = {"y1"};
  if (cfg.max_extra_vars >= 2) extras.push_back("y2");
  for (const auto& sp : spaces)
    for (auto& l : small_presentations(sp.sig, sp.prem, sp.concl, cfg.max_rules))
      candidates.push_back({std::move(l), extras});
  seeded_shuffle(candidates, cfg.seed);
  out.candidates_seen = static_cast<long>(candidates.size());

  for (const auto& cand : candidates) {
    if (out.probes_used >= cfg.budget) break;
    ExtensionProblem p(cand.logic, cand.extra);
    const auto& ly = p.over_y();
    int hidx = -1;
    for (int ci = 0; ci < ly.sig.size(); ++ci)
      if (ly.sig.at(ci).arity == 2) hidx = ci;
    if (hidx < 0) continue;

    // pairs: each rule renamed into the fresh variable
    Substitution rename;
    rename.set(0, Formula::variable(ly.vars.index_of("y1")));
    std::vector<std::string> sub_specs = {"y1=" + ly.sig.at(hidx).name + "(x, y1)"};
    if (ly.vars.contains("y2"))
      sub_specs.push_back("y1=" + ly.sig.at(hidx).name + "(y1, y2)");
    for (const auto& r : cand.logic.rules) {
      if (r.premises.empty()) continue;
      std::vector<Formula> gamma;
      for (const auto& pr : r.premises) gamma.push_back(rename(pr));
      Formula goal = rename(r.conclusion);
      ++out.probes_used;
      if (los_suszko(p, gamma, goal).truth != Truth::yes) continue;
      for (const auto& spec : sub_specs) {
        if (out.probes_used >= cfg.budget) break;
        ++out.probes_used;
        Substitution sigma = parse_subst(spec, ly);
        std::vector<Formula> sg;
        for (const auto& g : gamma) sg.push_back(sigma(g));
        Verdict v = los_suszko(p, sg, sigma(goal));
        if (!(v.truth == Truth::no && v.exhaustive)) continue;
        WitnessRecord w;
        w.base = cand.logic;
        w.extend_vars = cand.extra;
        w.property = "ls-structurality-failure";
        std::vector<std::string> gamma_strs;
        for (const auto& g : gamma) gamma_strs.push_back(format_formula(g, ly.sig, ly.vars));
        std::string goal_str = format_formula(goal, ly.sig, ly.vars);
        std::vector<std::string> sg_strs;
        for (const auto& g : sg) sg_strs.push_back(format_formula(g, ly.sig, ly.vars));
        w.claims.push_back({"ls", 0, gamma_strs, goal_str, {}, "", true});
        w.claims.push_back(
            {"ls", 0, sg_strs, format_formula(sigma(goal), ly.sig, ly.vars), {}, "", false});
        w.claims.push_back({"structurality-failure-ls", 0, gamma_strs, goal_str, {}, spec, true});
        out.witness = std::move(w);
        return out;
      }
    }
  }
  return out;
}

SearchOutcome search_multiple_natexts(const SearchConfig& cfg, Exec exec) {
  SearchOutcome out;
  std::vector<Candidate> candidates;
  struct Space {
    std::string sig;
    std::vector<std::string> prem;
    std::vector<std::string> concl;
  };
  std::vector<Space> spaces = {
      {"sig a:0 b:0 c:0", {"x", "a", "b", "c"}, {"a", "b", "c", "x"}},
      {"sig a:0 b:0", {"x", "a", "b"}, {"a", "b", "x"}},
  };
  for (const auto& sp : spaces)
    for (auto& l : small_presentations(sp.sig, sp.prem, sp.concl, cfg.max_rules))
      candidates.push_back({std::move(l), {"y1"}});
  seeded_shuffle(candidates, cfg.seed);
  out.candidates_seen = static_cast<long>(candidates.size());

  for (const auto& cand : candidates) {
    if (out.probes_used >= cfg.budget) break;
    ++out.probes_used;
    ExtensionProblem p(cand.logic, cand.extra);
    if (p.uy()->size() > 5) continue;
    try {
      // every natural extension sits between the extreme constructions, so a
      // collapsed interval settles the count without the full family scan
      auto minus = minus_table(p, exec);
      auto plus_n =
          kary_table(plus_table(p, exec), ArityBound::finite(base_arity_profile(p)));
      if (minus == plus_n) continue;
      auto lat = enumerate_natural_extensions(p, exec);
      if (lat.extensions.size() >= 2) {
        WitnessRecord w;
        w.base = cand.logic;
        w.extend_vars = cand.extra;
        w.property = "multiple-natexts";
        w.claims.push_back(
            {"multiple-natexts", 0, {}, std::to_string(lat.extensions.size()), {}, "", true});
        out.witness = std::move(w);
        return out;
      }
    } catch (const std::exception&) {
    }
  }
  return out;
}

}  // namespace

SearchOutcome search_counterexample(const std::string& property, const SearchConfig& cfg,
                                    Exec exec) {
  if (property == "ss-cut-failure") return search_ss_cut_failure(cfg);
  if (property == "ls-structurality-failure") return search_ls_structurality_failure(cfg);
  if (property == "multiple-natexts") return search_multiple_natexts(cfg, exec);
  throw std::invalid_argument("unknown search property: " + property);
}

}  // namespace conseq
