#include "conseq/filters.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace conseq {

std::vector<StructInstance> structure_instances(const LogicPresentation& l,
                                                const FiniteStructure& a) {
  std::vector<StructInstance> out;
  std::set<std::pair<Mask, int>> seen;
  if (a.size() > 64) throw std::invalid_argument("carrier too large");
  for (int ri = 0; ri < static_cast<int>(l.rules.size()); ++ri) {
    const Rule& r = l.rules[ri];
    std::set<int> vs;
    for (const auto& p : r.premises)
      for (int v : p.variables()) vs.insert(v);
    for (int v : r.conclusion.variables()) vs.insert(v);
    std::vector<int> rule_vars(vs.begin(), vs.end());

    std::vector<int> idx(rule_vars.size(), 0);
    while (true) {
      std::map<int, int> val;
      for (std::size_t j = 0; j < rule_vars.size(); ++j) val[rule_vars[j]] = idx[j];
      Mask prem = 0;
      for (const auto& p : r.premises) prem |= Mask{1} << evaluate(val, p, a);
      int concl = evaluate(val, r.conclusion, a);
      if (seen.emplace(prem, concl).second) out.push_back({prem, concl, ri});
      if (rule_vars.empty()) break;
      int j = static_cast<int>(rule_vars.size()) - 1;
      while (j >= 0 && ++idx[j] == a.size()) idx[j--] = 0;
      if (j < 0) break;
    }
  }
  return out;
}

bool is_filter(const LogicPresentation& l, const FiniteStructure& a, Mask f,
               FilterWitness* witness) {
  for (int ri = 0; ri < static_cast<int>(l.rules.size()); ++ri) {
    const Rule& r = l.rules[ri];
    std::set<int> vs;
    for (const auto& p : r.premises)
      for (int v : p.variables()) vs.insert(v);
    for (int v : r.conclusion.variables()) vs.insert(v);
    std::vector<int> rule_vars(vs.begin(), vs.end());

    std::vector<int> idx(rule_vars.size(), 0);
    while (true) {
      std::map<int, int> val;
      for (std::size_t j = 0; j < rule_vars.size(); ++j) val[rule_vars[j]] = idx[j];
      Mask prem = 0;
      for (const auto& p : r.premises) prem |= Mask{1} << evaluate(val, p, a);
      int concl = evaluate(val, r.conclusion, a);
      if (is_subset(prem, f) && !bit(f, concl)) {
        if (witness) *witness = {ri, val};
        return false;
      }
      if (rule_vars.empty()) break;
      int j = static_cast<int>(rule_vars.size()) - 1;
      while (j >= 0 && ++idx[j] == a.size()) idx[j--] = 0;
      if (j < 0) break;
    }
  }
  return true;
}

bool FilterLattice::contains(Mask f) const {
  return std::binary_search(filters.begin(), filters.end(), f);
}

FilterLattice all_filters(const LogicPresentation& l, const FiniteStructure& a, Exec exec) {
  if (a.size() > 16) throw std::invalid_argument("filter enumeration caps at 16 elements");
  std::string missing;
  if (!a.fully_defined(l.sig, &missing))
    throw std::invalid_argument("structure leaves " + missing + " uninterpreted");
  auto inst = structure_instances(l, a);
  std::size_t total = std::size_t{1} << a.size();
  std::vector<char> good(total, 0);
  std::int64_t n = static_cast<std::int64_t>(total);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
#endif
  for (std::int64_t s = 0; s < n; ++s) {
    bool ok = true;
    for (const auto& gi : inst)
      if (is_subset(gi.premises, static_cast<Mask>(s)) && !bit(static_cast<Mask>(s), gi.conclusion)) {
        ok = false;
        break;
      }
    good[s] = ok;
  }
  FilterLattice lat;
  for (std::size_t s = 0; s < total; ++s)
    if (good[s]) lat.filters.push_back(static_cast<Mask>(s));
  // intersections of filters must be filters again; cheap to re-verify
  if (a.size() <= 8)
    for (std::size_t i = 0; i < lat.filters.size(); ++i)
      for (std::size_t j = i + 1; j < lat.filters.size(); ++j)
        if (!lat.contains(lat.filters[i] & lat.filters[j]))
          throw std::logic_error("internal: filters not closed under intersection");
  return lat;
}

Mask generated_filter(const LogicPresentation& l, const FiniteStructure& a, Mask s, Exec exec) {
  // route 1: intersection of all filters above s
  auto lat = all_filters(l, a, exec);
  Mask by_intersection = full_mask(a.size());
  for (Mask f : lat.filters)
    if (is_subset(s, f)) by_intersection &= f;
  // route 2: saturation by rule instances
  auto inst = structure_instances(l, a);
  Mask cur = s;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& gi : inst)
      if (is_subset(gi.premises, cur) && !bit(cur, gi.conclusion)) {
        cur |= Mask{1} << gi.conclusion;
        changed = true;
      }
  }
  if (cur != by_intersection)
    throw std::logic_error("internal: generated filter routes disagree");
  return cur;
}

bool is_homomorphism(const Signature& sig, const FiniteStructure& a, const FiniteStructure& b,
                     const std::vector<int>& map, std::string* why) {
  if (static_cast<int>(map.size()) != a.size()) {
    if (why) *why = "map size does not match carrier";
    return false;
  }
  for (int v : map)
    if (v < 0 || v >= b.size()) {
      if (why) *why = "map image outside target carrier";
      return false;
    }
  for (int ci = 0; ci < sig.size(); ++ci) {
    int k = sig.at(ci).arity;
    std::vector<int> args(k, 0);
    while (true) {
      int va = a.interp(ci, args);
      std::vector<int> margs(k);
      for (int j = 0; j < k; ++j) margs[j] = map[args[j]];
      int vb = b.interp(ci, margs);
      if (map[va] != vb) {
        if (why) {
          *why = "not a homomorphism at " + sig.at(ci).name;
        }
        return false;
      }
      int j = k - 1;
      while (j >= 0 && ++args[j] == a.size()) args[j--] = 0;
      if (j < 0 || k == 0) break;
    }
  }
  return true;
}

NaturalityReport check_naturality(const LogicPresentation& l, const FiniteStructure& a,
                                  const FiniteStructure& b, const std::vector<int>& map,
                                  Exec exec) {
  std::string why;
  if (!is_homomorphism(l.sig, a, b, map, &why)) throw std::invalid_argument(why);
  auto fa = all_filters(l, a, exec);
  auto fb = all_filters(l, b, exec);
  NaturalityReport rep;
  for (Mask f : fb.filters) {
    Mask pre = 0;
    for (int e = 0; e < a.size(); ++e)
      if (bit(f, map[e])) pre |= Mask{1} << e;
    if (!fa.contains(pre)) {
      rep.ok = false;
      rep.failing_filter = f;
      return rep;
    }
  }
  return rep;
}

FiniteStructure formula_algebra_structure(const LogicPresentation& l, const Universe& u) {
  if (!l.constants_only())
    throw std::invalid_argument("formula algebra as finite structure needs constants only");
  std::vector<std::string> carrier;
  for (const auto& f : u.formulas) carrier.push_back(format_formula(f, u.sig, u.vars));
  FiniteStructure a("Fm", l.sig, carrier);
  for (int ci = 0; ci < l.sig.size(); ++ci) {
    int idx = u.find(Formula::constant(ci));
    if (idx < 0) throw std::logic_error("constant missing from universe");
    a.define(ci, {}, idx);
  }
  return a;
}

FiltersTheoriesReport filters_equal_theories(const LogicPresentation& l, Exec exec) {
  auto u = make_universe(l);
  if (!u->exact) throw std::invalid_argument("needs an exact instance");
  auto a = formula_algebra_structure(l, *u);
  auto lat = all_filters(l, a, exec);

  // theories via term-level rule instances, independently of evaluate()
  std::vector<Mask> theories;
  for (Mask t = 0; t < (Mask{1} << u->size()); ++t)
    if (is_theory(l, *u, t)) theories.push_back(t);
  // cross-check against the fixed points of the saturation closure
  {
    auto ct = closure_table(l, u, exec);
    std::vector<Mask> fixed;
    for (Mask s = 0; s < ct.derivable.size(); ++s)
      if (ct.derivable[s] == s) fixed.push_back(s);
    if (fixed != theories) throw std::logic_error("internal: theory routes disagree");
  }

  FiltersTheoriesReport rep;
  std::size_t i = 0, j = 0;
  while (i < lat.filters.size() || j < theories.size()) {
    if (i < lat.filters.size() && j < theories.size() && lat.filters[i] == theories[j]) {
      ++i, ++j;
      continue;
    }
    rep.equal = false;
    if (j >= theories.size() || (i < lat.filters.size() && lat.filters[i] < theories[j])) {
      rep.witness = lat.filters[i];
      rep.side = "filter-not-theory";
    } else {
      rep.witness = theories[j];
      rep.side = "theory-not-filter";
    }
    return rep;
  }
  return rep;
}

AdjunctionReport check_adjunction(const LogicPresentation& l, const FiniteStructure& a,
                                  Exec exec) {
  AdjunctionReport rep;
  auto lat = all_filters(l, a, exec);
  auto inst = structure_instances(l, a);
  std::size_t total = std::size_t{1} << a.size();
  std::vector<Mask> gen(total);
  for (std::size_t s = 0; s < total; ++s) {
    Mask cur = static_cast<Mask>(s);
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& gi : inst)
        if (is_subset(gi.premises, cur) && !bit(cur, gi.conclusion)) {
          cur |= Mask{1} << gi.conclusion;
          changed = true;
        }
    }
    gen[s] = cur;
  }
  auto fail = [&](std::string why) {
    rep.ok = false;
    rep.why = std::move(why);
    return rep;
  };
  // adjunction law against every filter
  for (std::size_t s = 0; s < total; ++s)
    for (Mask f : lat.filters) {
      bool left = is_subset(gen[s], f);
      bool right = is_subset(static_cast<Mask>(s), f);
      if (left != right) return fail("gen(S) <= F iff S <= F fails");
    }
  // the induced map is a closure operator
  for (std::size_t s = 0; s < total; ++s) {
    if (!is_subset(static_cast<Mask>(s), gen[s])) return fail("gen not inflationary");
    if (gen[gen[s]] != gen[s]) return fail("gen not idempotent");
    for (int i = 0; i < a.size(); ++i)
      if (!bit(static_cast<Mask>(s), i) && !is_subset(gen[s], gen[s | (Mask{1} << i)]))
        return fail("gen not monotone");
  }
  // composites: gen fixes exactly the filters
  for (Mask f : lat.filters)
    if (gen[f] != f) return fail("gen does not fix a filter");
  for (std::size_t s = 0; s < total; ++s)
    if (!lat.contains(gen[s])) return fail("gen image is not a filter");
  return rep;
}

int FilterPairInstance::entry_of(const std::string& name) const {
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].structure.name() == name) return static_cast<int>(i);
  return -1;
}

void FilterPairInstance::validate(const Signature& sig) const {
  for (const auto& e : entries) {
    Mask full = full_mask(e.structure.size());
    if (!std::binary_search(e.closed.begin(), e.closed.end(), full))
      throw std::invalid_argument("family misses the full carrier on " + e.structure.name());
    for (std::size_t i = 0; i < e.closed.size(); ++i)
      for (std::size_t j = i + 1; j < e.closed.size(); ++j)
        if (!std::binary_search(e.closed.begin(), e.closed.end(), e.closed[i] & e.closed[j]))
          throw std::invalid_argument("family not intersection-closed on " + e.structure.name());
  }
  for (const auto& h : homs) {
    const auto& a = entries.at(h.from);
    const auto& b = entries.at(h.to);
    std::string why;
    if (!is_homomorphism(sig, a.structure, b.structure, h.map, &why))
      throw std::invalid_argument(why);
    for (Mask f : b.closed) {
      Mask pre = 0;
      for (int e = 0; e < a.structure.size(); ++e)
        if (bit(f, h.map[e])) pre |= Mask{1} << e;
      if (!std::binary_search(a.closed.begin(), a.closed.end(), pre))
        throw std::invalid_argument("naturality fails along declared homomorphism");
    }
  }
}

FilterPairInstance canonical_filter_pair(const LogicPresentation& l,
                                         std::vector<FiniteStructure> structures, Exec exec) {
  FilterPairInstance fp;
  for (auto& s : structures) {
    auto lat = all_filters(l, s, exec);
    fp.entries.push_back({std::move(s), std::move(lat.filters)});
  }
  return fp;
}

SetOperator induced_operator(const FilterPairInstance& fp, int entry) {
  const auto& e = fp.entries.at(entry);
  auto carrier = std::make_shared<Carrier>();
  carrier->labels = e.structure.carrier();
  IntersectionFamily fam{carrier, e.closed};
  return family_to_operator(fam);
}

InitialityReport check_initiality(const LogicPresentation& l, const FilterPairInstance& fp) {
  InitialityReport rep;
  for (std::size_t i = 0; i < fp.entries.size(); ++i) {
    const auto& e = fp.entries[i];
    for (Mask m : e.closed)
      if (!is_filter(l, e.structure, m)) {
        rep.ok = false;
        rep.entry = static_cast<int>(i);
        rep.member = m;
        return rep;
      }
  }
  return rep;
}

std::vector<Mask> relation_filters_on_formula_algebra(const RelationTable& rel, Exec exec) {
  const Universe& u = *rel.u;
  int n = u.size();
  if (n > 16) throw std::invalid_argument("carrier too large");
  auto endos = universe_endomorphisms(u);
  // valuations of the formula algebra into itself are exactly the
  // substitution actions, so stability under them is the filter condition
  std::size_t total = std::size_t{1} << n;
  std::vector<char> good(total, 1);
  std::int64_t tn = static_cast<std::int64_t>(total);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64) if (exec == Exec::parallel)
#endif
  for (std::int64_t f = 0; f < tn; ++f) {
    Mask fm = static_cast<Mask>(f);
    bool ok = true;
    for (const auto& img : endos) {
      if (!ok) break;
      for (Mask gamma = 0; gamma < rel.derivable.size() && ok; ++gamma) {
        Mask vg = 0;
        bool in_range = true;
        for (int i = 0; i < n && in_range; ++i)
          if (bit(gamma, i)) {
            if (img[i] < 0)
              in_range = false;
            else
              vg |= Mask{1} << img[i];
          }
        if (!in_range || !is_subset(vg, fm)) continue;
        Mask cons = rel.derivable[gamma];
        for (int phi = 0; phi < n; ++phi)
          if (bit(cons, phi) && img[phi] >= 0 && !bit(fm, img[phi])) {
            ok = false;
            break;
          }
      }
    }
    good[f] = ok;
  }
  std::vector<Mask> out;
  for (std::size_t f = 0; f < total; ++f)
    if (good[f]) out.push_back(static_cast<Mask>(f));
  return out;
}

std::vector<Mask> relation_filters_on_structure(const RelationTable& rel,
                                                const FiniteStructure& a, Exec exec) {
  const Universe& u = *rel.u;
  int n = u.size();
  int an = a.size();
  if (an > 16) throw std::invalid_argument("carrier too large");

  // all valuations of the relation's variables into the carrier, lifted to
  // maps from universe formulas to carrier elements
  std::vector<std::vector<int>> lifted;
  std::vector<std::size_t> idx(u.vars.size(), 0);
  while (true) {
    std::map<int, int> val;
    for (int v = 0; v < u.vars.size(); ++v) val[v] = static_cast<int>(idx[v]);
    std::vector<int> img(n);
    for (int i = 0; i < n; ++i) img[i] = evaluate(val, u.formulas[i], a);
    lifted.push_back(std::move(img));
    if (u.vars.size() == 0) break;
    int j = u.vars.size() - 1;
    while (j >= 0 && ++idx[j] == static_cast<std::size_t>(an)) idx[j--] = 0;
    if (j < 0) break;
  }

  std::size_t total = std::size_t{1} << an;
  std::vector<char> good(total, 1);
  std::int64_t tn = static_cast<std::int64_t>(total);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64) if (exec == Exec::parallel)
#endif
  for (std::int64_t f = 0; f < tn; ++f) {
    Mask fm = static_cast<Mask>(f);
    bool ok = true;
    for (const auto& img : lifted) {
      if (!ok) break;
      for (Mask gamma = 0; gamma < rel.derivable.size() && ok; ++gamma) {
        Mask vg = 0;
        for (int i = 0; i < n; ++i)
          if (bit(gamma, i)) vg |= Mask{1} << img[i];
        if (!is_subset(vg, fm)) continue;
        Mask cons = rel.derivable[gamma];
        for (int phi = 0; phi < n; ++phi)
          if (bit(cons, phi) && !bit(fm, img[phi])) {
            ok = false;
            break;
          }
      }
    }
    good[f] = ok;
  }
  std::vector<Mask> out;
  for (std::size_t f = 0; f < total; ++f)
    if (good[f]) out.push_back(static_cast<Mask>(f));
  return out;
}

RoundtripReport theoryfamily_roundtrip(const RelationTable& rel, Exec exec) {
  RoundtripReport rep;
  auto family = relation_filters_on_formula_algebra(rel, exec);
  int n = rel.size();
  Mask full = full_mask(n);
  for (Mask s = 0; s < rel.derivable.size(); ++s) {
    Mask acc = full;
    for (Mask c : family)
      if (is_subset(s, c)) acc &= c;
    if (acc != rel.derivable[s]) {
      rep.identity = false;
      const Universe& u = *rel.u;
      rep.why = "induced closure differs at {" + [&] {
        std::string out;
        bool first = true;
        for (int i = 0; i < n; ++i)
          if (bit(s, i)) {
            if (!first) out += ", ";
            out += format_formula(u.formulas[i], u.sig, u.vars);
            first = false;
          }
        return out;
      }() + "}";
      return rep;
    }
  }
  return rep;
}

// --- structure file format --------------------------------------------------

namespace {

std::vector<std::string> tokens_of(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

StructureFile parse_structures(const std::string& text, const Signature& sig) {
  StructureFile out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto words = tokens_of(line);
    if (words.empty()) continue;
    auto err = [&](const std::string& m) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + m);
    };
    if (words[0] == "struct") {
      auto clauses = split_on(line, ';');
      auto head = tokens_of(clauses[0]);
      if (head.size() < 4 || head[2] != "carrier") err("struct <name> carrier <e> ... expected");
      std::string name = head[1];
      std::vector<std::string> carrier(head.begin() + 3, head.end());
      FiniteStructure a(name, sig, carrier);
      for (std::size_t ci = 1; ci < clauses.size(); ++ci) {
        auto toks = tokens_of(clauses[ci]);
        if (toks.empty()) continue;
        // <connective> <args...> -> <value>
        auto arrow = std::find(toks.begin(), toks.end(), "->");
        if (arrow == toks.end() || arrow + 1 == toks.end()) err("interpretation clause needs ->");
        int conn = sig.index_of(toks[0]);
        if (conn < 0) err("unknown connective " + toks[0]);
        std::vector<int> args;
        for (auto it = toks.begin() + 1; it != arrow; ++it) {
          int e = a.element_index(*it);
          if (e < 0) err("unknown element " + *it);
          args.push_back(e);
        }
        if (static_cast<int>(args.size()) != sig.at(conn).arity) err("arity mismatch in clause");
        int v = a.element_index(*(arrow + 1));
        if (v < 0) err("unknown element " + *(arrow + 1));
        a.define(conn, args, v);
      }
      out.structures.push_back(std::move(a));
    } else if (words[0] == "hom") {
      // hom A -> B : a->b a->b ...
      auto colon = line.find(':');
      if (colon == std::string::npos) err("hom needs a colon");
      auto head = tokens_of(line.substr(0, colon));
      if (head.size() != 4 || head[2] != "->") err("hom <A> -> <B> : ... expected");
      StructureFile::Hom h;
      h.from = head[1];
      h.to = head[3];
      for (const auto& t : tokens_of(line.substr(colon + 1))) {
        auto arrow = t.find("->");
        if (arrow == std::string::npos) err("hom pairs look like a->b");
        h.pairs.emplace_back(t.substr(0, arrow), t.substr(arrow + 2));
      }
      out.homs.push_back(std::move(h));
    } else {
      err("unknown directive " + words[0]);
    }
  }
  return out;
}

StructureFile load_structures(const std::string& path, const Signature& sig) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_structures(ss.str(), sig);
}

const FiniteStructure* StructureFile::find(const std::string& name) const {
  for (const auto& s : structures)
    if (s.name() == name) return &s;
  return nullptr;
}

}  // namespace conseq
