// Acceptance suite: one line per criterion, exit code = number of failures.
// Each criterion is exact (no tolerances) and carries a wall-clock budget.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "conseq/filters.hpp"
#include "conseq/natext.hpp"

using namespace conseq;

namespace {

int g_failures = 0;

void criterion(int num, const std::string& name, double budget_s,
               const std::function<bool(std::string&)>& body) {
  auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    pass = false;
    detail += (detail.empty() ? "" : "; ") + std::string("over budget");
  }
  std::printf("criterion %d (%s): %s  [%.2fs / %.0fs]%s%s\n", num, name.c_str(),
              pass ? "PASS" : "FAIL", secs, budget_s, detail.empty() ? "" : " -- ",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::vector<Formula> parse_list(const LogicPresentation& l, const std::vector<std::string>& ss) {
  std::vector<Formula> out;
  for (const auto& s : ss) out.push_back(parse_formula(s, l.sig, l.vars));
  return out;
}

}  // namespace

int main() {
  // 1. the k-ary part of the staged-union logic loses cut at bound 3
  criterion(1, "k-ary cut failure on the staged-union instance", 1.0, [](std::string& why) {
    auto l = preset_staged_union();
    auto gamma = parse_list(l, {"m11", "m12", "m21", "m22"});
    Formula star = parse_formula("star", l.sig, l.vars);
    if (derive(l, gamma, star).truth != Truth::yes) return why = "full derivation missing", false;
    auto r3 = kary_part_of_logic(l, ArityBound::finite(3));
    if (r3.query(gamma, parse_formula("i1", l.sig, l.vars)).truth != Truth::yes)
      return why = "3-ary i1 missing", false;
    if (r3.query(gamma, parse_formula("i2", l.sig, l.vars)).truth != Truth::yes)
      return why = "3-ary i2 missing", false;
    if (r3.query(parse_list(l, {"i1", "i2"}), star).truth != Truth::yes)
      return why = "3-ary {i1,i2} |- star missing", false;
    auto blocked = r3.query(gamma, star);
    if (!(blocked.truth == Truth::no && blocked.exhaustive))
      return why = "3-ary part unexpectedly derives star", false;

    auto u = make_universe(l);
    auto k3 = kary_table(closure_table(l, u), ArityBound::finite(3));
    auto table = k3.derivable;
    SetOperator op(u->as_carrier(), [table](Mask s) { return table[s]; });
    auto [idem, witness] = is_idempotent(op);
    if (idem) return why = "idempotence checker missed the failure", false;
    if (!witness || *witness != u->mask_of(gamma))
      return why = "idempotence witness is not the four-premise set", false;
    return true;
  });

  // 2. inclusion chain, structural closure and hull identities, exhaustively
  criterion(2, "inclusion chain on constants-only instances", 120.0, [](std::string& why) {
    int checked = 0;
    for (auto make : {preset_single_rule, preset_no_rules, preset_axiom_mix, preset_two_stage,
                      preset_two_var}) {
      ExtensionProblem p(make(), {"y1"});
      if (p.uy()->size() > 8) continue;
      auto rep = check_chain(p);
      if (!rep.ok()) {
        why = rep.failures.empty() ? "chain check failed" : rep.failures.front();
        return false;
      }
      ++checked;
    }
    if (checked < 3) return why = "fewer than three instances in range", false;
    return true;
  });

  // 3. conservative restriction towers X within Y within Z
  criterion(3, "conservativity of the minimal extension", 10.0, [](std::string& why) {
    for (auto make : {preset_single_rule, preset_two_stage, preset_axiom_mix}) {
      ExtensionProblem py(make(), {"y1"});
      ExtensionProblem pz(make(), {"y1", "z1"});
      auto minus_y = minus_table(py);
      auto minus_z = minus_table(pz);
      if (!(restrict_table(minus_z, py.uy()) == minus_y))
        return why = "restriction Z->Y is not the Y extension", false;
      auto base_ct = closure_table(py.base(), py.ux());
      if (!(restrict_table(minus_z, py.ux()) == base_ct))
        return why = "restriction Z->X is not the base logic", false;
      if (!(restrict_table(minus_y, py.ux()) == base_ct))
        return why = "restriction Y->X is not the base logic", false;
    }
    return true;
  });

  // 4. filters on the formula algebra = theories, by independent routes
  criterion(4, "filters equal theories", 30.0, [](std::string& why) {
    int checked = 0;
    for (auto make : {preset_staged_union, preset_two_stage, preset_axiom_mix, preset_single_rule}) {
      auto l = make();
      if (make_universe(l)->size() > 12) continue;
      auto rep = filters_equal_theories(l);
      if (!rep.equal) return why = "mismatch (" + rep.side + ")", false;
      ++checked;
    }
    if (checked < 3) return why = "fewer than three instances in range", false;
    return true;
  });

  // 5. the generated-filter map is a genuine left adjoint
  criterion(5, "Galois adjunction for generated filters", 10.0, [](std::string& why) {
    for (auto make : {preset_single_rule, preset_two_stage, preset_axiom_mix, preset_staged_union}) {
      auto l = make();
      auto u = make_universe(l);
      auto rep = check_adjunction(l, formula_algebra_structure(l, *u));
      if (!rep.ok) return why = rep.why, false;
    }
    // a non-free structure as well
    auto l = parse_presentation("sig a:0 b:0\nvars x\nrule a => b\n");
    FiniteStructure a("A", l.sig, {"0", "1"});
    a.define(0, {}, 0);
    a.define(1, {}, 1);
    auto rep = check_adjunction(l, a);
    if (!rep.ok) return why = rep.why, false;
    return true;
  });

  // 6. meet/join/sup formulas against the brute-force enumeration
  criterion(6, "closure-lattice operations vs enumeration oracle", 60.0, [](std::string& why) {
    auto c3 = std::make_shared<Carrier>();
    c3->labels = {"1", "2", "3"};
    auto all3 = enumerate_closure_operators(c3);
    if (all3.size() != 61) return why = "size-3 enumeration is not 61", false;

    // omega bounds: every pair, exact glb and lub
    for (std::size_t i = 0; i < all3.size(); ++i)
      for (std::size_t j = i; j < all3.size(); ++j) {
        auto m = meet({all3[i], all3[j]}, ArityBound::omega());
        auto jn = join_general({all3[i], all3[j]}, ArityBound::omega());
        if (!operator_leq(m, all3[i]) || !operator_leq(m, all3[j]))
          return why = "meet is not a lower bound", false;
        if (!operator_leq(all3[i], jn) || !operator_leq(all3[j], jn))
          return why = "join is not an upper bound", false;
        for (const auto& cand : all3) {
          if (operator_leq(cand, all3[i]) && operator_leq(cand, all3[j]) &&
              !operator_leq(cand, m))
            return why = "meet misses a lower bound", false;
          if (operator_leq(all3[i], cand) && operator_leq(all3[j], cand) &&
              !operator_leq(jn, cand))
            return why = "join misses an upper bound", false;
        }
      }

    // finite bounds: when the formula yields a closure operator it is the
    // bound among n-ary operators (idempotence reported, never assumed)
    for (int n : {2, 3}) {
      std::vector<SetOperator> nary;
      for (const auto& op : all3) {
        auto k = kary_part(op, ArityBound::finite(n));
        bool same = true;
        for (Mask s = 0; s < 8 && same; ++s) same = k(s) == op(s);
        if (same) nary.push_back(op);
      }
      for (std::size_t i = 0; i < nary.size(); i += 3)
        for (std::size_t j = i; j < nary.size(); j += 3) {
          auto m = meet({nary[i], nary[j]}, ArityBound::finite(n));
          if (!is_idempotent(m).first) continue;
          for (const auto& cand : nary)
            if (operator_leq(cand, nary[i]) && operator_leq(cand, nary[j]) &&
                !operator_leq(cand, m))
              return why = "finite-bound meet misses a lower bound", false;
        }
    }

    // size 4, sampled pairs
    auto c4 = std::make_shared<Carrier>();
    c4->labels = {"1", "2", "3", "4"};
    auto all4 = enumerate_closure_operators(c4);
    std::mt19937_64 rng(1);
    for (int t = 0; t < 120; ++t) {
      const auto& a = all4[rng() % all4.size()];
      const auto& b = all4[rng() % all4.size()];
      auto m = meet({a, b}, ArityBound::omega());
      auto jn = join_general({a, b}, ArityBound::omega());
      for (const auto& cand : all4) {
        if (operator_leq(cand, a) && operator_leq(cand, b) && !operator_leq(cand, m))
          return why = "size-4 meet misses a lower bound", false;
        if (operator_leq(a, cand) && operator_leq(b, cand) && !operator_leq(jn, cand))
          return why = "size-4 join misses an upper bound", false;
      }
    }
    return true;
  });

  // 7. the searches find replayable witnesses within the default budget
  criterion(7, "counterexample searches succeed", 240.0, [](std::string& why) {
    SearchConfig cfg;  // default seed and budget
    auto ss = search_counterexample("ss-cut-failure", cfg);
    if (!ss.witness) return why = "no cut-failure witness within budget", false;
    std::string verr;
    if (!verify_witness(*ss.witness, &verr)) return why = "ss witness: " + verr, false;

    auto ls = search_counterexample("ls-structurality-failure", cfg);
    if (!ls.witness) return why = "no structurality-failure witness within budget", false;
    if (!verify_witness(*ls.witness, &verr)) return why = "ls witness: " + verr, false;
    return true;
  });

  // 8. the enumerated natural extensions form a lattice with the expected ends
  criterion(8, "lattice of natural extensions", 240.0, [](std::string& why) {
    for (auto make : {preset_single_rule, preset_no_rules, preset_axiom_mix, preset_two_stage,
                      preset_two_var}) {
      ExtensionProblem p(make(), {"y1"});
      auto lat = enumerate_natural_extensions(p);
      if (lat.extensions.empty()) return why = "no extensions found", false;
      if (lat.bottom < 0) return why = "minimal construction missing from the set", false;
      if (lat.top < 0) return why = "maximal construction missing from the set", false;
      if (!lat.closed_under_sup_and_glb())
        return why = "sup/glb leave the enumerated set", false;
      for (std::size_t i = 0; i < lat.extensions.size(); ++i) {
        if (!table_subset(lat.extensions[lat.bottom], lat.extensions[i]))
          return why = "bottom is not below every member", false;
        if (!table_subset(lat.extensions[i], lat.extensions[lat.top]))
          return why = "top is not above every member", false;
      }
      // sup against the brute-force least upper bound inside the set
      int n = lat.arity;
      for (std::size_t i = 0; i < lat.extensions.size(); ++i)
        for (std::size_t j = 0; j < lat.extensions.size(); ++j) {
          auto sup = natext_sup({lat.extensions[i], lat.extensions[j]}, ArityBound::finite(n));
          int best = -1;
          for (std::size_t k = 0; k < lat.extensions.size(); ++k) {
            if (!table_subset(lat.extensions[i], lat.extensions[k])) continue;
            if (!table_subset(lat.extensions[j], lat.extensions[k])) continue;
            if (best < 0 || table_subset(lat.extensions[k], lat.extensions[best]))
              best = static_cast<int>(k);
          }
          if (best < 0 || !(sup == lat.extensions[best]))
            return why = "sup differs from the brute-force least upper bound", false;
        }
      // the supremum of the whole family is the maximal construction
      auto sup_all = natext_sup(lat.extensions, ArityBound::finite(n));
      if (!(sup_all == lat.extensions[lat.top]))
        return why = "sup of the whole family is not the top", false;
    }
    return true;
  });

  // 9. theory-family round-trip is the identity and separates extensions
  criterion(9, "theory-family round-trip", 30.0, [](std::string& why) {
    for (auto make : {preset_single_rule, preset_two_stage, preset_axiom_mix}) {
      ExtensionProblem p(make(), {"y1"});
      int n = base_arity_profile(p);
      auto minus = minus_table(p);
      auto plus_n = kary_table(plus_table(p), ArityBound::finite(n));
      auto r1 = theoryfamily_roundtrip(minus);
      if (!r1.identity) return why = "minus round-trip: " + r1.why, false;
      auto r2 = theoryfamily_roundtrip(plus_n);
      if (!r2.identity) return why = "plus round-trip: " + r2.why, false;

      // distinct relations have distinct filter families
      auto fam_minus = relation_filters_on_formula_algebra(minus);
      auto refl = reflexive_monotone_table(p.uy());
      if (!(refl == minus) &&
          relation_filters_on_formula_algebra(refl) == fam_minus)
        return why = "distinct relations share a filter family", false;
      if (!(minus == plus_n) &&
          relation_filters_on_formula_algebra(plus_n) == fam_minus)
        return why = "extreme extensions share a filter family", false;
    }
    return true;
  });

  std::printf("%s: %d criterion(s) failed\n", g_failures ? "FAIL" : "OK", g_failures);
  return g_failures;
}
