#include <doctest.h>

#include "conseq/natext.hpp"
#include "conseq/report.hpp"

using namespace conseq;

namespace {

std::vector<Formula> parse_list(const LogicPresentation& l, const std::vector<std::string>& ss) {
  std::vector<Formula> out;
  for (const auto& s : ss) out.push_back(parse_formula(s, l.sig, l.vars));
  return out;
}

}  // namespace

TEST_CASE("the four constructions on the one-rule running example") {
  ExtensionProblem p(preset_single_rule(), {"y"});
  const auto& ly = p.over_y();
  Formula a = parse_formula("a", ly.sig, ly.vars);
  Formula y = parse_formula("y", ly.sig, ly.vars);
  std::vector<Formula> gamma = {y};

  // identity-permutation case: everything inside Fm(X)
  Formula x = parse_formula("x", ly.sig, ly.vars);
  CHECK(los_suszko(p, {x}, a).truth == Truth::yes);

  CHECK(los_suszko(p, gamma, a).truth == Truth::yes);        // swap x/y
  CHECK(shoesmith_smiley(p, gamma, a).truth == Truth::yes);  // v: x -> y
  CHECK(minus_query(p, gamma, a).truth == Truth::yes);
  Verdict plus = plus_query(p, gamma, a);
  CHECK(plus.truth == Truth::yes);
  CHECK(plus.exhaustive);

  // a fresh variable is not reachable
  Verdict no = los_suszko(p, gamma, parse_formula("x", ly.sig, ly.vars));
  CHECK(no.truth == Truth::no);
  CHECK(shoesmith_smiley(p, gamma, x).truth == Truth::no);
  CHECK(minus_query(p, gamma, x).truth == Truth::no);
  CHECK(plus_query(p, gamma, x).truth == Truth::no);
}

TEST_CASE("whole-relation tables agree with the per-query routes") {
  for (auto make : {preset_single_rule, preset_two_var}) {
    ExtensionProblem p(make(), {"y"});
    auto uy = p.uy();
    auto ls = ls_table(p);
    auto ss = ss_table(p);
    auto minus = minus_table(p);
    auto plus = plus_table(p);
    for (Mask s = 0; s < ls.derivable.size(); ++s) {
      auto gamma = uy->unmask(s);
      for (int phi = 0; phi < uy->size(); ++phi) {
        const Formula& goal = uy->formulas[phi];
        CHECK(ls.holds(s, phi) == (los_suszko(p, gamma, goal).truth == Truth::yes));
        CHECK(ss.holds(s, phi) == (shoesmith_smiley(p, gamma, goal).truth == Truth::yes));
        CHECK(minus.holds(s, phi) == (minus_query(p, gamma, goal).truth == Truth::yes));
        CHECK(plus.holds(s, phi) == (plus_query(p, gamma, goal).truth == Truth::yes));
      }
    }
  }
}

TEST_CASE("k-ary plus queries agree with the k-ary plus table") {
  for (auto make : {preset_single_rule, preset_two_stage}) {
    ExtensionProblem p(make(), {"y"});
    auto uy = p.uy();
    auto base = plus_table(p);
    for (int n : {1, 2, 3}) {
      auto tab = kary_table(base, ArityBound::finite(n));
      for (Mask s = 0; s < tab.derivable.size(); ++s) {
        auto gamma = uy->unmask(s);
        for (int phi = 0; phi < uy->size(); ++phi) {
          Verdict v = plus_kary_query(p, ArityBound::finite(n), gamma, uy->formulas[phi]);
          CHECK((v.truth == Truth::yes) == tab.holds(s, phi));
        }
      }
    }
  }
}

TEST_CASE("chain report on constants-only instances") {
  for (auto make :
       {preset_single_rule, preset_two_stage, preset_axiom_mix, preset_no_rules, preset_two_var}) {
    ExtensionProblem p(make(), {"y1"});
    auto rep = check_chain(p);
    INFO("instance: " << format_presentation(p.base()));
    for (const auto& f : rep.failures) INFO(f);
    CHECK(rep.ok());
  }
  // the staged-union instance, with its larger universe
  ExtensionProblem p(preset_staged_union(), {"y1"});
  auto rep = check_chain(p);
  CHECK(rep.ok());
  CHECK(rep.plus_arity == 5);
}

TEST_CASE("restriction towers: Z down to Y down to X") {
  for (auto make : {preset_single_rule, preset_two_stage}) {
    ExtensionProblem py(make(), {"y1"});
    ExtensionProblem pz(make(), {"y1", "z1"});
    auto minus_y = minus_table(py);
    auto minus_z = minus_table(pz);
    CHECK(restrict_table(minus_z, py.uy()) == minus_y);

    // restriction all the way down to Fm(X) is the base logic
    auto base_ct = closure_table(py.base(), py.ux());
    CHECK(restrict_table(minus_z, py.ux()) == base_ct);
    CHECK(is_conservative_extension(base_ct, minus_z).conservative);

    auto plus_y = plus_table(py);
    CHECK(restrict_table(plus_y, py.ux()) == base_ct);

    // the maximal construction also restricts to the maximal construction
    int n = base_arity_profile(py);
    auto plus_ny = kary_table(plus_y, ArityBound::finite(n));
    auto plus_nz = kary_table(plus_table(pz), ArityBound::finite(n));
    CHECK(restrict_table(plus_nz, py.uy()) == plus_ny);
  }
}

TEST_CASE("minimal and maximal constructions are natural extensions") {
  ExtensionProblem p(preset_two_stage(), {"y1"});
  int n = base_arity_profile(p);
  auto minus = minus_table(p);
  auto plus_n = kary_table(plus_table(p), ArityBound::finite(n));

  auto c1 = is_natural_extension(p, minus);
  INFO(c1.witness);
  CHECK(c1.ok());
  auto c2 = is_natural_extension(p, plus_n);
  CHECK(c2.ok());

  // a non-conservative strengthening is rejected with a witness
  auto uy = p.uy();
  auto broken = minus;
  Mask q = uy->mask_of(parse_list(p.over_y(), {"p"}));
  // force p |- s and re-close the table so only conservativity can fail
  for (Mask s = 0; s < broken.derivable.size(); ++s)
    if (is_subset(q, s))
      broken.derivable[s] |= Mask{1} << uy->find(parse_formula("s", uy->sig, uy->vars));
  auto c3 = is_natural_extension(p, broken);
  CHECK_FALSE(c3.ok());
  CHECK_FALSE(c3.conservative);
  CHECK_FALSE(c3.witness.empty());
}

TEST_CASE("natural-extension enumeration: moore scan on small universes") {
  ExtensionProblem p(preset_single_rule(), {"y"});
  auto lat = enumerate_natural_extensions(p);
  CHECK(lat.mode == "moore-scan");
  REQUIRE(!lat.extensions.empty());
  CHECK(lat.bottom >= 0);
  CHECK(lat.top >= 0);
  CHECK(lat.closed_under_sup_and_glb());

  auto minus = minus_table(p);
  int n = base_arity_profile(p);
  auto plus_n = kary_table(plus_table(p), ArityBound::finite(n));
  CHECK(lat.extensions[lat.bottom] == minus);
  CHECK(lat.extensions[lat.top] == plus_n);
  if (minus == plus_n) CHECK(lat.extensions.size() == 1);  // collapsed interval

  // every member sits between bottom and top
  for (std::size_t i = 0; i < lat.extensions.size(); ++i) {
    CHECK(table_subset(lat.extensions[lat.bottom], lat.extensions[i]));
    CHECK(table_subset(lat.extensions[i], lat.extensions[lat.top]));
  }
}

TEST_CASE("interval mode covers universes beyond the moore limit") {
  ExtensionProblem p(preset_two_stage(), {"y1"});  // |Fm(Y)| = 6
  auto lat = enumerate_natural_extensions(p);
  CHECK(lat.mode == "interval");
  CHECK(lat.bottom >= 0);
  CHECK(lat.top >= 0);
  CHECK(lat.closed_under_sup_and_glb());
}

TEST_CASE("suprema of extension families") {
  ExtensionProblem p(preset_two_stage(), {"y1"});
  int n = base_arity_profile(p);
  auto minus = minus_table(p);
  auto plus_n = kary_table(plus_table(p), ArityBound::finite(n));

  auto single = natext_sup({minus}, ArityBound::finite(n));
  CHECK(single == minus);
  auto both = natext_sup({minus, plus_n}, ArityBound::finite(n));
  CHECK(both == plus_n);
  auto glb = natext_glb({minus, plus_n}, ArityBound::finite(n));
  CHECK(glb == minus);
}

TEST_CASE("substitution-image relation can fail cut (frozen instance)") {
  // rules: g(x) => a and f(x), a => b. Over Y = {x, y1} the premises
  // {g(y1), f(x)} force a via x:=y1 and then b via x:=x, but no single
  // substitution covers both, so b is not reached in one step.
  auto base = parse_presentation(
      "sig a:0 b:0 f:1 g:1\n"
      "vars x\n"
      "rule g(x) => a\n"
      "rule f(x), a => b\n"
      "bounds depth=2 iters=100\n");
  ExtensionProblem p(base, {"y1"});
  const auto& ly = p.over_y();
  auto gamma = parse_list(ly, {"g(y1)", "f(x)"});
  Formula a = parse_formula("a", ly.sig, ly.vars);
  Formula b = parse_formula("b", ly.sig, ly.vars);

  CHECK(shoesmith_smiley(p, gamma, a).truth == Truth::yes);
  Verdict blocked = shoesmith_smiley(p, gamma, b);
  CHECK(blocked.truth == Truth::no);
  CHECK(blocked.exhaustive);

  auto extended = gamma;
  extended.push_back(a);
  CHECK(shoesmith_smiley(p, extended, b).truth == Truth::yes);

  // the saturation route reaches b directly: ss is strictly below minus here
  CHECK(minus_query(p, gamma, b).truth == Truth::yes);

  // packaged as a witness record, it replays
  WitnessRecord w;
  w.base = base;
  w.extend_vars = {"y1"};
  w.property = "ss-cut-failure";
  w.claims.push_back({"ss", 0, {"g(y1)", "f(x)"}, "a", {}, "", true});
  w.claims.push_back({"ss", 0, {"g(y1)", "f(x)", "a"}, "b", {}, "", true});
  w.claims.push_back({"ss", 0, {"g(y1)", "f(x)"}, "b", {}, "", false});
  w.claims.push_back({"cut-failure-ss", 0, {"g(y1)", "f(x)"}, "b", {"a"}, "", true});
  std::string why;
  CHECK(verify_witness(w, &why));
  INFO(why);

  // serialization round-trip preserves the claims
  auto parsed = parse_witness(format_witness(w));
  CHECK(format_witness(parsed) == format_witness(w));
  CHECK(verify_witness(parsed, &why));

  // the substitution-image operator on the probe set fails idempotence
  // exactly at the premise set
  auto probe = parse_list(ly, {"g(y1)", "f(x)", "a", "b"});
  auto e = ss_operator_on(p, probe);
  auto check = is_closure_operator(e, Exec::serial);
  CHECK(check.inflationary);
  CHECK(check.monotone);
  CHECK_FALSE(check.idempotent);
  REQUIRE(check.idempotent_witness.has_value());
  CHECK(*check.idempotent_witness == Mask{0b0011});  // {g(y1), f(x)}
  CHECK(is_closure_operator(idempotent_hull(e), Exec::serial).ok());
}

TEST_CASE("permutation-image relation can fail structurality (frozen instance)") {
  // rule f(x) => a; the pair {f(y1)} => a renames into Fm(X), but after
  // y1 := h(x, y1) no injective renaming fits both variables into X
  auto base = parse_presentation(
      "sig a:0 f:1 h:2\n"
      "vars x\n"
      "rule f(x) => a\n"
      "bounds depth=2 iters=100\n");
  ExtensionProblem p(base, {"y1", "y2"});
  const auto& ly = p.over_y();
  auto gamma = parse_list(ly, {"f(y1)"});
  Formula a = parse_formula("a", ly.sig, ly.vars);

  CHECK(los_suszko(p, gamma, a).truth == Truth::yes);

  auto sgamma = parse_list(ly, {"f(h(x, y1))"});
  Verdict after = los_suszko(p, sgamma, a);
  CHECK(after.truth == Truth::no);
  CHECK(after.exhaustive);

  // the structural closure still derives it, as it must
  CHECK(shoesmith_smiley(p, sgamma, a).truth == Truth::yes);

  WitnessRecord w;
  w.base = base;
  w.extend_vars = {"y1", "y2"};
  w.property = "ls-structurality-failure";
  w.claims.push_back({"ls", 0, {"f(y1)"}, "a", {}, "", true});
  w.claims.push_back({"ls", 0, {"f(h(x, y1))"}, "a", {}, "", false});
  w.claims.push_back({"structurality-failure-ls", 0, {"f(y1)"}, "a", {}, "y1=h(x, y1)", true});
  std::string why;
  CHECK(verify_witness(w, &why));
  INFO(why);
}

TEST_CASE("extension dispatch helper") {
  ExtensionProblem p(preset_single_rule(), {"y"});
  auto ext = make_extension(p, ExtKind::minus, ArityBound::omega(), true);
  REQUIRE(ext.table.has_value());
  const auto& ly = p.over_y();
  Formula a = parse_formula("a", ly.sig, ly.vars);
  Formula y = parse_formula("y", ly.sig, ly.vars);
  CHECK(ext.rel.query({y}, a).truth == Truth::yes);
  CHECK(ext.table->holds(p.uy()->mask_of({y}), p.uy()->find(a)));
  CHECK(ext_kind_from_string("plus") == ExtKind::plus);
  CHECK_THROWS(ext_kind_from_string("nope"));
}
