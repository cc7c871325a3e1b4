#include <doctest.h>

#include <random>

#include "conseq/term.hpp"

using namespace conseq;

namespace {

Signature sig_fa() { return Signature({{"f", 2}, {"g", 1}, {"a", 0}, {"b", 0}}); }
VarSet vars_xy() { return VarSet({"x", "y"}); }

Formula parse(const std::string& s) {
  static Signature sig = sig_fa();
  static VarSet vars = vars_xy();
  return parse_formula(s, sig, vars);
}

// seeded random formulas for property checks
Formula random_formula(std::mt19937_64& rng, int depth) {
  int pick = static_cast<int>(rng() % (depth > 0 ? 4 : 3));
  switch (pick) {
    case 0: return Formula::variable(static_cast<int>(rng() % 2));
    case 1: return Formula::constant(2);  // a
    case 2: return Formula::constant(3);  // b
    default: {
      if (rng() % 2)
        return Formula::apply(1, {random_formula(rng, depth - 1)});
      return Formula::apply(0, {random_formula(rng, depth - 1), random_formula(rng, depth - 1)});
    }
  }
}

Substitution random_subst(std::mt19937_64& rng) {
  Substitution s;
  for (int v = 0; v < 2; ++v)
    if (rng() % 2) s.set(v, random_formula(rng, 2));
  return s;
}

}  // namespace

TEST_CASE("parser round-trips and rejects malformed input") {
  Signature sig = sig_fa();
  VarSet vars = vars_xy();

  Formula f = parse("f(x, a)");
  CHECK(f.conn() == 0);
  CHECK(f.args().size() == 2);
  CHECK(f.args()[0] == Formula::variable(0));
  CHECK(f.args()[1] == Formula::constant(2));
  CHECK(format_formula(f, sig, vars) == "f(x, a)");

  CHECK(parse("x") == Formula::variable(0));
  CHECK(parse(" g ( g ( b ) ) ") == parse("g(g(b))"));

  CHECK_THROWS_AS(parse("f(x)"), ParseError);        // arity mismatch
  CHECK_THROWS_AS(parse("h(x)"), ParseError);        // unknown symbol
  CHECK_THROWS_AS(parse("f(x, a) b"), ParseError);   // trailing input
  CHECK_THROWS_AS(parse("f(x,, a)"), ParseError);
  CHECK_THROWS_AS(parse("f"), ParseError);           // constant use of a binary symbol

  // error position points at the offending token
  try {
    parse("f(x, h)");
  } catch (const ParseError& e) {
    CHECK(e.pos == 5);
  }
}

TEST_CASE("substitution acts homomorphically") {
  Formula f = parse("f(x, x)");
  Substitution id;
  CHECK(id(f) == f);

  Substitution s;
  s.set(0, parse("g(y)"));
  CHECK(s(f) == parse("f(g(y), g(y))"));
  CHECK(s(parse("a")) == parse("a"));

  // composition law on random inputs
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    Substitution sa = random_subst(rng), sb = random_subst(rng);
    Formula phi = random_formula(rng, 3);
    CHECK(sa(sb(phi)) == sa.then_after(sb)(phi));
  }
}

TEST_CASE("matching is one-sided and unique") {
  auto m = match(parse("f(x, x)"), parse("f(a, a)"));
  REQUIRE(m.has_value());
  CHECK((*m)(parse("f(x, x)")) == parse("f(a, a)"));

  CHECK_FALSE(match(parse("f(x, x)"), parse("f(a, b)")).has_value());
  auto any = match(parse("x"), parse("f(g(a), y)"));
  REQUIRE(any.has_value());
  CHECK((*any)(parse("x")) == parse("f(g(a), y)"));

  // match after substitute succeeds and reproduces the instance
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    Formula pattern = random_formula(rng, 2);
    Substitution s = random_subst(rng);
    Formula target = s(pattern);
    auto got = match(pattern, target);
    REQUIRE(got.has_value());
    CHECK((*got)(pattern) == target);
  }
}

TEST_CASE("formula enumeration is exhaustive, ordered and duplicate-free") {
  Signature consts({{"a", 0}, {"b", 0}});
  VarSet vars({"x"});
  auto u0 = enumerate_formulas(consts, vars, 0);
  REQUIRE(u0.size() == 3);
  CHECK(format_formula(u0[0], consts, vars) == "a");
  CHECK(format_formula(u0[1], consts, vars) == "b");
  CHECK(format_formula(u0[2], consts, vars) == "x");

  Signature unary({{"a", 0}, {"f", 1}});
  VarSet none({"z"});
  auto u2 = enumerate_formulas(unary, VarSet(std::vector<std::string>{}), 2);
  REQUIRE(u2.size() == 3);
  CHECK(format_formula(u2[2], unary, none) == "f(f(a))");

  CHECK(enumerate_formulas(Signature({{"f", 1}}), VarSet(std::vector<std::string>{}), 0).empty());

  auto big = enumerate_formulas(sig_fa(), vars_xy(), 2);
  for (std::size_t i = 0; i < big.size(); ++i)
    for (std::size_t j = i + 1; j < big.size(); ++j) CHECK(!(big[i] == big[j]));
  // downward closed under subterms and depth-sorted
  for (std::size_t i = 0; i + 1 < big.size(); ++i) CHECK(big[i].depth() <= big[i + 1].depth());
  for (const auto& f : big)
    for (const auto& arg : f.args())
      CHECK(std::find(big.begin(), big.end(), arg) != big.end());
}

TEST_CASE("substitution enumeration counts") {
  auto base = enumerate_formulas(Signature({{"a", 0}, {"b", 0}}), VarSet(std::vector<std::string>{}), 0);
  CHECK(enumerate_substitutions({0}, std::vector<Formula>{base[0]}).size() == 1);
  CHECK(enumerate_substitutions({0, 1}, base).size() == 4);
  auto empty_domain = enumerate_substitutions({}, base);
  REQUIRE(empty_domain.size() == 1);
  CHECK(empty_domain[0].empty());
}

TEST_CASE("evaluation is homomorphic and commutes with substitution") {
  Signature sig({{"and", 2}, {"one", 0}, {"zero", 0}});
  VarSet vars({"x", "y"});
  FiniteStructure b2("B2", sig, {"0", "1"});
  b2.define(1, {}, 1);
  b2.define(2, {}, 0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) b2.define(0, {i, j}, i & j);
  CHECK(b2.fully_defined(sig));

  Formula one = Formula::constant(1);
  CHECK(evaluate({}, one, b2) == 1);
  CHECK(evaluate({{0, 1}}, Formula::variable(0), b2) == 1);
  Formula xy = parse_formula("and(x, y)", sig, vars);
  CHECK(evaluate({{0, 1}, {1, 0}}, xy, b2) == 0);
  CHECK_THROWS(evaluate({}, xy, b2));

  // evaluate(v, subst(s, phi)) == evaluate(v o s, phi)
  std::mt19937_64 rng(23);
  auto rnd = [&](auto&& self, int d) -> Formula {
    int pick = static_cast<int>(rng() % (d > 0 ? 4 : 3));
    if (pick == 0) return Formula::variable(static_cast<int>(rng() % 2));
    if (pick == 1) return Formula::constant(1);
    if (pick == 2) return Formula::constant(2);
    return Formula::apply(0, {self(self, d - 1), self(self, d - 1)});
  };
  for (int i = 0; i < 200; ++i) {
    Formula phi = rnd(rnd, 3);
    Substitution s;
    for (int v = 0; v < 2; ++v)
      if (rng() % 2) s.set(v, rnd(rnd, 2));
    std::map<int, int> val{{0, static_cast<int>(rng() % 2)}, {1, static_cast<int>(rng() % 2)}};
    std::map<int, int> composed;
    for (int v = 0; v < 2; ++v) {
      const Formula* img = s.find(v);
      composed[v] = img ? evaluate(val, *img, b2) : val[v];
    }
    CHECK(evaluate(val, s(phi), b2) == evaluate(composed, phi, b2));
  }
}

TEST_CASE("signature and variable invariants are enforced") {
  CHECK_THROWS(Signature({{"a", 0}, {"a", 1}}));
  CHECK_THROWS(VarSet({"x", "x"}));
  CHECK_THROWS(check_disjoint(Signature({{"x", 0}}), VarSet({"x"})));
  CHECK_NOTHROW(check_disjoint(sig_fa(), vars_xy()));
}
