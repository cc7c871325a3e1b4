#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "conseq/filters.hpp"
#include "conseq/natext.hpp"

using namespace conseq;

// Seeded sweep over random constants-only presentations. Everything checked
// here is an identity the rest of the suite establishes on fixed instances;
// the sweep guards the implementation across the whole small-instance space.

namespace {

LogicPresentation random_instance(std::mt19937_64& rng) {
  int n_consts = 2 + static_cast<int>(rng() % 2);
  int n_vars = 1 + static_cast<int>(rng() % 2);
  std::vector<std::string> pool;
  std::ostringstream text;
  text << "sig";
  for (int i = 0; i < n_consts; ++i) {
    std::string c(1, static_cast<char>('a' + i));
    text << ' ' << c << ":0";
    pool.push_back(c);
  }
  text << "\nvars";
  for (int i = 0; i < n_vars; ++i) {
    std::string v = "x" + std::to_string(i + 1);
    text << ' ' << v;
    pool.push_back(v);
  }
  text << '\n';
  int n_rules = 1 + static_cast<int>(rng() % 3);
  std::set<std::string> seen;
  for (int r = 0; r < n_rules; ++r) {
    int n_prem = 1 + static_cast<int>(rng() % 2);
    std::set<std::string> prem;
    while (static_cast<int>(prem.size()) < n_prem) prem.insert(pool[rng() % pool.size()]);
    std::string concl = pool[rng() % pool.size()];
    std::string line;
    for (const auto& p : prem) line += (line.empty() ? "" : ", ") + p;
    line += " => " + concl;
    if (seen.insert(line).second) text << "rule " << line << '\n';
  }
  text << "bounds depth=0 iters=200\n";
  return parse_presentation(text.str());
}

}  // namespace

TEST_CASE("random-instance sweep: extension identities") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    auto l = random_instance(rng);
    ExtensionProblem p(l, {"w1"});
    INFO("instance:\n" << format_presentation(l));

    auto rep = check_chain(p);
    for (const auto& f : rep.failures) INFO(f);
    CHECK(rep.ok());

    int n = base_arity_profile(p);
    auto minus = minus_table(p);  // internally cross-checks both routes
    auto plus_n = kary_table(plus_table(p), ArityBound::finite(n));

    auto c1 = is_natural_extension(p, minus);
    INFO("minus: " << c1.witness << " base arity " << c1.base_arity << " rel arity "
                   << c1.rel_arity);
    CHECK(c1.ok());
    auto c2 = is_natural_extension(p, plus_n);
    CHECK(c2.ok());

    CHECK(theoryfamily_roundtrip(minus).identity);
    CHECK(theoryfamily_roundtrip(plus_n).identity);
  }
}

TEST_CASE("random-instance sweep: filters, theories, adjunction") {
  std::mt19937_64 rng(4096);
  for (int trial = 0; trial < 40; ++trial) {
    auto l = random_instance(rng);
    INFO("instance:\n" << format_presentation(l));
    CHECK(filters_equal_theories(l).equal);
    auto u = make_universe(l);
    auto rep = check_adjunction(l, formula_algebra_structure(l, *u));
    INFO(rep.why);
    CHECK(rep.ok);
  }
}

TEST_CASE("random-instance sweep: saturation engines agree") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 25; ++trial) {
    auto l = random_instance(rng);
    auto u = make_universe(l);
    auto ct = closure_table(l, u);
    for (Mask s = 0; s < ct.derivable.size(); ++s) {
      auto sat = saturate(l, u->unmask(s));
      CHECK(sat.exhaustive);
      CHECK(u->mask_of(sat.facts) == ct.derivable[s]);
    }
  }
}

TEST_CASE("malformed presentation text never crashes, always throws") {
  std::vector<std::string> bad = {
      "sig a:\nvars x\n",
      "sig a:0\nvars x\nrule => \n",
      "sig a:0\nvars x\nrule f(a) => a\n",
      "sig a:0 a:0\nvars x\n",
      "sig a:0\nvars x x\n",
      "sig a:0\nvars x\nrule a =>\n",
      "sig a:-1\nvars x\n",
      "bounds depth=zz\n",
  };
  for (const auto& text : bad) {
    INFO(text);
    CHECK_THROWS_AS(parse_presentation(text), std::exception);
  }
}
