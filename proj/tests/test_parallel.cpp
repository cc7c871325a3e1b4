#include <doctest.h>

#include "conseq/filters.hpp"
#include "conseq/natext.hpp"

using namespace conseq;

// The OpenMP kernels must reproduce the serial reference bit for bit.

TEST_CASE("closure tables: parallel equals serial") {
  for (auto make : {preset_staged_union, preset_two_stage, preset_axiom_mix}) {
    auto l = make();
    auto u = make_universe(l);
    auto a = closure_table(l, u, Exec::serial);
    auto b = closure_table(l, u, Exec::parallel);
    CHECK(a == b);
  }
}

TEST_CASE("extension tables: parallel equals serial") {
  ExtensionProblem p(preset_two_stage(), {"y1"});
  CHECK(minus_table(p, Exec::serial) == minus_table(p, Exec::parallel));
  CHECK(plus_table(p, Exec::serial) == plus_table(p, Exec::parallel));
}

TEST_CASE("filter enumeration on a mid-sized carrier: parallel equals serial") {
  auto l = parse_presentation(
      "sig a:0 b:0\n"
      "vars x\n"
      "rule x, a => b\n");
  std::vector<std::string> labels;
  for (int i = 0; i < 12; ++i) labels.push_back("e" + std::to_string(i));
  FiniteStructure s("M", l.sig, labels);
  s.define(0, {}, 0);
  s.define(1, {}, 1);
  auto fast = all_filters(l, s, Exec::parallel);
  auto slow = all_filters(l, s, Exec::serial);
  CHECK(fast.filters == slow.filters);
  CHECK(!fast.filters.empty());
}

TEST_CASE("moore-family enumeration: parallel equals serial") {
  for (int n = 3; n <= 5; ++n)
    CHECK(moore_families(n, Exec::parallel) == moore_families(n, Exec::serial));
}

TEST_CASE("operator checks pick the same witness regardless of scheduling") {
  auto c = std::make_shared<Carrier>();
  for (int i = 0; i < 14; ++i) c->labels.push_back(std::to_string(i));
  // inflationary, monotone, not idempotent: one propagation step per call
  SetOperator op(c, [](Mask s) {
    Mask out = s;
    for (int i = 0; i + 1 < 14; ++i)
      if (bit(s, i)) out |= Mask{1} << (i + 1);
    return out;
  });
  auto a = is_closure_operator(op, Exec::serial);
  auto b = is_closure_operator(op, Exec::parallel);
  CHECK(a.idempotent == b.idempotent);
  CHECK(a.idempotent_witness == b.idempotent_witness);
  CHECK_FALSE(a.idempotent);

  auto [ia, wa] = is_idempotent(op, Exec::serial);
  auto [ib, wb] = is_idempotent(op, Exec::parallel);
  CHECK(ia == ib);
  CHECK(wa == wb);
}

TEST_CASE("natural-extension enumeration: parallel equals serial") {
  ExtensionProblem p(preset_single_rule(), {"y"});
  auto a = enumerate_natural_extensions(p, Exec::serial);
  auto b = enumerate_natural_extensions(p, Exec::parallel);
  REQUIRE(a.extensions.size() == b.extensions.size());
  for (std::size_t i = 0; i < a.extensions.size(); ++i)
    CHECK(a.extensions[i] == b.extensions[i]);
  CHECK(a.bottom == b.bottom);
  CHECK(a.top == b.top);
}
