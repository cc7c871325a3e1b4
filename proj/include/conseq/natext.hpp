#pragma once

#include <optional>
#include <string>
#include <vector>

#include "conseq/logic.hpp"

namespace conseq {

/// A base logic over variables X together with a target variable list
/// Y = X + extra. All four extension constructions live on Fm(Y).
class ExtensionProblem {
 public:
  ExtensionProblem(LogicPresentation base, std::vector<std::string> extra_vars);

  const LogicPresentation& base() const { return base_; }
  const LogicPresentation& over_y() const { return over_y_; }
  const std::vector<std::string>& extra_vars() const { return extra_; }
  int x_size() const { return base_.vars.size(); }

  std::shared_ptr<const Universe> ux() const;
  std::shared_ptr<const Universe> uy() const;
  bool exact() const { return base_.constants_only(); }

 private:
  LogicPresentation base_;
  LogicPresentation over_y_;
  std::vector<std::string> extra_;
  mutable std::shared_ptr<const Universe> ux_, uy_;
};

// --- per-query constructions (any signature, three-valued) ----------------

/// Automorphism route: some variable permutation pushes a premise subset and
/// the goal into Fm(X) where the base derives them.
Verdict los_suszko(const ExtensionProblem& p, const std::vector<Formula>& gamma,
                   const Formula& goal);

/// Substitution-image route: some pattern pair over X and some v: X -> Fm(Y)
/// hit the premises and the goal. Pattern depth is bounded by the query, so
/// negative answers are exhaustive whenever base negatives are.
Verdict shoesmith_smiley(const ExtensionProblem& p, const std::vector<Formula>& gamma,
                         const Formula& goal);

/// Least consequence relation over Fm(Y) extending the base: rule saturation
/// with the extended variable list.
Verdict minus_query(const ExtensionProblem& p, const std::vector<Formula>& gamma,
                    const Formula& goal);

/// Every substitution Y -> Fm(X) maps the pair to a base consequence.
/// Exhaustive only for constants-only signatures.
Verdict plus_query(const ExtensionProblem& p, const std::vector<Formula>& gamma,
                   const Formula& goal);
Verdict plus_kary_query(const ExtensionProblem& p, ArityBound bound,
                        const std::vector<Formula>& gamma, const Formula& goal);

enum class ExtKind { ls, ss, minus, plus };
ExtKind ext_kind_from_string(const std::string& s);
std::string to_string(ExtKind k);

struct ExtensionRelation {
  ExtKind kind = ExtKind::minus;
  ArityBound arity = ArityBound::omega();
  ConsequenceRelation rel;
  std::optional<RelationTable> table;  // present on exact instances
};

ExtensionRelation make_extension(const ExtensionProblem& p, ExtKind kind,
                                 ArityBound arity = ArityBound::omega(),
                                 bool want_table = false);

// --- whole-relation tables (constants-only instances) ---------------------

RelationTable ls_table(const ExtensionProblem& p);
RelationTable ss_table(const ExtensionProblem& p);
/// Computed two independent ways (rule saturation over Y; idempotent hull of
/// the substitution-image operator) and cross-checked; disagreement throws.
RelationTable minus_table(const ExtensionProblem& p, Exec exec = Exec::parallel);
RelationTable plus_table(const ExtensionProblem& p, Exec exec = Exec::parallel);
RelationTable hull_table(const RelationTable& t);

/// E(Gamma) = substitution-image consequences, packaged for hull runs.
SetOperator ss_operator(const ExtensionProblem& p);

/// The same operator restricted to an explicit probe set of formulas.
/// Works on any signature, since the per-query search stays bounded;
/// this is how cut failures show up as idempotence failures.
SetOperator ss_operator_on(const ExtensionProblem& p, const std::vector<Formula>& probe);

/// Arity profile of the base logic (minimal n over the base universe).
int base_arity_profile(const ExtensionProblem& p);

struct ChainReport {
  bool ls_in_ss = false, ss_in_minus = false, minus_in_plus = false;
  bool ss_is_structural_closure_of_ls = false;
  bool minus_is_hull_of_ss = false;
  int plus_arity = 0;
  std::vector<std::string> failures;  // human-readable first witnesses
  bool ok() const {
    return ls_in_ss && ss_in_minus && minus_in_plus && ss_is_structural_closure_of_ls &&
           minus_is_hull_of_ss;
  }
};

/// Exhaustive comparison of all four relations over every premise set of
/// Fm(Y). Constants-only instances only.
ChainReport check_chain(const ExtensionProblem& p, Exec exec = Exec::parallel);

struct NatExtCheck {
  bool conservative = false;
  bool closure_ok = false;
  bool structural = false;
  bool arity_matches = false;
  int base_arity = 0, rel_arity = 0;
  std::string witness;
  bool ok() const { return conservative && closure_ok && structural && arity_matches; }
};

/// Conservative over Fm(X), same arity profile, passes closure and
/// structurality checks.
NatExtCheck is_natural_extension(const ExtensionProblem& p, const RelationTable& rel);

struct NatExtLattice {
  std::shared_ptr<const Universe> uy;
  std::vector<RelationTable> extensions;  // deterministic order (pair count, lex)
  int bottom = -1, top = -1;              // indices of the min/max constructions
  int arity = 0;                          // n used for the maximal construction
  std::string mode;                       // "moore-scan" or "interval"
  std::vector<std::vector<bool>> leq;
  std::vector<std::vector<int>> sup_of, glb_of;  // index into extensions, -1 = outside
  bool closed_under_sup_and_glb() const;
};

/// All natural extensions over Fm(Y): global Moore-family scan when
/// |Fm(Y)| <= 5, interval search between the minimal and maximal
/// constructions otherwise (completeness caveat recorded in `mode`).
NatExtLattice enumerate_natural_extensions(const ExtensionProblem& p, Exec exec = Exec::parallel);

/// Supremum of natural extensions: least common closed superset on small
/// premise sets, extended n-arily. Structurality of the result is checked
/// by callers, not assumed.
RelationTable natext_sup(const std::vector<RelationTable>& rels, ArityBound bound);
/// n-ary infimum: pointwise intersection on small sets, extended n-arily.
RelationTable natext_glb(const std::vector<RelationTable>& rels, ArityBound bound);

// --- replayable witnesses and counterexample search ------------------------

struct Claim {
  std::string kind;  // derive | ls | ss | minus | plus | cut-failure-ss |
                     // structurality-failure-ls | multiple-natexts
  int arity = 0;     // 0 = omega (derive and plus take a finite bound)
  std::vector<std::string> premises;
  std::string goal;
  std::vector<std::string> delta;  // cut-failure intermediate set
  std::string subst;               // structurality failure, "y=h(x,y)" style
  bool expect_yes = true;
};

struct WitnessRecord {
  LogicPresentation base;
  std::vector<std::string> extend_vars;
  std::string property;  // search property that produced it, "" if manual
  std::vector<Claim> claims;
};

/// Re-verifies every claim without search. False fills `why`.
bool verify_witness(const WitnessRecord& w, std::string* why = nullptr);

struct SearchConfig {
  std::uint64_t seed = 0;
  long budget = 200000;    // (candidate, probe) checks
  int max_extra_vars = 2;  // structurality probes need 2, the rest 1
  int max_rules = 2;       // rules per candidate presentation
};

struct SearchOutcome {
  std::optional<WitnessRecord> witness;
  long probes_used = 0;
  long candidates_seen = 0;
};

/// Deterministic seeded search over small presentations for the classical
/// failure modes. property is one of "ss-cut-failure",
/// "ls-structurality-failure", "multiple-natexts".
SearchOutcome search_counterexample(const std::string& property, const SearchConfig& cfg,
                                    Exec exec = Exec::parallel);

}  // namespace conseq
