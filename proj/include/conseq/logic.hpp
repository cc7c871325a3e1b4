#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "conseq/closure.hpp"
#include "conseq/subsets.hpp"
#include "conseq/term.hpp"

namespace conseq {

struct Rule {
  std::vector<Formula> premises;
  Formula conclusion = Formula::variable(0);
};

struct SearchBounds {
  int max_depth = 2;       // formula universe depth
  int max_iterations = 1000;  // saturation rounds / fact cap multiplier
};

/// A logic presented by finitely many rule schemes over a signature and an
/// ordered (finite, extensible) variable list.
struct LogicPresentation {
  Signature sig;
  VarSet vars;
  std::vector<Rule> rules;
  SearchBounds bounds;

  void validate() const;  // well-formed rules, nonempty vars, disjoint symbols
  bool constants_only() const { return sig.constants_only(); }

  /// Extension of the variable list; rules and signature are shared.
  LogicPresentation with_extra_vars(const std::vector<std::string>& extra) const;
};

/// True when forward chaining can never leave a depth-bounded fact set:
/// each rule's conclusion keeps every variable at most as deep as some
/// premise occurrence and has no fresh variables (ground axioms allowed).
bool rules_nondeepening(const LogicPresentation& l);

/// The enumerated formula universe of a presentation. `exact` means the
/// universe is provably closed under all rule instances, so saturation
/// fixpoints certify negative answers.
struct Universe {
  Signature sig;
  VarSet vars;
  int depth = 0;
  bool exact = false;
  std::vector<Formula> formulas;

  int size() const { return static_cast<int>(formulas.size()); }
  int find(const Formula& f) const;
  Mask mask_of(const std::vector<Formula>& fs) const;  // throws on out-of-universe
  std::vector<Formula> unmask(Mask m) const;
  std::shared_ptr<const Carrier> as_carrier() const;
};

std::shared_ptr<const Universe> make_universe(const LogicPresentation& l);

enum class Truth { yes, no, unknown };

struct DerivationStep {
  Formula derived = Formula::variable(0);
  int rule = -1;  // -1: member of the premise set
  Substitution subst;
  std::vector<Formula> used;  // instantiated premises
};

/// Replayable witness: steps in derivation order, last one derives the goal.
struct Derivation {
  std::vector<DerivationStep> steps;
};

/// Re-verifies a derivation step by step against the presentation.
bool replay_derivation(const LogicPresentation& l, const std::vector<Formula>& premises,
                       const Formula& goal, const Derivation& d, std::string* why = nullptr);

struct Verdict {
  Truth truth = Truth::unknown;
  bool exhaustive = false;  // a No that exhausted the search space
  std::optional<Derivation> derivation;
  std::string note;  // which bound was hit, for unknowns

  static Verdict yes(Derivation d) { return {Truth::yes, true, std::move(d), {}}; }
  static Verdict no_exhaustive() { return {Truth::no, true, std::nullopt, {}}; }
  static Verdict unknown(std::string note) {
    return {Truth::unknown, false, std::nullopt, std::move(note)};
  }
};

/// Forward-chaining saturation on explicit formula sets (premises matched
/// against derived facts). Sound for Yes always; No is exhaustive iff the
/// fact space is provably finite (constants-only signature or non-deepening
/// rules).
Verdict derive(const LogicPresentation& l, const std::vector<Formula>& premises,
               const Formula& goal);

/// One saturation, many membership queries. `closed` means the fixpoint was
/// reached within bounds; `exhaustive` additionally certifies that absent
/// facts are underivable.
struct SaturationResult {
  std::vector<Formula> facts;
  bool closed = false;
  bool exhaustive = false;
  bool contains(const Formula& f) const;
};
SaturationResult saturate(const LogicPresentation& l, const std::vector<Formula>& premises);

/// Least theory containing the given set, over the enumerated universe.
/// Requires an exact universe.
std::vector<Formula> theory_of(const LogicPresentation& l, const std::vector<Formula>& gamma);
bool is_theory(const LogicPresentation& l, const Universe& u, Mask t);

/// Saturation closure as an operator on the enumerated universe.
/// Requires an exact universe.
SetOperator as_closure_operator(const LogicPresentation& l,
                                std::shared_ptr<const Universe> u = nullptr);

/// Three-valued consequence-relation interface.
struct ConsequenceRelation {
  std::string description;
  ArityBound arity = ArityBound::omega();
  std::function<Verdict(const std::vector<Formula>&, const Formula&)> query;
};

/// Gamma |-_n phi  iff some Gamma' subseteq Gamma with |Gamma'| < n has
/// Gamma' |- phi. Reflexive, monotone and structural whenever the base is;
/// cut must be checked, not assumed.
ConsequenceRelation kary_part_of_logic(const LogicPresentation& l, ArityBound bound);

/// Whole relations over a small exact universe: derivable[premise mask] is
/// the mask of consequences. The workhorse for exhaustive theorem checks.
struct RelationTable {
  std::shared_ptr<const Universe> u;
  std::vector<Mask> derivable;

  int size() const { return u->size(); }
  bool holds(Mask gamma, int phi) const { return bit(derivable[gamma], phi); }
  bool operator==(const RelationTable& o) const { return derivable == o.derivable; }
};

/// Saturation closure of every premise set (parallel kernel with serial
/// reference). Requires exact universe.
RelationTable closure_table(const LogicPresentation& l, std::shared_ptr<const Universe> u,
                            Exec exec = Exec::parallel);

RelationTable kary_table(const RelationTable& t, ArityBound bound);
bool table_subset(const RelationTable& a, const RelationTable& b);
RelationTable reflexive_monotone_table(std::shared_ptr<const Universe> u);  // no rules

/// All substitutions of the universe's variables into universe formulas
/// whose homomorphic action stays inside the universe, as index maps.
std::vector<std::vector<int>> universe_endomorphisms(const Universe& u);

struct StructuralityReport {
  bool structural = true;
  // witness: substitution (as index map), premise mask, conclusion index
  std::vector<int> subst;
  Mask gamma = 0;
  int phi = -1;
};

StructuralityReport structurality_check(const RelationTable& t);

/// Minimal n with t equal to its n-ary part (scans n = 1 .. |universe|+1).
int arity_profile(const RelationTable& t);

/// Least reflexive, monotone, substitution-stable relation containing the
/// pairs of `t`. Not cut-closed in general.
RelationTable structural_closure(const RelationTable& t);

struct ConservativityReport {
  bool conservative = true;
  std::vector<Formula> gamma;
  Formula phi = Formula::variable(0);
  std::string direction;  // which implication failed
};

/// Checks both directions of Gamma |- phi <=> Gamma |-' phi over all
/// premise sets drawn from the small relation's universe.
ConservativityReport is_conservative_extension(const RelationTable& small,
                                               const RelationTable& big);

/// Embedding of a sub-universe (same signature, variable prefix) into a
/// bigger one; -1 entries mean the formula is missing above (never happens
/// when depths match).
std::vector<int> universe_embedding(const Universe& small, const Universe& big);

/// Restriction of a relation table to an embedded sub-universe.
RelationTable restrict_table(const RelationTable& big, std::shared_ptr<const Universe> small);

// --- presentation text format ------------------------------------------

LogicPresentation parse_presentation(const std::string& text);
LogicPresentation load_presentation(const std::string& path);
std::string format_presentation(const LogicPresentation& l);

// --- worked instances used across tests and the acceptance suite --------

/// Seven constants, rules {m11,m12}=>i1, {m21,m22}=>i2, {i1,i2}=>star.
/// The 3-ary part of this logic fails cut.
LogicPresentation preset_staged_union();
/// sig {a:0}, vars {x}, single rule x => a.
LogicPresentation preset_single_rule();
/// Constants p,q,i,s with rules {p,q}=>i, {i}=>s.
LogicPresentation preset_two_stage();
/// Constants a,b,c with rules => a (axiom), {x,a}=>b, {b,c}=>a.
LogicPresentation preset_axiom_mix();
/// No rules at all: pure reflexivity + monotonicity.
LogicPresentation preset_no_rules();
/// Two base variables: rules {x1,x2}=>a and {a,x1}=>b.
LogicPresentation preset_two_var();

}  // namespace conseq
