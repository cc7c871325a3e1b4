#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conseq/logic.hpp"

namespace conseq {

/// Deductively closed subsets of a finite structure: closed under every
/// valuation-image of every generating rule. For rule-generated logics this
/// coincides with closure under all derivable pairs.

struct StructInstance {
  Mask premises = 0;
  int conclusion = -1;
  int rule = -1;
};

/// All ground instances of the rules on a structure, one per distinct
/// (premise set, conclusion) pair.
std::vector<StructInstance> structure_instances(const LogicPresentation& l,
                                                const FiniteStructure& a);

struct FilterWitness {
  int rule = -1;
  std::map<int, int> valuation;  // rule variable -> carrier element
};

bool is_filter(const LogicPresentation& l, const FiniteStructure& a, Mask f,
               FilterWitness* witness = nullptr);

struct FilterLattice {
  std::vector<Mask> filters;  // ascending mask order
  bool contains(Mask f) const;
};

/// Exhaustive subset scan, |carrier| <= 16 (parallel kernel with serial
/// reference). The result is verified closed under pairwise intersection.
FilterLattice all_filters(const LogicPresentation& l, const FiniteStructure& a,
                          Exec exec = Exec::parallel);

/// Least filter containing a set. Computed two independent ways
/// (intersection over the filter lattice; rule-instance saturation on the
/// structure) which must agree.
Mask generated_filter(const LogicPresentation& l, const FiniteStructure& a, Mask s,
                      Exec exec = Exec::parallel);

bool is_homomorphism(const Signature& sig, const FiniteStructure& a, const FiniteStructure& b,
                     const std::vector<int>& map, std::string* why = nullptr);

struct NaturalityReport {
  bool ok = true;
  Mask failing_filter = 0;  // filter on B whose preimage is not a filter on A
};

/// Preimages of filters along a homomorphism are filters.
NaturalityReport check_naturality(const LogicPresentation& l, const FiniteStructure& a,
                                  const FiniteStructure& b, const std::vector<int>& map,
                                  Exec exec = Exec::parallel);

/// Fm(X) as a finite structure: carrier = enumerated universe, constants
/// interpret as themselves. Constants-only signatures.
FiniteStructure formula_algebra_structure(const LogicPresentation& l, const Universe& u);

struct FiltersTheoriesReport {
  bool equal = true;
  Mask witness = 0;
  std::string side;  // "filter-not-theory" or "theory-not-filter"
};

/// The filters on the formula algebra are exactly the theories; both sides
/// brute-forced through independent code paths.
FiltersTheoriesReport filters_equal_theories(const LogicPresentation& l,
                                             Exec exec = Exec::parallel);

struct AdjunctionReport {
  bool ok = true;
  std::string why;
};

/// The generated-filter map is left adjoint to the inclusion of the filter
/// lattice: gen(S) <= F iff S <= F for every filter F, gen is a closure
/// operator, gen fixes filters (f o g o f = f) and gen o gen = gen.
AdjunctionReport check_adjunction(const LogicPresentation& l, const FiniteStructure& a,
                                  Exec exec = Exec::parallel);

/// A declared, finite test family standing in for a lattice-valued
/// assignment: per structure an intersection family of subsets, plus
/// declared homomorphisms between the structures.
struct FilterPairInstance {
  struct Entry {
    FiniteStructure structure;
    std::vector<Mask> closed;  // sorted; intersection family on the carrier
  };
  struct HomEdge {
    int from = -1, to = -1;  // entry indices
    std::vector<int> map;
  };
  std::vector<Entry> entries;
  std::vector<HomEdge> homs;

  int entry_of(const std::string& name) const;
  /// Intersection-family axioms per entry, homomorphism checks, and
  /// closure of each family under preimages along the declared maps.
  void validate(const Signature& sig) const;
};

/// The canonical assignment: all filters on each declared structure.
FilterPairInstance canonical_filter_pair(const LogicPresentation& l,
                                         std::vector<FiniteStructure> structures,
                                         Exec exec = Exec::parallel);

/// Closure operator induced on one entry: least family member containing
/// the set.
SetOperator induced_operator(const FilterPairInstance& fp, int entry);

struct InitialityReport {
  bool ok = true;
  int entry = -1;
  Mask member = 0;  // family member that is not a filter
};

/// Every member of every declared family is a filter of the logic.
InitialityReport check_initiality(const LogicPresentation& l, const FilterPairInstance& fp);

/// Filters of a whole relation (given as a table) on its own formula
/// algebra: subsets stable under every substitution image of every
/// derivable pair.
std::vector<Mask> relation_filters_on_formula_algebra(const RelationTable& rel,
                                                      Exec exec = Exec::parallel);

/// Filters of a table relation on an arbitrary finite structure: subsets
/// stable under every valuation image of every derivable pair.
std::vector<Mask> relation_filters_on_structure(const RelationTable& rel,
                                                const FiniteStructure& a,
                                                Exec exec = Exec::parallel);

struct RoundtripReport {
  bool identity = true;
  std::string why;
};

/// Relation -> filter family on the formula algebra -> induced closure ->
/// relation again.
RoundtripReport theoryfamily_roundtrip(const RelationTable& rel, Exec exec = Exec::parallel);

// --- structure / homomorphism file format ---------------------------------

struct StructureFile {
  std::vector<FiniteStructure> structures;
  struct Hom {
    std::string from, to;
    std::vector<std::pair<std::string, std::string>> pairs;  // element -> element
  };
  std::vector<Hom> homs;

  const FiniteStructure* find(const std::string& name) const;
};

StructureFile parse_structures(const std::string& text, const Signature& sig);
StructureFile load_structures(const std::string& path, const Signature& sig);

}  // namespace conseq
