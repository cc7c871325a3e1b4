#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "conseq/subsets.hpp"

namespace conseq {

/// Finite ordered carrier an operator acts on. Elements are labels; subsets
/// are bitmasks over the label positions.
struct Carrier {
  std::vector<std::string> labels;
  int size() const { return static_cast<int>(labels.size()); }
  Mask full() const { return full_mask(size()); }
};

/// Arity bound: a finite n (every consequence has a witness subset of size
/// < n) or omega (no bound; on finite carriers this is "unbounded").
struct ArityBound {
  int n = 0;  // 0 encodes omega
  static ArityBound omega() { return {0}; }
  static ArityBound finite(int n) { return {n}; }
  bool is_omega() const { return n == 0; }
  bool operator==(const ArityBound&) const = default;
};

/// Execution mode for the enumeration kernels. Parallel variants must return
/// bit-identical results to the serial reference; tests compare them.
enum class Exec { serial, parallel };

/// Inflationary monotone self-map of a powerset, lazy with a memo table.
/// Closure operators are SetOperators that additionally pass the idempotence
/// check; the factory functions below say which invariants are guaranteed
/// by construction.
class SetOperator {
 public:
  SetOperator() = default;
  SetOperator(std::shared_ptr<const Carrier> carrier, std::function<Mask(Mask)> fn,
              ArityBound arity = ArityBound::omega());

  const Carrier& carrier() const { return *carrier_; }
  std::shared_ptr<const Carrier> carrier_ptr() const { return carrier_; }
  ArityBound arity() const { return arity_; }

  Mask operator()(Mask s) const;

  /// Materialized table over all 2^n subsets (n <= 20 enforced).
  const std::vector<Mask>& table() const;
  bool same_carrier(const SetOperator& o) const;

 private:
  std::shared_ptr<const Carrier> carrier_;
  std::function<Mask(Mask)> fn_;
  ArityBound arity_;
  struct Memo {
    std::mutex mu;
    std::unordered_map<Mask, Mask> map;
    std::optional<std::vector<Mask>> table;
  };
  std::shared_ptr<Memo> memo_ = std::make_shared<Memo>();
};

/// Family of subsets closed under arbitrary intersections and containing the
/// full carrier (empty intersection convention). Stored sorted.
struct IntersectionFamily {
  std::shared_ptr<const Carrier> carrier;
  std::vector<Mask> closed;

  void validate() const;  // throws if not intersection-closed or top missing
  bool contains(Mask s) const;
};

/// c_I(A) = least member of I containing A.
SetOperator family_to_operator(const IntersectionFamily& fam);

/// Fixed points of c. Exhaustive, so carrier <= 16.
IntersectionFamily operator_to_family(const SetOperator& op);

SetOperator constant_top_operator(std::shared_ptr<const Carrier> c);
SetOperator identity_operator(std::shared_ptr<const Carrier> c);

/// S -> union of op(S') over S' subseteq S with |S'| < bound. Inflationary
/// and monotone whenever op is; idempotence is NOT guaranteed for finite
/// bounds and must be checked via is_idempotent.
SetOperator kary_part(const SetOperator& op, ArityBound bound);

/// Infimum of nonempty family among bound-ary operators:
/// pointwise intersection on small subsets, extended bound-arily.
SetOperator meet(const std::vector<SetOperator>& ops, ArityBound bound);

/// Supremum of an (upward directed) family: pointwise union on small
/// subsets, extended bound-arily. The caller asserts directedness.
SetOperator join_directed(const std::vector<SetOperator>& ops, ArityBound bound);

/// General supremum: closure by the intersection of the fixed-point
/// families, extended bound-arily. Exhaustive (carrier <= 16).
SetOperator join_general(const std::vector<SetOperator>& ops, ArityBound bound);

/// Least idempotent operator above an inflationary monotone op: iterate
/// until the image stabilizes (at most |carrier| proper steps).
SetOperator idempotent_hull(const SetOperator& op);

struct OperatorCheck {
  bool inflationary = true;
  bool monotone = true;
  bool idempotent = true;
  // first failing subset in mask order, per property
  std::optional<Mask> inflationary_witness, monotone_witness, idempotent_witness;
  bool exhaustive = true;  // false when the carrier forced sampling
  bool ok() const { return inflationary && monotone && idempotent; }
};

/// Exhaustive when the carrier is at most exhaustive_threshold elements,
/// seeded sampling of `samples` subsets otherwise.
OperatorCheck is_closure_operator(const SetOperator& op, Exec exec = Exec::parallel,
                                  int exhaustive_threshold = 16, int samples = 10000,
                                  std::uint64_t seed = 0);

/// Idempotence alone; same check regime. Returns witness subset on failure.
std::pair<bool, std::optional<Mask>> is_idempotent(const SetOperator& op,
                                                   Exec exec = Exec::parallel,
                                                   int exhaustive_threshold = 16,
                                                   int samples = 10000, std::uint64_t seed = 0);

/// All Moore families on a carrier of size n <= 5, as family bitsets
/// (bit i set <=> subset-mask i belongs to the family), ascending order.
std::vector<std::uint64_t> moore_families(int n, Exec exec = Exec::parallel);

/// Same count by a naive generate-and-filter pass over all 2^(2^n)
/// candidate families; only feasible for n <= 4. Independent oracle.
std::uint64_t moore_family_count_naive(int n);

/// Moore families as closure operators (hard limit |carrier| <= 5).
std::vector<SetOperator> enumerate_closure_operators(std::shared_ptr<const Carrier> carrier,
                                                     Exec exec = Exec::parallel);

std::uint64_t family_bits_of(const SetOperator& op);
IntersectionFamily family_from_bits(std::shared_ptr<const Carrier> carrier, std::uint64_t bits);

/// Pointwise order on materialized tables.
bool operator_leq(const SetOperator& a, const SetOperator& b);

}  // namespace conseq
