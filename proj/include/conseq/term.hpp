#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace conseq {

struct ParseError : std::runtime_error {
  std::size_t pos;
  ParseError(const std::string& what, std::size_t p) : std::runtime_error(what), pos(p) {}
};

struct Connective {
  std::string name;
  int arity = 0;
};

/// A ranked alphabet. Declaration order is the canonical symbol order.
class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<Connective> conns);

  int size() const { return static_cast<int>(conns_.size()); }
  const Connective& at(int i) const { return conns_[i]; }
  const std::vector<Connective>& connectives() const { return conns_; }
  int index_of(const std::string& name) const;  // -1 if absent
  bool constants_only() const;

 private:
  std::vector<Connective> conns_;
  std::unordered_map<std::string, int> by_name_;
};

/// Ordered variable list; the order drives every deterministic enumeration.
class VarSet {
 public:
  VarSet() = default;
  explicit VarSet(std::vector<std::string> names);

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& at(int i) const { return names_[i]; }
  const std::vector<std::string>& names() const { return names_; }
  int index_of(const std::string& name) const;
  bool contains(const std::string& name) const { return index_of(name) >= 0; }

  /// this extended by extra names (duplicates rejected).
  VarSet extended(const std::vector<std::string>& extra) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> by_name_;
};

void check_disjoint(const Signature& sig, const VarSet& vars);

/// Immutable first-order term: a variable leaf or a connective applied to
/// exactly arity-many children. Structural equality, cached hash and depth.
class Formula {
 public:
  static Formula variable(int var_index);
  static Formula apply(int conn_index, std::vector<Formula> args);
  static Formula constant(int conn_index) { return apply(conn_index, {}); }

  bool is_variable() const { return sym_ < 0; }
  int var() const { return ~sym_; }
  int conn() const { return sym_; }
  const std::vector<Formula>& args() const { return args_; }
  int depth() const { return depth_; }
  std::size_t hash() const { return hash_; }

  bool operator==(const Formula& o) const;
  bool operator!=(const Formula& o) const { return !(*this == o); }

  /// Set of variable indices occurring in the formula, sorted.
  std::vector<int> variables() const;
  bool uses_only(int num_vars) const;  // all variable indices < num_vars

 private:
  Formula(std::int32_t sym, std::vector<Formula> args);
  std::int32_t sym_;  // >= 0: connective index, < 0: ~variable index
  std::vector<Formula> args_;
  int depth_;
  std::size_t hash_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

/// Total order: depth first, then root symbol, then children lexicographically.
bool formula_less(const Formula& a, const Formula& b);

std::string format_formula(const Formula& f, const Signature& sig, const VarSet& vars);
Formula parse_formula(const std::string& text, const Signature& sig, const VarSet& vars);

/// Finite map variable -> formula; unmapped variables are fixed.
class Substitution {
 public:
  Substitution() = default;

  static Substitution identity() { return {}; }
  void set(int var_index, Formula image);
  const Formula* find(int var_index) const;
  const std::map<int, Formula>& mapping() const { return map_; }
  bool empty() const { return map_.empty(); }

  Formula operator()(const Formula& f) const;

  /// Composition: (a.then_after(b))(f) == a(b(f)).
  Substitution then_after(const Substitution& inner) const;

 private:
  std::map<int, Formula> map_;
};

/// One-sided first-order matching: the unique v with v(pattern) == target,
/// if it exists.
std::optional<Substitution> match(const Formula& pattern, const Formula& target);

/// All formulas of depth <= max_depth, deterministically ordered
/// (constants before variables at depth 0, then level by level in
/// declaration/lexicographic order). Closed downward under subterms.
std::vector<Formula> enumerate_formulas(const Signature& sig, const VarSet& vars, int max_depth);

/// All |codomain|^|domain| substitutions with the given domain, in
/// mixed-radix order (last domain variable varies fastest).
std::vector<Substitution> enumerate_substitutions(const std::vector<int>& domain,
                                                  const std::vector<Formula>& codomain);

/// A finite interpretation of a signature.
class FiniteStructure {
 public:
  FiniteStructure() = default;
  FiniteStructure(std::string name, const Signature& sig, std::vector<std::string> carrier);

  const std::string& name() const { return name_; }
  int size() const { return static_cast<int>(carrier_.size()); }
  const std::vector<std::string>& carrier() const { return carrier_; }
  int element_index(const std::string& label) const;

  void define(int conn_index, const std::vector<int>& args, int value);
  bool fully_defined(const Signature& sig, std::string* missing = nullptr) const;
  int interp(int conn_index, std::span<const int> args) const;

 private:
  std::string name_;
  std::vector<std::string> carrier_;
  std::vector<std::vector<int>> tables_;  // tables_[conn][mixed radix args]
  std::vector<std::vector<bool>> defined_;
};

/// Homomorphic evaluation under a valuation of the variables.
int evaluate(const std::map<int, int>& valuation, const Formula& f, const FiniteStructure& a);

}  // namespace conseq
