#include "conseq/term.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace conseq {

namespace {

bool valid_symbol(const std::string& s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

}  // namespace

Signature::Signature(std::vector<Connective> conns) : conns_(std::move(conns)) {
  for (int i = 0; i < static_cast<int>(conns_.size()); ++i) {
    const auto& c = conns_[i];
    if (!valid_symbol(c.name)) throw std::invalid_argument("bad connective name: " + c.name);
    if (c.arity < 0) throw std::invalid_argument("negative arity: " + c.name);
    if (!by_name_.emplace(c.name, i).second)
      throw std::invalid_argument("duplicate connective: " + c.name);
  }
}

int Signature::index_of(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

bool Signature::constants_only() const {
  return std::all_of(conns_.begin(), conns_.end(), [](const Connective& c) { return c.arity == 0; });
}

VarSet::VarSet(std::vector<std::string> names) : names_(std::move(names)) {
  for (int i = 0; i < static_cast<int>(names_.size()); ++i) {
    if (!valid_symbol(names_[i])) throw std::invalid_argument("bad variable name: " + names_[i]);
    if (!by_name_.emplace(names_[i], i).second)
      throw std::invalid_argument("duplicate variable: " + names_[i]);
  }
}

int VarSet::index_of(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

VarSet VarSet::extended(const std::vector<std::string>& extra) const {
  std::vector<std::string> all = names_;
  for (const auto& v : extra) {
    if (contains(v)) throw std::invalid_argument("variable already declared: " + v);
    all.push_back(v);
  }
  return VarSet(all);
}

void check_disjoint(const Signature& sig, const VarSet& vars) {
  for (const auto& v : vars.names())
    if (sig.index_of(v) >= 0)
      throw std::invalid_argument("symbol is both connective and variable: " + v);
}

Formula::Formula(std::int32_t sym, std::vector<Formula> args) : sym_(sym), args_(std::move(args)) {
  depth_ = 0;
  std::size_t h = sym_ >= 0 ? 0x9e3779b97f4a7c15ull : 0x2545f4914f6cdd1dull;
  h ^= static_cast<std::size_t>(sym_ >= 0 ? sym_ : ~sym_) + 0x9e3779b9;
  for (const auto& a : args_) {
    depth_ = std::max(depth_, a.depth_ + 1);
    h = h * 1099511628211ull + a.hash_;
  }
  hash_ = h;
}

Formula Formula::variable(int var_index) {
  if (var_index < 0) throw std::invalid_argument("negative variable index");
  return Formula(~var_index, {});
}

Formula Formula::apply(int conn_index, std::vector<Formula> args) {
  if (conn_index < 0) throw std::invalid_argument("negative connective index");
  return Formula(conn_index, std::move(args));
}

bool Formula::operator==(const Formula& o) const {
  if (hash_ != o.hash_ || sym_ != o.sym_ || args_.size() != o.args_.size()) return false;
  for (std::size_t i = 0; i < args_.size(); ++i)
    if (!(args_[i] == o.args_[i])) return false;
  return true;
}

std::vector<int> Formula::variables() const {
  std::vector<int> out;
  if (is_variable()) {
    out.push_back(var());
  } else {
    for (const auto& a : args_) {
      auto sub = a.variables();
      out.insert(out.end(), sub.begin(), sub.end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool Formula::uses_only(int num_vars) const {
  if (is_variable()) return var() < num_vars;
  return std::all_of(args_.begin(), args_.end(),
                     [&](const Formula& a) { return a.uses_only(num_vars); });
}

bool formula_less(const Formula& a, const Formula& b) {
  if (a.depth() != b.depth()) return a.depth() < b.depth();
  // variables sort after connective-rooted formulas of the same depth
  bool av = a.is_variable(), bv = b.is_variable();
  if (av != bv) return bv;
  if (av) return a.var() < b.var();
  if (a.conn() != b.conn()) return a.conn() < b.conn();
  for (std::size_t i = 0; i < std::min(a.args().size(), b.args().size()); ++i) {
    if (a.args()[i] == b.args()[i]) continue;
    return formula_less(a.args()[i], b.args()[i]);
  }
  return a.args().size() < b.args().size();
}

std::string format_formula(const Formula& f, const Signature& sig, const VarSet& vars) {
  if (f.is_variable()) return vars.at(f.var());
  std::string out = sig.at(f.conn()).name;
  if (!f.args().empty()) {
    out += '(';
    for (std::size_t i = 0; i < f.args().size(); ++i) {
      if (i) out += ", ";
      out += format_formula(f.args()[i], sig, vars);
    }
    out += ')';
  }
  return out;
}

namespace {

struct Parser {
  const std::string& text;
  const Signature& sig;
  const VarSet& vars;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

  std::string symbol() {
    skip_ws();
    std::size_t start = pos;
    if (pos >= text.size()) fail("expected symbol, found end of input");
    char c = text[pos];
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) fail("expected symbol");
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    return text.substr(start, pos - start);
  }

  Formula formula() {
    skip_ws();
    std::size_t sym_pos = pos;
    std::string name = symbol();
    skip_ws();
    if (pos < text.size() && text[pos] == '(') {
      int ci = sig.index_of(name);
      if (ci < 0) {
        pos = sym_pos;
        fail("unknown connective: " + name);
      }
      ++pos;  // '('
      std::vector<Formula> args;
      skip_ws();
      if (pos < text.size() && text[pos] == ')') fail("empty argument list");
      while (true) {
        args.push_back(formula());
        skip_ws();
        if (pos < text.size() && text[pos] == ',') {
          ++pos;
          continue;
        }
        if (pos < text.size() && text[pos] == ')') {
          ++pos;
          break;
        }
        fail("expected ',' or ')'");
      }
      if (static_cast<int>(args.size()) != sig.at(ci).arity) {
        pos = sym_pos;
        fail("arity mismatch for " + name + ": expected " + std::to_string(sig.at(ci).arity) +
             ", got " + std::to_string(args.size()));
      }
      return Formula::apply(ci, std::move(args));
    }
    int vi = vars.index_of(name);
    if (vi >= 0) return Formula::variable(vi);
    int ci = sig.index_of(name);
    if (ci >= 0) {
      if (sig.at(ci).arity != 0) {
        pos = sym_pos;
        fail("arity mismatch for " + name + ": expected " + std::to_string(sig.at(ci).arity) +
             ", got 0");
      }
      return Formula::constant(ci);
    }
    pos = sym_pos;
    fail("unknown symbol: " + name);
  }
};

}  // namespace

Formula parse_formula(const std::string& text, const Signature& sig, const VarSet& vars) {
  Parser p{text, sig, vars};
  Formula f = p.formula();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return f;
}

void Substitution::set(int var_index, Formula image) {
  map_.insert_or_assign(var_index, std::move(image));
}

const Formula* Substitution::find(int var_index) const {
  auto it = map_.find(var_index);
  return it == map_.end() ? nullptr : &it->second;
}

Formula Substitution::operator()(const Formula& f) const {
  if (f.is_variable()) {
    if (const Formula* img = find(f.var())) return *img;
    return f;
  }
  if (f.args().empty()) return f;
  std::vector<Formula> args;
  args.reserve(f.args().size());
  for (const auto& a : f.args()) args.push_back((*this)(a));
  return Formula::apply(f.conn(), std::move(args));
}

Substitution Substitution::then_after(const Substitution& inner) const {
  Substitution out;
  for (const auto& [v, img] : inner.map_) out.set(v, (*this)(img));
  for (const auto& [v, img] : map_)
    if (!inner.find(v)) out.set(v, img);
  return out;
}

namespace {

bool match_into(const Formula& pattern, const Formula& target, Substitution& acc) {
  if (pattern.is_variable()) {
    if (const Formula* bound = acc.find(pattern.var())) return *bound == target;
    acc.set(pattern.var(), target);
    return true;
  }
  if (target.is_variable() || pattern.conn() != target.conn()) return false;
  for (std::size_t i = 0; i < pattern.args().size(); ++i)
    if (!match_into(pattern.args()[i], target.args()[i], acc)) return false;
  return true;
}

}  // namespace

std::optional<Substitution> match(const Formula& pattern, const Formula& target) {
  Substitution acc;
  if (match_into(pattern, target, acc)) return acc;
  return std::nullopt;
}

std::vector<Formula> enumerate_formulas(const Signature& sig, const VarSet& vars, int max_depth) {
  if (max_depth < 0) throw std::invalid_argument("negative depth bound");
  std::vector<Formula> universe;
  std::vector<std::size_t> level_start;  // index of first formula of each depth
  level_start.push_back(0);
  for (int ci = 0; ci < sig.size(); ++ci)
    if (sig.at(ci).arity == 0) universe.push_back(Formula::constant(ci));
  for (int vi = 0; vi < vars.size(); ++vi) universe.push_back(Formula::variable(vi));
  level_start.push_back(universe.size());

  for (int d = 1; d <= max_depth; ++d) {
    std::size_t prev_end = universe.size();
    for (int ci = 0; ci < sig.size(); ++ci) {
      int k = sig.at(ci).arity;
      if (k == 0) continue;
      // argument tuples over formulas of depth < d, at least one of depth d-1
      std::vector<std::size_t> idx(k, 0);
      while (true) {
        // formulas of depth exactly d-1 occupy [level_start[d-1], level_start[d])
        bool touches_top = false;
        for (int j = 0; j < k; ++j)
          if (idx[j] >= level_start[d - 1] && idx[j] < level_start[d]) touches_top = true;
        if (touches_top) {
          std::vector<Formula> args;
          args.reserve(k);
          for (int j = 0; j < k; ++j) args.push_back(universe[idx[j]]);
          universe.push_back(Formula::apply(ci, std::move(args)));
        }
        int j = k - 1;
        while (j >= 0 && ++idx[j] == prev_end) idx[j--] = 0;
        if (j < 0) break;
      }
    }
    level_start.push_back(universe.size());
    if (universe.size() == prev_end) break;  // nothing new can appear deeper
  }
  return universe;
}

std::vector<Substitution> enumerate_substitutions(const std::vector<int>& domain,
                                                  const std::vector<Formula>& codomain) {
  std::vector<Substitution> out;
  if (domain.empty()) {
    out.push_back(Substitution::identity());
    return out;
  }
  if (codomain.empty()) return out;
  std::vector<std::size_t> idx(domain.size(), 0);
  while (true) {
    Substitution s;
    for (std::size_t j = 0; j < domain.size(); ++j) s.set(domain[j], codomain[idx[j]]);
    out.push_back(std::move(s));
    int j = static_cast<int>(domain.size()) - 1;
    while (j >= 0 && ++idx[j] == codomain.size()) idx[j--] = 0;
    if (j < 0) break;
  }
  return out;
}

FiniteStructure::FiniteStructure(std::string name, const Signature& sig,
                                 std::vector<std::string> carrier)
    : name_(std::move(name)), carrier_(std::move(carrier)) {
  for (std::size_t i = 0; i < carrier_.size(); ++i)
    for (std::size_t j = i + 1; j < carrier_.size(); ++j)
      if (carrier_[i] == carrier_[j]) throw std::invalid_argument("duplicate carrier element");
  tables_.resize(sig.size());
  defined_.resize(sig.size());
  for (int ci = 0; ci < sig.size(); ++ci) {
    std::size_t cells = 1;
    for (int j = 0; j < sig.at(ci).arity; ++j) cells *= carrier_.size();
    tables_[ci].assign(cells, -1);
    defined_[ci].assign(cells, false);
  }
}

int FiniteStructure::element_index(const std::string& label) const {
  for (std::size_t i = 0; i < carrier_.size(); ++i)
    if (carrier_[i] == label) return static_cast<int>(i);
  return -1;
}

void FiniteStructure::define(int conn_index, const std::vector<int>& args, int value) {
  std::size_t cell = 0;
  for (int a : args) {
    if (a < 0 || a >= size()) throw std::out_of_range("argument outside carrier");
    cell = cell * carrier_.size() + static_cast<std::size_t>(a);
  }
  if (value < 0 || value >= size()) throw std::out_of_range("value outside carrier");
  tables_[conn_index][cell] = value;
  defined_[conn_index][cell] = true;
}

bool FiniteStructure::fully_defined(const Signature& sig, std::string* missing) const {
  for (int ci = 0; ci < static_cast<int>(tables_.size()); ++ci)
    for (std::size_t cell = 0; cell < tables_[ci].size(); ++cell)
      if (!defined_[ci][cell]) {
        if (missing) *missing = sig.at(ci).name;
        return false;
      }
  return true;
}

int FiniteStructure::interp(int conn_index, std::span<const int> args) const {
  std::size_t cell = 0;
  for (int a : args) cell = cell * carrier_.size() + static_cast<std::size_t>(a);
  int v = tables_[conn_index][cell];
  if (v < 0) throw std::logic_error("connective not interpreted");
  return v;
}

int evaluate(const std::map<int, int>& valuation, const Formula& f, const FiniteStructure& a) {
  if (f.is_variable()) {
    auto it = valuation.find(f.var());
    if (it == valuation.end()) throw std::invalid_argument("unbound variable in evaluation");
    return it->second;
  }
  std::vector<int> args;
  args.reserve(f.args().size());
  for (const auto& sub : f.args()) args.push_back(evaluate(valuation, sub, a));
  return a.interp(f.conn(), args);
}

}  // namespace conseq
