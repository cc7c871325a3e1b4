#include "conseq/closure.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace conseq {

namespace {
constexpr int kTableBits = 20;  // materialize full tables up to 2^20 subsets
}

SetOperator::SetOperator(std::shared_ptr<const Carrier> carrier, std::function<Mask(Mask)> fn,
                         ArityBound arity)
    : carrier_(std::move(carrier)), fn_(std::move(fn)), arity_(arity) {
  if (carrier_->size() > 64) throw std::invalid_argument("carrier too large (max 64)");
}

Mask SetOperator::operator()(Mask s) const {
  if (s & ~carrier_->full()) throw std::invalid_argument("subset outside carrier");
  {
    std::lock_guard<std::mutex> lock(memo_->mu);
    if (memo_->table) return (*memo_->table)[s];
    auto it = memo_->map.find(s);
    if (it != memo_->map.end()) return it->second;
  }
  Mask r = fn_(s);
  std::lock_guard<std::mutex> lock(memo_->mu);
  memo_->map.emplace(s, r);
  return r;
}

const std::vector<Mask>& SetOperator::table() const {
  {
    std::lock_guard<std::mutex> lock(memo_->mu);
    if (memo_->table) return *memo_->table;
  }
  int n = carrier_->size();
  if (n > kTableBits) throw std::invalid_argument("carrier too large to materialize");
  std::vector<Mask> t(std::size_t{1} << n);
  for (Mask s = 0; s < t.size(); ++s) t[s] = fn_(s);
  std::lock_guard<std::mutex> lock(memo_->mu);
  if (!memo_->table) memo_->table = std::move(t);
  return *memo_->table;
}

bool SetOperator::same_carrier(const SetOperator& o) const {
  return carrier_ == o.carrier_ || carrier_->labels == o.carrier_->labels;
}

void IntersectionFamily::validate() const {
  Mask full = carrier->full();
  if (!contains(full)) throw std::invalid_argument("intersection family misses full carrier");
  for (std::size_t i = 0; i < closed.size(); ++i)
    for (std::size_t j = i + 1; j < closed.size(); ++j)
      if (!contains(closed[i] & closed[j]))
        throw std::invalid_argument("family not closed under intersections");
}

bool IntersectionFamily::contains(Mask s) const {
  return std::binary_search(closed.begin(), closed.end(), s);
}

SetOperator family_to_operator(const IntersectionFamily& fam) {
  fam.validate();
  auto closed = fam.closed;
  Mask full = fam.carrier->full();
  return SetOperator(fam.carrier, [closed, full](Mask s) {
    Mask acc = full;
    for (Mask c : closed)
      if (is_subset(s, c)) acc &= c;
    return acc;
  });
}

IntersectionFamily operator_to_family(const SetOperator& op) {
  int n = op.carrier().size();
  if (n > 16) throw std::invalid_argument("carrier too large for fixed-point enumeration");
  IntersectionFamily fam{op.carrier_ptr(), {}};
  const auto& t = op.table();
  for (Mask s = 0; s < t.size(); ++s)
    if (t[s] == s) fam.closed.push_back(s);
  return fam;
}

SetOperator constant_top_operator(std::shared_ptr<const Carrier> c) {
  Mask full = c->full();
  return SetOperator(std::move(c), [full](Mask) { return full; });
}

SetOperator identity_operator(std::shared_ptr<const Carrier> c) {
  return SetOperator(std::move(c), [](Mask s) { return s; });
}

SetOperator kary_part(const SetOperator& op, ArityBound bound) {
  if (!bound.is_omega() && bound.n < 1) throw std::invalid_argument("arity bound must be >= 1");
  if (bound.is_omega()) {
    // every subset of a finite carrier is its own small subset
    return SetOperator(op.carrier_ptr(), [op](Mask s) { return op(s); }, ArityBound::omega());
  }
  int k = bound.n;
  return SetOperator(
      op.carrier_ptr(),
      [op, k](Mask s) {
        Mask acc = s;
        for_each_small_subset(s, k, [&](Mask sub) { acc |= op(sub); });
        return acc;
      },
      bound);
}

namespace {

SetOperator pointwise(const std::vector<SetOperator>& ops, bool intersect) {
  if (ops.empty()) throw std::invalid_argument("empty operator family");
  for (const auto& o : ops)
    if (!o.same_carrier(ops.front())) throw std::invalid_argument("mismatched carriers");
  auto family = ops;
  return SetOperator(ops.front().carrier_ptr(), [family, intersect](Mask s) {
    Mask acc = family.front()(s);
    for (std::size_t i = 1; i < family.size(); ++i)
      acc = intersect ? (acc & family[i](s)) : (acc | family[i](s));
    return acc | s;
  });
}

}  // namespace

SetOperator meet(const std::vector<SetOperator>& ops, ArityBound bound) {
  return kary_part(pointwise(ops, /*intersect=*/true), bound);
}

SetOperator join_directed(const std::vector<SetOperator>& ops, ArityBound bound) {
  return kary_part(pointwise(ops, /*intersect=*/false), bound);
}

SetOperator join_general(const std::vector<SetOperator>& ops, ArityBound bound) {
  if (ops.empty()) throw std::invalid_argument("empty operator family");
  for (const auto& o : ops)
    if (!o.same_carrier(ops.front())) throw std::invalid_argument("mismatched carriers");
  // sets closed for every member, i.e. the intersection of the fixed-point
  // families; the induced closure, taken bound-arily
  auto first = operator_to_family(ops.front());
  std::vector<Mask> common;
  for (Mask c : first.closed) {
    bool in_all = true;
    for (std::size_t i = 1; i < ops.size() && in_all; ++i) in_all = ops[i](c) == c;
    if (in_all) common.push_back(c);
  }
  IntersectionFamily fam{ops.front().carrier_ptr(), std::move(common)};
  return kary_part(family_to_operator(fam), bound);
}

SetOperator idempotent_hull(const SetOperator& op) {
  int n = op.carrier().size();
  return SetOperator(op.carrier_ptr(), [op, n](Mask s) {
    Mask cur = s;
    for (int i = 0; i <= n; ++i) {
      Mask next = op(cur) | cur;
      if (next == cur) break;
      cur = next;
    }
    return cur;
  });
}

namespace {

std::vector<Mask> sample_masks(int n, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Mask> out;
  out.reserve(samples);
  Mask full = full_mask(n);
  for (int i = 0; i < samples; ++i) out.push_back(rng() & full);
  return out;
}

}  // namespace

OperatorCheck is_closure_operator(const SetOperator& op, Exec exec, int exhaustive_threshold,
                                  int samples, std::uint64_t seed) {
  OperatorCheck rep;
  int n = op.carrier().size();
  bool exhaustive = n <= exhaustive_threshold;
  rep.exhaustive = exhaustive;

  if (exhaustive) {
    const auto& t = op.table();
    std::int64_t size = static_cast<std::int64_t>(t.size());
    std::int64_t w_inf = size, w_mono = size, w_idem = size;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(min : w_inf, w_mono, w_idem) \
    if (exec == Exec::parallel)
#endif
    for (std::int64_t s = 0; s < size; ++s) {
      Mask m = static_cast<Mask>(s);
      if (!is_subset(m, t[s]) && s < w_inf) w_inf = s;
      // monotone along single-element steps suffices on the subset lattice
      for (int i = 0; i < n; ++i)
        if (!bit(m, i) && !is_subset(t[s], t[s | (Mask{1} << i)]) && s < w_mono) w_mono = s;
      if (t[t[s]] != t[s] && s < w_idem) w_idem = s;
    }
    if (w_inf < size) rep.inflationary = false, rep.inflationary_witness = Mask(w_inf);
    if (w_mono < size) rep.monotone = false, rep.monotone_witness = Mask(w_mono);
    if (w_idem < size) rep.idempotent = false, rep.idempotent_witness = Mask(w_idem);
    return rep;
  }

  auto probes = sample_masks(n, samples, seed);
  for (Mask s : probes) {
    Mask c = op(s);
    if (!rep.inflationary_witness && !is_subset(s, c)) {
      rep.inflationary = false;
      rep.inflationary_witness = s;
    }
    for (int i = 0; i < n; ++i)
      if (!bit(s, i) && !rep.monotone_witness && !is_subset(c, op(s | (Mask{1} << i)))) {
        rep.monotone = false;
        rep.monotone_witness = s;
      }
    if (!rep.idempotent_witness && op(c) != c) {
      rep.idempotent = false;
      rep.idempotent_witness = s;
    }
  }
  return rep;
}

std::pair<bool, std::optional<Mask>> is_idempotent(const SetOperator& op, Exec exec,
                                                   int exhaustive_threshold, int samples,
                                                   std::uint64_t seed) {
  int n = op.carrier().size();
  if (n <= exhaustive_threshold) {
    const auto& t = op.table();
    std::int64_t size = static_cast<std::int64_t>(t.size());
    std::int64_t w = size;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(min : w) if (exec == Exec::parallel)
#endif
    for (std::int64_t s = 0; s < size; ++s)
      if (t[t[s]] != t[s] && s < w) w = s;
    if (w < size) return {false, Mask(w)};
    return {true, std::nullopt};
  }
  for (Mask s : sample_masks(n, samples, seed)) {
    Mask c = op(s);
    if (op(c) != c) return {false, s};
  }
  return {true, std::nullopt};
}

namespace {

// DFS over subset-masks in increasing order; a mask may join the family only
// if its intersection with every present member is already present. Smaller
// intersections have smaller mask values, so they are already decided.
void moore_dfs(int n, Mask next, std::uint64_t members, std::vector<std::uint64_t>& out) {
  Mask total = Mask{1} << n;  // number of subsets, n <= 5 so this fits easily
  if (next == total - 1) {
    out.push_back(members | (std::uint64_t{1} << (total - 1)));  // full set always joins
    return;
  }
  moore_dfs(n, next + 1, members, out);  // exclude `next`
  std::uint64_t m = members;
  bool ok = true;
  for (Mask t = 0; t < total && ok; ++t)
    if ((m >> t) & 1) {
      Mask inter = t & next;
      if (inter != next && !((m >> inter) & 1)) ok = false;
    }
  if (ok) moore_dfs(n, next + 1, members | (std::uint64_t{1} << next), out);
}

}  // namespace

std::vector<std::uint64_t> moore_families(int n, Exec exec) {
  if (n < 0 || n > 5) throw std::invalid_argument("moore_families: carrier size must be <= 5");
  Mask total = Mask{1} << n;
  if (n == 0) return {std::uint64_t{1}};  // the family {emptyset} on the empty carrier

  // split the DFS at a fixed prefix depth so branches can run in parallel;
  // branch order keeps the output deterministic and ascending
  int prefix = std::min<int>(n >= 4 ? 6 : 0, static_cast<int>(total) - 1);
  std::vector<std::uint64_t> prefixes;  // decided membership bits for masks [0, prefix)
  {
    // enumerate all consistent include/exclude decisions for masks < prefix
    std::vector<std::uint64_t> acc;
    struct Item {
      Mask next;
      std::uint64_t members;
    };
    std::vector<Item> work{{0, 0}};
    while (!work.empty()) {
      Item it = work.back();
      work.pop_back();
      if (it.next == static_cast<Mask>(prefix)) {
        acc.push_back(it.members);
        continue;
      }
      // push include-branch first so that pop order is exclude-then-include;
      // order is restored by sorting below
      std::uint64_t m = it.members;
      bool ok = true;
      for (Mask t = 0; t < it.next && ok; ++t)
        if ((m >> t) & 1) {
          Mask inter = t & it.next;
          if (inter != it.next && !((m >> inter) & 1)) ok = false;
        }
      if (ok) work.push_back({it.next + 1, m | (std::uint64_t{1} << it.next)});
      work.push_back({it.next + 1, m});
    }
    std::sort(acc.begin(), acc.end());
    prefixes = std::move(acc);
  }

  std::vector<std::vector<std::uint64_t>> per_prefix(prefixes.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
#endif
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(prefixes.size()); ++i)
    moore_dfs(n, static_cast<Mask>(prefix), prefixes[i], per_prefix[i]);

  std::vector<std::uint64_t> out;
  for (auto& chunk : per_prefix) out.insert(out.end(), chunk.begin(), chunk.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t moore_family_count_naive(int n) {
  if (n < 0 || n > 4) throw std::invalid_argument("naive pass feasible only for n <= 4");
  int total = 1 << n;
  std::uint64_t count = 0;
  // all families = all subsets of the powerset
  std::uint64_t families = std::uint64_t{1} << total;
  for (std::uint64_t fam = 0; fam < families; ++fam) {
    if (!((fam >> (total - 1)) & 1)) continue;  // must contain the full set
    bool ok = true;
    for (int a = 0; a < total && ok; ++a)
      if ((fam >> a) & 1)
        for (int b = a; b < total && ok; ++b)
          if ((fam >> b) & 1 && !((fam >> (a & b)) & 1)) ok = false;
    if (ok) ++count;
  }
  return count;
}

std::vector<SetOperator> enumerate_closure_operators(std::shared_ptr<const Carrier> carrier,
                                                     Exec exec) {
  int n = carrier->size();
  if (n > 5) throw std::invalid_argument("carrier too large (closure-operator enumeration caps at 5)");
  std::vector<SetOperator> out;
  for (std::uint64_t bits : moore_families(n, exec))
    out.push_back(family_to_operator(family_from_bits(carrier, bits)));
  return out;
}

std::uint64_t family_bits_of(const SetOperator& op) {
  int n = op.carrier().size();
  if (n > 5) throw std::invalid_argument("family bits need carrier <= 5");
  std::uint64_t bits = 0;
  const auto& t = op.table();
  for (Mask s = 0; s < t.size(); ++s)
    if (t[s] == s) bits |= std::uint64_t{1} << s;
  return bits;
}

IntersectionFamily family_from_bits(std::shared_ptr<const Carrier> carrier, std::uint64_t bits) {
  IntersectionFamily fam{std::move(carrier), {}};
  int total = 1 << fam.carrier->size();
  for (int s = 0; s < total; ++s)
    if ((bits >> s) & 1) fam.closed.push_back(static_cast<Mask>(s));
  return fam;
}

bool operator_leq(const SetOperator& a, const SetOperator& b) {
  if (!a.same_carrier(b)) throw std::invalid_argument("mismatched carriers");
  const auto& ta = a.table();
  const auto& tb = b.table();
  for (Mask s = 0; s < ta.size(); ++s)
    if (!is_subset(ta[s], tb[s])) return false;
  return true;
}

}  // namespace conseq
