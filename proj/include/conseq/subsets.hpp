#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace conseq {

/// Subsets of a finite ordered carrier, packed as bitmasks. Everything that
/// enumerates powersets in this project goes through these helpers, so the
/// carrier size is capped at 64 elements.
using Mask = std::uint64_t;

inline int popcount(Mask m) { return std::popcount(m); }

inline bool is_subset(Mask a, Mask b) { return (a & ~b) == 0; }

inline Mask full_mask(int n) {
  if (n < 0 || n > 64) throw std::invalid_argument("carrier too large for bitmask subsets");
  return n == 64 ? ~Mask{0} : ((Mask{1} << n) - 1);
}

inline bool bit(Mask m, int i) { return (m >> i) & 1; }

/// Call f(sub) for every subset of m with fewer than k elements.
template <typename F>
void for_each_small_subset(Mask m, int k, F&& f) {
  std::vector<int> elems;
  for (int i = 0; i < 64; ++i)
    if (bit(m, i)) elems.push_back(i);
  int n = static_cast<int>(elems.size());
  // DFS over element choices, pruned at size k.
  std::vector<std::pair<int, Mask>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [idx, cur] = stack.back();
    stack.pop_back();
    f(cur);
    for (int i = idx; i < n; ++i)
      if (popcount(cur) + 1 < k) stack.push_back({i + 1, cur | (Mask{1} << elems[i])});
  }
}

/// out[S] = OR of in[T] over all T subseteq S  (subset "zeta" transform).
inline std::vector<Mask> subset_or_transform(std::vector<Mask> f, int n) {
  for (int i = 0; i < n; ++i)
    for (Mask s = 0; s < (Mask{1} << n); ++s)
      if (bit(s, i)) f[s] |= f[s ^ (Mask{1} << i)];
  return f;
}

}  // namespace conseq
