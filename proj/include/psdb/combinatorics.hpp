#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "psdb/linalg.hpp"

namespace psdb {

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

// C(n, k), saturating at UINT64_MAX.
inline std::uint64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 r = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned __int128>(n - k + i) / static_cast<unsigned __int128>(i);
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

// Visits every k-subset of [0, n) in lexicographic order. The visitor returns
// false to stop early; the function returns false iff it was stopped.
template <typename Visitor>
bool for_each_combination(Index n, Index k, Visitor&& visit) {
  if (k < 0 || k > n) return true;
  std::vector<Index> c(static_cast<std::size_t>(k));
  std::iota(c.begin(), c.end(), Index{0});
  while (true) {
    if (!visit(static_cast<const std::vector<Index>&>(c))) return false;
    Index i = k - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return true;
    ++c[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
}

inline void require_enumerable(Index n, Index k, std::uint64_t cap, const char* what) {
  const auto count = binomial(n, k);
  if (count > cap) {
    throw EnumerationLimit(std::string(what) + ": C(" + std::to_string(n) + "," + std::to_string(k) +
                           ") = " + std::to_string(count) + " exceeds the enumeration cap " +
                           std::to_string(cap) + "; use randomized refutation mode instead");
  }
}

}  // namespace psdb
