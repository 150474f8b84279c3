#pragma once

// Data-parallel building blocks shared by the minimization algorithms:
// a fork-join parallel loop, election cells with a concurrent-write policy,
// and parallel sort / adjacent difference / inclusive scan.
//
// All primitives honour the worker count from DFAMIN_THREADS (or the
// hardware concurrency when unset). With one worker they degrade to plain
// sequential code, which keeps single-core runs cheap and reproducible.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <thread>
#include <vector>

namespace dfamin::substrate {

// Resolution of concurrent writes to one election cell. arbitrary_winner
// keeps one of the written values, as on a CRCW machine; the deterministic
// modes keep the minimum/maximum written value so runs can be replayed.
enum class RacePolicy { arbitrary_winner, deterministic_min, deterministic_max };

inline const char* to_string(RacePolicy p) {
  switch (p) {
    case RacePolicy::arbitrary_winner: return "arbitrary";
    case RacePolicy::deterministic_min: return "min";
    case RacePolicy::deterministic_max: return "max";
  }
  return "unknown";
}

namespace detail {

inline std::atomic<unsigned>& worker_override() {
  static std::atomic<unsigned> v{0};
  return v;
}

inline unsigned env_worker_count() {
  static const unsigned value = [] {
    if (const char* s = std::getenv("DFAMIN_THREADS")) {
      char* end = nullptr;
      long v = std::strtol(s, &end, 10);
      if (end != nullptr && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw != 0 ? hw : 1u;
  }();
  return value;
}

}  // namespace detail

inline unsigned worker_count() {
  unsigned o = detail::worker_override().load(std::memory_order_relaxed);
  return o != 0 ? o : detail::env_worker_count();
}

// Override the worker count for this process; 0 restores the default.
inline void set_worker_count(unsigned n) {
  detail::worker_override().store(n, std::memory_order_relaxed);
}

// Runs body(i) exactly once for every i in [0, n). Bodies may execute on
// several threads in any order; the call returns after all of them finish,
// so it acts as a barrier. Bodies must not throw.
template <class Body>
void par_for(std::size_t n, Body&& body) {
  if (n == 0) return;
  unsigned workers = worker_count();
  if (workers <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  if (workers > n) workers = static_cast<unsigned>(n);
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([&body, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (std::size_t i = 0; i < std::min(chunk, n); ++i) body(i);
  for (auto& t : threads) t.join();
}

// Empty election cell.
inline constexpr std::uint32_t kNoLeader = 0xFFFFFFFFu;

// Concurrent write into an election cell, resolved per policy. Values must
// be smaller than kNoLeader.
inline void elect(std::atomic<std::uint32_t>& cell, std::uint32_t value, RacePolicy policy) {
  switch (policy) {
    case RacePolicy::arbitrary_winner:
      cell.store(value, std::memory_order_relaxed);
      return;
    case RacePolicy::deterministic_min: {
      // kNoLeader compares greater than every real value
      std::uint32_t cur = cell.load(std::memory_order_relaxed);
      while (value < cur &&
             !cell.compare_exchange_weak(cur, value, std::memory_order_relaxed)) {
      }
      return;
    }
    case RacePolicy::deterministic_max: {
      std::uint32_t cur = cell.load(std::memory_order_relaxed);
      while ((cur == kNoLeader || value > cur) &&
             !cell.compare_exchange_weak(cur, value, std::memory_order_relaxed)) {
      }
      return;
    }
  }
}

// Sorts items in place under a strict weak ordering. Not stable: ties may
// land in any order.
template <class T, class Compare>
void par_sort(std::vector<T>& items, Compare cmp) {
  unsigned workers = worker_count();
  if (workers <= 1 || items.size() < 2048) {
    std::sort(items.begin(), items.end(), cmp);
    return;
  }
  if (workers > items.size()) workers = static_cast<unsigned>(items.size());
  std::vector<std::size_t> bounds;
  const std::size_t chunk = (items.size() + workers - 1) / workers;
  for (std::size_t b = 0; b < items.size(); b += chunk) bounds.push_back(b);
  bounds.push_back(items.size());
  const std::size_t pieces = bounds.size() - 1;
  par_for(pieces, [&](std::size_t p) {
    std::sort(items.begin() + bounds[p], items.begin() + bounds[p + 1], cmp);
  });
  // pairwise merge rounds; merges within a round touch disjoint ranges
  std::vector<std::size_t> cur = bounds;
  while (cur.size() > 2) {
    std::vector<std::size_t> next;
    const std::size_t runs = cur.size() - 1;
    par_for(runs / 2, [&](std::size_t m) {
      std::inplace_merge(items.begin() + cur[2 * m], items.begin() + cur[2 * m + 1],
                         items.begin() + cur[2 * m + 2], cmp);
    });
    for (std::size_t i = 0; i < cur.size(); i += 2) next.push_back(cur[i]);
    if (next.back() != items.size()) next.push_back(items.size());
    cur = std::move(next);
  }
}

// out[0] = 0; out[i] = 1 iff are_neq(items[i], items[i-1]) for 0 < i < n.
template <class T, class AreNeq>
std::vector<std::uint32_t> adjacent_diff(const std::vector<T>& items, AreNeq are_neq) {
  std::vector<std::uint32_t> out(items.size());
  if (items.empty()) return out;
  out[0] = 0;
  par_for(items.size() - 1, [&](std::size_t j) {
    const std::size_t i = j + 1;
    out[i] = are_neq(items[i], items[i - 1]) ? 1u : 0u;
  });
  return out;
}

// out[i] = sum of items[0..i]. Sums must stay within 32 bits, which holds
// for the 0/1 arrays produced by adjacent_diff.
inline std::vector<std::uint32_t> inclusive_scan(const std::vector<std::uint32_t>& items) {
  std::vector<std::uint32_t> out(items.size());
  if (items.empty()) return out;
  unsigned workers = worker_count();
  if (workers <= 1 || items.size() < 4096) {
    std::inclusive_scan(items.begin(), items.end(), out.begin());
    return out;
  }
  if (workers > items.size()) workers = static_cast<unsigned>(items.size());
  const std::size_t chunk = (items.size() + workers - 1) / workers;
  std::vector<std::size_t> bounds;
  for (std::size_t b = 0; b < items.size(); b += chunk) bounds.push_back(b);
  bounds.push_back(items.size());
  const std::size_t pieces = bounds.size() - 1;
  par_for(pieces, [&](std::size_t p) {
    std::inclusive_scan(items.begin() + bounds[p], items.begin() + bounds[p + 1],
                        out.begin() + bounds[p]);
  });
  std::vector<std::uint32_t> offsets(pieces, 0);
  for (std::size_t p = 1; p < pieces; ++p) {
    offsets[p] = offsets[p - 1] + out[bounds[p] - 1];
  }
  par_for(pieces, [&](std::size_t p) {
    if (p == 0) return;
    for (std::size_t i = bounds[p]; i < bounds[p + 1]; ++i) out[i] += offsets[p];
  });
  return out;
}

}  // namespace dfamin::substrate
