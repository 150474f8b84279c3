#pragma once

// Sorting-based partition refinement. Each pass rebuilds a per-state
// signature (the block labels of all successors), sorts the states by
// (block, signature), marks key changes with an adjacent difference, turns
// the marks into dense labels with an inclusive scan, and scatters the
// labels back. A block can split into many subblocks per pass, unlike the
// binary splits of leader election.

#include <chrono>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "dfamin/core.hpp"
#include "dfamin/substrate.hpp"

namespace dfamin {

struct SortTrace {
  std::vector<Partition> partitions;         // canonical form, per pass
  std::vector<std::uint32_t> block_counts;   // after each pass
};

struct SortOptions {
  std::int64_t timeout_ms = 300'000;
  SortTrace* trace = nullptr;
};

// Row-major n x k table: signature[q*k + a] = block[delta[a][q]], computed
// from the labels as of the start of a pass and kept immutable while the
// sort runs.
inline std::vector<std::uint32_t> make_signature(const Dfa& d,
                                                 std::span<const std::uint32_t> block) {
  const std::uint32_t n = d.num_states;
  const std::uint32_t k = d.alphabet_size;
  std::vector<std::uint32_t> sig(static_cast<std::size_t>(n) * k);
  substrate::par_for(n, [&](std::size_t q) {
    for (std::uint32_t a = 0; a < k; ++a) {
      sig[q * k + a] = block[d.delta[a][q]];
    }
  });
  return sig;
}

// Strict weak ordering on states by (block, signature), letters compared in
// index order.
inline bool signature_key_less(std::uint32_t q1, std::uint32_t q2,
                               std::span<const std::uint32_t> block,
                               std::span<const std::uint32_t> sig, std::uint32_t k) {
  if (block[q1] != block[q2]) return block[q1] < block[q2];
  for (std::uint32_t a = 0; a < k; ++a) {
    const std::uint32_t s1 = sig[static_cast<std::size_t>(q1) * k + a];
    const std::uint32_t s2 = sig[static_cast<std::size_t>(q2) * k + a];
    if (s1 != s2) return s1 < s2;
  }
  return false;
}

inline bool signature_key_neq(std::uint32_t q1, std::uint32_t q2,
                              std::span<const std::uint32_t> block,
                              std::span<const std::uint32_t> sig, std::uint32_t k) {
  if (block[q1] != block[q2]) return true;
  for (std::uint32_t a = 0; a < k; ++a) {
    if (sig[static_cast<std::size_t>(q1) * k + a] != sig[static_cast<std::size_t>(q2) * k + a])
      return true;
  }
  return false;
}

inline MinResult sort_pr(const Dfa& d, const SortOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  const auto deadline = detail::run_deadline(start, opt.timeout_ms);
  const std::uint32_t n = d.num_states;
  const std::uint32_t k = d.alphabet_size;
  MinResult out;
  RunStats stats;

  bool has_acc = false;
  bool has_rej = false;
  for (State q = 0; q < n; ++q) (d.accepting[q] != 0 ? has_acc : has_rej) = true;
  std::vector<std::uint32_t> block(n);
  std::uint32_t num_blocks = 1;
  if (has_acc && has_rej) {
    num_blocks = 2;
    for (State q = 0; q < n; ++q) block[q] = d.accepting[q] != 0 ? 0 : 1;
  }

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);

  while (true) {
    if (std::chrono::steady_clock::now() > deadline) {
      stats.status = RunStatus::timeout;
      stats.elapsed_ms = detail::elapsed_ms_since(start);
      out.stats = stats;
      return out;
    }
    const std::vector<std::uint32_t> sig = make_signature(d, block);
    substrate::par_sort(order, [&](std::uint32_t a, std::uint32_t b) {
      return signature_key_less(a, b, block, sig, k);
    });
    const std::vector<std::uint32_t> marks =
        substrate::adjacent_diff(order, [&](std::uint32_t a, std::uint32_t b) {
          return signature_key_neq(a, b, block, sig, k);
        });
    const std::vector<std::uint32_t> labels = substrate::inclusive_scan(marks);
    substrate::par_for(n, [&](std::size_t i) { block[order[i]] = labels[i]; });
    ++stats.iterations;
    const std::uint32_t fresh = labels[n - 1] + 1;
    if (opt.trace != nullptr) {
      opt.trace->partitions.push_back(canonicalize(block));
      opt.trace->block_counts.push_back(fresh);
    }
    if (fresh == num_blocks) break;
    num_blocks = fresh;
  }

  stats.elapsed_ms = detail::elapsed_ms_since(start);
  stats.peak_memory_estimate = static_cast<std::uint64_t>(n) * (16 + 4 * k);
  stats.status = RunStatus::ok;
  out.partition = canonicalize(block);
  out.stats = stats;
  return out;
}

inline MinResult sort_pr(const Dfa& d, std::int64_t timeout_ms) {
  SortOptions opt;
  opt.timeout_ms = timeout_ms;
  return sort_pr(d, opt);
}

}  // namespace dfamin
