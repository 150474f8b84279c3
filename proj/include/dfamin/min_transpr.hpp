#pragma once

// Partition refinement with a partial transitive closure: extend the
// alphabet with power letters a^(2^i) computed by pointer doubling, then run
// leader-election refinement on the expanded automaton. Long same-letter
// paths collapse to logarithmically many refinement passes.

#include <bit>
#include <chrono>
#include <cstdint>
#include <vector>

#include "dfamin/core.hpp"
#include "dfamin/min_partref.hpp"
#include "dfamin/substrate.hpp"

namespace dfamin {

// Power levels i = 0 .. floor(log2 n); the i-th level row of letter a
// realizes a^(2^i).
inline std::uint32_t power_levels(std::uint32_t n) {
  return static_cast<std::uint32_t>(std::bit_width(n));  // floor(log2 n) + 1 for n >= 1
}

inline std::uint64_t expand_required_bytes(std::uint32_t n, std::uint32_t k) {
  return static_cast<std::uint64_t>(power_levels(n)) * k * n * sizeof(State);
}

// Base automaton with the power-letter rows appended. Row i*base_alphabet+a
// holds a^(2^i); level 0 equals the base table exactly.
struct ExpandedDfa {
  std::uint32_t num_states = 0;
  std::uint32_t base_alphabet = 0;
  std::uint32_t levels = 0;
  std::vector<std::vector<State>> delta;
  std::vector<std::uint8_t> accepting;
  State initial = 0;

  const std::vector<State>& row(std::uint32_t letter, std::uint32_t level) const {
    return delta[static_cast<std::size_t>(level) * base_alphabet + letter];
  }

  // View as a plain automaton over the expanded alphabet.
  Dfa as_dfa() const {
    Dfa d;
    d.num_states = num_states;
    d.alphabet_size = static_cast<std::uint32_t>(delta.size());
    d.delta = delta;
    d.accepting = accepting;
    d.initial = initial;
    return d;
  }
};

// Pointer doubling: level i is level i-1 composed with itself, one parallel
// pass per level. Fixed-point rows (powers past the longest path) are kept,
// not pruned. Throws CapacityError before allocating when the table would
// exceed limits.max_memory_bytes.
inline ExpandedDfa expand_alphabet(const Dfa& d, const Limits& limits = {}) {
  const std::uint32_t n = d.num_states;
  const std::uint32_t k = d.alphabet_size;
  const std::uint64_t required = expand_required_bytes(n, k);
  if (required > limits.max_memory_bytes) {
    throw CapacityError("alphabet expansion needs " + std::to_string(required) +
                            " bytes, limit is " + std::to_string(limits.max_memory_bytes),
                        required);
  }
  ExpandedDfa e;
  e.num_states = n;
  e.base_alphabet = k;
  e.levels = power_levels(n);
  e.accepting = d.accepting;
  e.initial = d.initial;
  e.delta.resize(static_cast<std::size_t>(e.levels) * k);
  for (std::uint32_t a = 0; a < k; ++a) e.delta[a] = d.delta[a];
  for (std::uint32_t lvl = 1; lvl < e.levels; ++lvl) {
    for (std::uint32_t a = 0; a < k; ++a) {
      const std::vector<State>& prev = e.delta[static_cast<std::size_t>(lvl - 1) * k + a];
      std::vector<State> cur(n);
      substrate::par_for(n, [&](std::size_t q) { cur[q] = prev[prev[q]]; });
      e.delta[static_cast<std::size_t>(lvl) * k + a] = std::move(cur);
    }
  }
  return e;
}

// Expand, then refine. The partition is over the original states and equals
// the one naive_pr computes on the base automaton; stats report the
// refinement passes and the doubling rounds separately.
inline MinResult trans_pr(const Dfa& d, const PrOptions& opt = {}, const Limits& limits = {}) {
  const auto start = std::chrono::steady_clock::now();
  ExpandedDfa e;
  try {
    e = expand_alphabet(d, limits);
  } catch (const CapacityError& err) {
    MinResult out;
    out.stats.status = RunStatus::capacity_exceeded;
    out.stats.peak_memory_estimate = err.required_bytes();
    out.stats.elapsed_ms = detail::elapsed_ms_since(start);
    return out;
  }
  PrOptions pr = opt;
  if (opt.timeout_ms > 0) {
    const auto spent = static_cast<std::int64_t>(detail::elapsed_ms_since(start));
    pr.timeout_ms = opt.timeout_ms > spent ? opt.timeout_ms - spent : 1;
  }
  MinResult out = detail::leader_election_pr(e.num_states, e.delta, e.accepting, pr, false);
  out.stats.closure_steps = e.levels - 1;
  out.stats.elapsed_ms = detail::elapsed_ms_since(start);
  out.stats.peak_memory_estimate += expand_required_bytes(d.num_states, d.alphabet_size);
  return out;
}

inline MinResult trans_pr(const Dfa& d, substrate::RacePolicy policy,
                          std::int64_t timeout_ms = 300'000, const Limits& limits = {}) {
  PrOptions opt;
  opt.policy = policy;
  opt.timeout_ms = timeout_ms;
  Limits lim = limits;
  lim.timeout_ms = timeout_ms;
  return trans_pr(d, opt, lim);
}

}  // namespace dfamin
