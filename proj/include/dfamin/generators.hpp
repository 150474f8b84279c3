#pragma once

// Benchmark families: Fibonacci ring automata, bit-splitters, single-letter
// chains, and seeded random automata for property testing.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "dfamin/core.hpp"

namespace dfamin {

// SplitMix64 (Steele, Lea & Flood, 2014). Fixed here so a seed produces the
// same automaton on every platform and standard library.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform-ish value in [0, bound); the modulo bias is irrelevant for
  // test-data generation.
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }  // [0, 1)
};

// w_0 = "1", w_1 = "0", w_{n+1} = w_n ++ w_{n-1}.
inline std::string fib_word(std::size_t n) {
  if (n == 0) return "1";
  if (n == 1) return "0";
  std::string prev = "1";  // w_0
  std::string cur = "0";   // w_1
  for (std::size_t i = 2; i <= n; ++i) {
    std::string next = cur + prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

// Ring automaton over one letter with |w_n| states, accepting at the
// 1-positions of w_n. Worst case for refinement depth: every pair of states
// is distinguished, some only by a word of length |w_n| - 2.
inline Dfa fib_dfa(std::size_t n) {
  if (n < 2) throw std::invalid_argument("fib_dfa needs n >= 2 so both bits occur");
  if (n > 45) throw std::invalid_argument("fib_dfa size past word index 45");
  const std::string w = fib_word(n);
  const auto size = static_cast<std::uint32_t>(w.size());
  Dfa d;
  d.num_states = size;
  d.alphabet_size = 1;
  d.delta.assign(1, std::vector<State>(size));
  d.accepting.resize(size);
  for (State q = 0; q < size; ++q) {
    d.delta[0][q] = (q + 1) % size;
    d.accepting[q] = w[q] == '1' ? 1 : 0;
  }
  d.initial = 0;
  return d;
}

// Bit-splitter family: 2^n states identified with n-bit sequences (leading
// bit most significant), n-1 letters, accepting = leading bit set. Built by
// the doubling construction: level m+1 takes two copies of level m and adds
// one fresh letter that flips the leading bit and clears the suffix when the
// suffix's leading bit is set. Every possible split halves a block, so
// refinement needs few rounds but each round moves many states.
inline Dfa bit_splitter(std::size_t n) {
  if (n < 1) throw std::invalid_argument("bit_splitter needs n >= 1");
  if (n > 26) throw std::invalid_argument("bit_splitter size over 2^26 states");
  Dfa d;
  d.num_states = 2;
  d.alphabet_size = 0;
  d.initial = 0;
  for (std::size_t level = 1; level < n; ++level) {
    const std::uint32_t half = d.num_states;  // 2^level
    const std::uint32_t full = half * 2;
    std::vector<std::vector<State>> next(d.alphabet_size + 1);
    for (std::uint32_t a = 0; a < d.alphabet_size; ++a) {
      next[a].resize(full);
      for (State q = 0; q < half; ++q) {
        next[a][q] = d.delta[a][q];
        next[a][half + q] = half + d.delta[a][q];
      }
    }
    auto& fresh = next[d.alphabet_size];
    fresh.resize(full);
    const std::uint32_t suffix_top = half >> 1;
    for (State q = 0; q < full; ++q) {
      fresh[q] = (q & suffix_top) != 0 ? ((q ^ half) & half) : q;
    }
    d.delta = std::move(next);
    d.num_states = full;
    d.alphabet_size += 1;
  }
  d.accepting.assign(d.num_states, 0);
  for (State q = d.num_states / 2; q < d.num_states; ++q) d.accepting[q] = 1;
  return d;
}

// Chain of len states on one letter: q_i -> q_{i+1}, the last state loops
// and accepts. Accepts a^j iff j >= len - 1.
inline Dfa chain_dfa(std::size_t len) {
  if (len < 2) throw std::invalid_argument("chain_dfa needs len >= 2");
  if (len > 0x7FFFFFFF) throw std::invalid_argument("chain_dfa length over 2^31");
  const auto size = static_cast<std::uint32_t>(len);
  Dfa d;
  d.num_states = size;
  d.alphabet_size = 1;
  d.delta.assign(1, std::vector<State>(size));
  d.accepting.assign(size, 0);
  for (State q = 0; q + 1 < size; ++q) d.delta[0][q] = q + 1;
  d.delta[0][size - 1] = size - 1;
  d.accepting[size - 1] = 1;
  d.initial = 0;
  return d;
}

// Seeded random automaton. Draw order is fixed: the transition rows
// letter by letter, then one acceptance draw per state, so equal
// (n, k, seed, accept_prob) give byte-identical automata.
inline Dfa random_dfa(std::uint32_t n, std::uint32_t k, std::uint64_t seed,
                      double accept_prob = 0.5) {
  if (n < 1 || k < 1) throw std::invalid_argument("random_dfa needs n >= 1 and k >= 1");
  SplitMix64 rng(seed);
  Dfa d;
  d.num_states = n;
  d.alphabet_size = k;
  d.delta.assign(k, std::vector<State>(n));
  for (std::uint32_t a = 0; a < k; ++a) {
    for (State q = 0; q < n; ++q) d.delta[a][q] = static_cast<State>(rng.below(n));
  }
  d.accepting.resize(n);
  for (State q = 0; q < n; ++q) d.accepting[q] = rng.unit() < accept_prob ? 1 : 0;
  d.initial = 0;
  return d;
}

}  // namespace dfamin
