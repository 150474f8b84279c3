#pragma once

// Pairwise apartness via transitive closure over the pair graph Q x Q.
// Each pass squares the packed reachability matrix (reads frozen at pass
// entry) and then propagates apartness one step along the fresh relation;
// the loop stops when a pass adds no apart pair. Memory is the quartic
// bottleneck: the matrix holds n^4 bits, so a closed-form guard runs before
// any allocation.

#include <atomic>
#include <bit>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "dfamin/core.hpp"
#include "dfamin/substrate.hpp"

namespace dfamin {

// Bytes of one n^2 x n^2 reachability matrix; the figure quoted by the
// capacity guard and its error message.
inline unsigned __int128 trans_required_bytes(std::uint64_t n) {
  const unsigned __int128 bits = static_cast<unsigned __int128>(n) * n * n * n;
  return (bits + 7) / 8;
}

inline std::string u128_to_string(unsigned __int128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v != 0) {
    s += static_cast<char>('0' + static_cast<int>(v % 10));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

// Final apartness flags, row-major over state pairs, for invariant checks.
struct TransInspect {
  std::vector<std::uint8_t> apart;            // n*n entries
  std::vector<std::uint64_t> apart_popcounts; // per pass, monotone
};

namespace detail {

// Packed square bit matrix with whole-row operations.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows) : rows_(rows), row_words_((rows + 63) / 64) {
    words_.assign(rows_ * row_words_, 0);
  }

  std::size_t row_words() const { return row_words_; }
  std::uint64_t* row(std::size_t r) { return words_.data() + r * row_words_; }
  const std::uint64_t* row(std::size_t r) const { return words_.data() + r * row_words_; }

  void set(std::size_t r, std::size_t c) { row(r)[c >> 6] |= std::uint64_t{1} << (c & 63); }
  bool get(std::size_t r, std::size_t c) const {
    return (row(r)[c >> 6] >> (c & 63)) & 1;
  }
  std::vector<std::uint64_t>& words() { return words_; }
  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  std::size_t rows_ = 0;
  std::size_t row_words_ = 0;
  std::vector<std::uint64_t> words_;
};

inline std::uint64_t popcount_words(const std::vector<std::uint64_t>& w) {
  std::uint64_t total = 0;
  for (std::uint64_t x : w) total += static_cast<std::uint64_t>(std::popcount(x));
  return total;
}

}  // namespace detail

inline MinResult trans_minimize(const Dfa& d, const Limits& limits = {},
                                TransInspect* inspect = nullptr) {
  const auto start = std::chrono::steady_clock::now();
  const auto deadline = detail::run_deadline(start, limits.timeout_ms);
  const std::uint64_t n = d.num_states;
  MinResult out;

  const unsigned __int128 required = trans_required_bytes(n);
  if (required > limits.max_memory_bytes) {
    out.stats.status = RunStatus::capacity_exceeded;
    out.stats.peak_memory_estimate =
        required > ~std::uint64_t{0} ? ~std::uint64_t{0} : static_cast<std::uint64_t>(required);
    out.stats.elapsed_ms = detail::elapsed_ms_since(start);
    return out;
  }

  const std::size_t pairs = static_cast<std::size_t>(n) * n;
  const std::size_t pair_words = (pairs + 63) / 64;
  detail::BitMatrix reach(pairs);
  detail::BitMatrix next(pairs);
  std::vector<std::uint64_t> apart(pair_words, 0);
  std::vector<std::uint64_t> apart_next(pair_words, 0);
  auto apart_get = [&](const std::vector<std::uint64_t>& bits, std::size_t i) {
    return ((bits[i >> 6] >> (i & 63)) & 1) != 0;
  };

  // pair node (q, q') has index q*n + q'; initial edges follow both states
  // one letter at a time, initial apartness is the acceptance difference.
  // Matrix rows are thread-private here; the packed apartness words are
  // built one whole word per body so no two bodies share a word.
  substrate::par_for(pairs, [&](std::size_t s) {
    const std::size_t q = s / n;
    const std::size_t r = s % n;
    for (std::uint32_t a = 0; a < d.alphabet_size; ++a) {
      reach.set(s, static_cast<std::size_t>(d.delta[a][q]) * n + d.delta[a][r]);
    }
  });
  substrate::par_for(pair_words, [&](std::size_t w) {
    std::uint64_t bits = 0;
    const std::size_t base = w << 6;
    for (std::size_t b = 0; b < 64 && base + b < pairs; ++b) {
      const std::size_t s = base + b;
      if (d.accepting[s / n] != d.accepting[s % n]) bits |= std::uint64_t{1} << b;
    }
    apart[w] = bits;
  });

  RunStats stats;
  std::atomic<bool> timed_out{false};
  bool changed = true;
  while (changed) {
    if (std::chrono::steady_clock::now() > deadline) timed_out.store(true);
    if (timed_out.load(std::memory_order_relaxed)) {
      stats.status = RunStatus::timeout;
      stats.elapsed_ms = detail::elapsed_ms_since(start);
      out.stats = stats;
      return out;
    }

    // squaring step: next = reach plus reach composed with itself, reading
    // only the pass-entry matrix
    next.words() = reach.words();
    substrate::par_for(pairs, [&](std::size_t s) {
      if ((s & 255) == 0 && std::chrono::steady_clock::now() > deadline)
        timed_out.store(true, std::memory_order_relaxed);
      if (timed_out.load(std::memory_order_relaxed)) return;
      const std::uint64_t* src = reach.row(s);
      std::uint64_t* dst = next.row(s);
      for (std::size_t w = 0; w < pair_words; ++w) {
        std::uint64_t bits = src[w];
        while (bits != 0) {
          const std::size_t t = (w << 6) + static_cast<std::size_t>(std::countr_zero(bits));
          bits &= bits - 1;
          const std::uint64_t* via = reach.row(t);
          for (std::size_t i = 0; i < pair_words; ++i) dst[i] |= via[i];
        }
      }
    });
    if (timed_out.load(std::memory_order_relaxed)) continue;

    // propagation step: a pair becomes apart when it reaches an apart pair,
    // reading the apartness flags as of pass entry; each body owns one
    // output word outright
    substrate::par_for(pair_words, [&](std::size_t w) {
      std::uint64_t bits = apart[w];
      const std::size_t base = w << 6;
      for (std::size_t b = 0; b < 64 && base + b < pairs; ++b) {
        if ((bits >> b) & 1) continue;
        const std::size_t s = base + b;
        const std::uint64_t* row = next.row(s);
        for (std::size_t i = 0; i < pair_words; ++i) {
          if ((row[i] & apart[i]) != 0) {
            bits |= std::uint64_t{1} << b;
            break;
          }
        }
      }
      apart_next[w] = bits;
    });

    ++stats.iterations;
    changed = apart_next != apart;
    apart.swap(apart_next);
    reach.words().swap(next.words());
    if (inspect != nullptr) inspect->apart_popcounts.push_back(detail::popcount_words(apart));
  }

  // group q with the smallest q0 it is not apart from
  std::vector<std::uint32_t> label(n);
  for (std::size_t q = 0; q < n; ++q) {
    for (std::size_t q0 = 0; q0 <= q; ++q0) {
      if (!apart_get(apart, q0 * n + q)) {
        label[q] = static_cast<std::uint32_t>(q0);
        break;
      }
    }
  }

  if (inspect != nullptr) {
    inspect->apart.assign(pairs, 0);
    for (std::size_t i = 0; i < pairs; ++i) inspect->apart[i] = apart_get(apart, i) ? 1 : 0;
  }

  stats.elapsed_ms = detail::elapsed_ms_since(start);
  stats.peak_memory_estimate =
      2 * static_cast<std::uint64_t>(pairs) * pair_words * 8 +  // two matrices
      2 * static_cast<std::uint64_t>(pair_words) * 8;           // apartness flags
  stats.status = RunStatus::ok;
  out.partition = canonicalize(label);
  out.stats = stats;
  return out;
}

}  // namespace dfamin
