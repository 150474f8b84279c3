#pragma once

// Core automaton and partition types plus the sequential reference
// operations (Moore refinement, quotient construction, reachability
// pruning, language equivalence) used to validate the parallel minimizers.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace dfamin {

using State = std::uint32_t;

// Complete deterministic finite automaton over a dense state set [0, n).
// Transitions are stored one row per letter: delta[a][q] is the successor
// of q on letter a, and every entry must be defined.
struct Dfa {
  std::uint32_t num_states = 0;
  std::uint32_t alphabet_size = 0;
  std::vector<std::vector<State>> delta;
  std::vector<std::uint8_t> accepting;  // indicator per state
  State initial = 0;

  bool is_accepting(State q) const { return accepting[q] != 0; }
  bool operator==(const Dfa&) const = default;
};

// Labelled transition system; may be nondeterministic and incomplete.
struct Lts {
  struct Transition {
    State src = 0;
    std::uint32_t label = 0;
    State dst = 0;
    bool operator==(const Transition&) const = default;
  };
  std::uint32_t num_states = 0;
  State initial = 0;
  std::vector<std::string> labels;  // dense ids in first-appearance order
  std::vector<Transition> transitions;
};

// Block assignment per state, always kept in canonical form: labels are
// exactly 0..num_blocks-1 and label b first occurs at a smaller state index
// than the first occurrence of b+1.
struct Partition {
  std::vector<std::uint32_t> block;
  std::uint32_t num_blocks = 0;
  bool operator==(const Partition&) const = default;
};

enum class RunStatus { ok, timeout, capacity_exceeded };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::timeout: return "timeout";
    case RunStatus::capacity_exceeded: return "capacity-exceeded";
  }
  return "unknown";
}

// Counters reported by every minimization run. iterations counts outer-loop
// passes including the final pass that observes no change.
struct RunStats {
  std::uint64_t iterations = 0;
  std::uint64_t closure_steps = 0;  // alphabet-doubling rounds, 0 if none
  double elapsed_ms = 0.0;
  std::uint64_t peak_memory_estimate = 0;  // bytes of working allocations
  RunStatus status = RunStatus::ok;
};

// Resource bounds for a minimization run. timeout_ms <= 0 disables the
// deadline.
struct Limits {
  std::uint64_t max_memory_bytes = std::uint64_t{16} << 30;
  std::int64_t timeout_ms = 300'000;
};

// Outcome of a minimization run; partition is meaningful only for ok runs.
struct MinResult {
  Partition partition;
  RunStats stats;
};

// Raised when a precomputed guard shows an allocation would not fit.
class CapacityError : public std::runtime_error {
 public:
  CapacityError(const std::string& what, std::uint64_t required_bytes)
      : std::runtime_error(what), required_bytes_(required_bytes) {}
  std::uint64_t required_bytes() const { return required_bytes_; }

 private:
  std::uint64_t required_bytes_;
};

// Throws std::invalid_argument unless d is a complete automaton.
inline void validate(const Dfa& d) {
  if (d.num_states < 1) throw std::invalid_argument("automaton needs at least one state");
  if (d.delta.size() != d.alphabet_size)
    throw std::invalid_argument("transition table has wrong number of letter rows");
  for (std::size_t a = 0; a < d.delta.size(); ++a) {
    if (d.delta[a].size() != d.num_states)
      throw std::invalid_argument("transition row " + std::to_string(a) + " has wrong length");
    for (State t : d.delta[a]) {
      if (t >= d.num_states)
        throw std::invalid_argument("transition target out of range in row " + std::to_string(a));
    }
  }
  if (d.accepting.size() != d.num_states)
    throw std::invalid_argument("accepting indicator has wrong length");
  if (d.initial >= d.num_states) throw std::invalid_argument("initial state out of range");
}

// Relabels an arbitrary block assignment by order of first occurrence, so
// equal raw labels map to equal canonical labels and vice versa.
inline Partition canonicalize(std::span<const std::uint32_t> raw_block) {
  Partition p;
  p.block.resize(raw_block.size());
  std::unordered_map<std::uint32_t, std::uint32_t> relabel;
  relabel.reserve(64);
  for (std::size_t i = 0; i < raw_block.size(); ++i) {
    auto [it, fresh] =
        relabel.try_emplace(raw_block[i], static_cast<std::uint32_t>(relabel.size()));
    (void)fresh;
    p.block[i] = it->second;
  }
  p.num_blocks = static_cast<std::uint32_t>(relabel.size());
  return p;
}

inline Partition canonicalize(const std::vector<std::uint32_t>& raw_block) {
  return canonicalize(std::span<const std::uint32_t>(raw_block));
}

// True iff both assignments group states identically. Throws
// std::invalid_argument when the state counts differ.
inline bool partitions_equal(const Partition& p, const Partition& q) {
  if (p.block.size() != q.block.size())
    throw std::invalid_argument("partitions cover different state counts");
  return canonicalize(p.block).block == canonicalize(q.block).block;
}

// Keeps exactly the states reachable from the initial state, renumbered
// densely in ascending original order. The language is unchanged.
inline Dfa remove_unreachable(const Dfa& d) {
  std::vector<std::uint8_t> seen(d.num_states, 0);
  std::vector<State> queue;
  queue.push_back(d.initial);
  seen[d.initial] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    State q = queue[head];
    for (std::uint32_t a = 0; a < d.alphabet_size; ++a) {
      State t = d.delta[a][q];
      if (!seen[t]) {
        seen[t] = 1;
        queue.push_back(t);
      }
    }
  }
  std::vector<State> renumber(d.num_states, 0);
  std::uint32_t kept = 0;
  for (State q = 0; q < d.num_states; ++q) {
    if (seen[q]) renumber[q] = kept++;
  }
  Dfa out;
  out.num_states = kept;
  out.alphabet_size = d.alphabet_size;
  out.delta.assign(d.alphabet_size, std::vector<State>(kept));
  out.accepting.resize(kept);
  for (State q = 0; q < d.num_states; ++q) {
    if (!seen[q]) continue;
    State nq = renumber[q];
    out.accepting[nq] = d.accepting[q];
    for (std::uint32_t a = 0; a < d.alphabet_size; ++a) {
      out.delta[a][nq] = renumber[d.delta[a][q]];
    }
  }
  out.initial = renumber[d.initial];
  return out;
}

namespace detail {

inline std::chrono::steady_clock::time_point run_deadline(
    std::chrono::steady_clock::time_point start, std::int64_t timeout_ms) {
  if (timeout_ms <= 0) return std::chrono::steady_clock::time_point::max();
  return start + std::chrono::milliseconds(timeout_ms);
}

inline double elapsed_ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

struct U32VecHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (std::uint32_t x : v) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

// Sequential fixed-point refinement: start from the accepting/rejecting
// split (one block if a side is empty) and regroup by full successor-block
// signature until the block count stops growing. Two states end up in one
// block iff they are language-equivalent. Signature grouping uses hashing
// per round; this is a reference oracle, not a fast minimizer.
inline Partition moore_oracle(const Dfa& d, RunStats* stats = nullptr) {
  const std::uint32_t n = d.num_states;
  const std::uint32_t k = d.alphabet_size;
  std::vector<std::uint32_t> block(n);
  for (State q = 0; q < n; ++q) block[q] = d.accepting[q] ? 0 : 1;
  std::uint32_t num_blocks = canonicalize(block).num_blocks;
  std::uint64_t rounds = 0;
  while (true) {
    ++rounds;
    std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, detail::U32VecHash> groups;
    groups.reserve(num_blocks * 2);
    std::vector<std::uint32_t> next(n);
    std::vector<std::uint32_t> key(k + 1);
    for (State q = 0; q < n; ++q) {
      key[0] = block[q];
      for (std::uint32_t a = 0; a < k; ++a) key[a + 1] = block[d.delta[a][q]];
      auto [it, fresh] = groups.try_emplace(key, static_cast<std::uint32_t>(groups.size()));
      (void)fresh;
      next[q] = it->second;
    }
    const auto count = static_cast<std::uint32_t>(groups.size());
    block = std::move(next);
    if (count == num_blocks) break;
    num_blocks = count;
  }
  if (stats != nullptr) {
    stats->iterations = rounds;
    stats->status = RunStatus::ok;
  }
  return canonicalize(block);
}

// Builds the automaton induced on the blocks of p. Throws
// std::invalid_argument when p is not canonical over d's states, when two
// states of one block disagree on some letter's target block, or when a
// block mixes accepting and rejecting states.
inline Dfa quotient(const Dfa& d, const Partition& p) {
  if (p.block.size() != d.num_states)
    throw std::invalid_argument("partition covers a different state count");
  const Partition canon = canonicalize(p.block);
  if (canon.block != p.block || canon.num_blocks != p.num_blocks)
    throw std::invalid_argument("partition is not in canonical form");
  const std::uint32_t blocks = p.num_blocks;
  Dfa out;
  out.num_states = blocks;
  out.alphabet_size = d.alphabet_size;
  out.delta.assign(d.alphabet_size, std::vector<State>(blocks, 0));
  out.accepting.assign(blocks, 0);
  std::vector<std::uint8_t> defined(blocks, 0);
  for (State q = 0; q < d.num_states; ++q) {
    const std::uint32_t b = p.block[q];
    if (!defined[b]) {
      defined[b] = 1;
      out.accepting[b] = d.accepting[q];
      for (std::uint32_t a = 0; a < d.alphabet_size; ++a) {
        out.delta[a][b] = p.block[d.delta[a][q]];
      }
      continue;
    }
    if (out.accepting[b] != d.accepting[q])
      throw std::invalid_argument("inconsistent partition: block " + std::to_string(b) +
                                  " mixes accepting and rejecting states");
    for (std::uint32_t a = 0; a < d.alphabet_size; ++a) {
      if (out.delta[a][b] != p.block[d.delta[a][q]])
        throw std::invalid_argument("inconsistent partition: block " + std::to_string(b) +
                                    " splits on letter " + std::to_string(a));
    }
  }
  out.initial = p.block[d.initial];
  return out;
}

// True iff both automata accept the same language, decided by breadth-first
// search over the product from the pair of initial states. Throws
// std::invalid_argument when the alphabet sizes differ.
inline bool language_equivalent(const Dfa& a, const Dfa& b) {
  if (a.alphabet_size != b.alphabet_size)
    throw std::invalid_argument("alphabet sizes differ");
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::pair<State, State>> queue;
  auto pack = [](State x, State y) {
    return (static_cast<std::uint64_t>(x) << 32) | y;
  };
  queue.emplace_back(a.initial, b.initial);
  seen.insert(pack(a.initial, b.initial));
  for (std::size_t head = 0; head < queue.size(); ++head) {
    auto [qa, qb] = queue[head];
    if (a.is_accepting(qa) != b.is_accepting(qb)) return false;
    for (std::uint32_t letter = 0; letter < a.alphabet_size; ++letter) {
      State ta = a.delta[letter][qa];
      State tb = b.delta[letter][qb];
      if (seen.insert(pack(ta, tb)).second) queue.emplace_back(ta, tb);
    }
  }
  return true;
}

// Runs the word (a sequence of letter indices) from the initial state.
inline bool accepts(const Dfa& d, std::span<const std::uint32_t> word) {
  State q = d.initial;
  for (std::uint32_t letter : word) {
    if (letter >= d.alphabet_size) throw std::invalid_argument("letter out of range");
    q = d.delta[letter][q];
  }
  return d.is_accepting(q);
}

inline bool accepts(const Dfa& d, const std::vector<std::uint32_t>& word) {
  return accepts(d, std::span<const std::uint32_t>(word));
}

}  // namespace dfamin
