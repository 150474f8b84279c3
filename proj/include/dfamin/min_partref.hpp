#pragma once

// Leader-election partition refinement. Blocks are named by a leader state;
// each pass elects one splitter per block through concurrent writes and
// moves every state that disagrees with its leader to the elected splitter.
// Two variants: a two-phase pass (elect, then split) and a fused pass that
// elects with compare-and-swap while splitting.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <vector>

#include "dfamin/core.hpp"
#include "dfamin/substrate.hpp"

namespace dfamin {

// Per-pass snapshots for diagnostics and invariant tests.
struct PrTrace {
  std::vector<std::vector<std::uint32_t>> leader_arrays;  // raw leader ids
  std::vector<Partition> partitions;                      // canonical form
};

struct PrOptions {
  substrate::RacePolicy policy = substrate::RacePolicy::arbitrary_winner;
  std::int64_t timeout_ms = 300'000;
  PrTrace* trace = nullptr;
};

namespace detail {

// Refinement core over an arbitrary set of transition rows (the expanded
// alphabet of the partial-closure algorithm reuses it unchanged).
//
// Split checks inside one pass read a frozen copy of the leader array taken
// at the start of the pass, so a pass refines the partition by exactly one
// step no matter how the loop bodies are scheduled. Election cells are reset
// after every pass; stale winners from an earlier pass would corrupt later
// elections.
inline MinResult leader_election_pr(std::uint32_t n,
                                    const std::vector<std::vector<State>>& rows,
                                    const std::vector<std::uint8_t>& accepting,
                                    const PrOptions& opt, bool fused_cas) {
  const auto start = std::chrono::steady_clock::now();
  const auto deadline = run_deadline(start, opt.timeout_ms);
  const std::size_t letters = rows.size();
  MinResult out;

  // initial leaders: the smallest state of each acceptance class; a single
  // leader when one class is empty
  std::uint32_t leader_acc = substrate::kNoLeader;
  std::uint32_t leader_rej = substrate::kNoLeader;
  for (State q = 0; q < n; ++q) {
    if (accepting[q] != 0) {
      if (leader_acc == substrate::kNoLeader) leader_acc = q;
    } else {
      if (leader_rej == substrate::kNoLeader) leader_rej = q;
    }
  }
  if (leader_acc == substrate::kNoLeader) leader_acc = leader_rej;
  if (leader_rej == substrate::kNoLeader) leader_rej = leader_acc;

  std::vector<std::uint32_t> block(n);
  for (State q = 0; q < n; ++q) block[q] = accepting[q] != 0 ? leader_acc : leader_rej;

  std::unique_ptr<std::atomic<std::uint32_t>[]> new_leader(new std::atomic<std::uint32_t>[n]);
  substrate::par_for(n, [&](std::size_t q) {
    new_leader[q].store(substrate::kNoLeader, std::memory_order_relaxed);
  });

  std::vector<std::uint32_t> frozen(n);
  std::atomic<bool> stable{false};
  RunStats stats;

  while (!stable.load(std::memory_order_relaxed)) {
    if (std::chrono::steady_clock::now() > deadline) {
      stats.status = RunStatus::timeout;
      stats.elapsed_ms = elapsed_ms_since(start);
      out.stats = stats;
      return out;
    }
    stable.store(true, std::memory_order_relaxed);
    frozen = block;

    if (!fused_cas) {
      // phase A: every state that differs from its leader on some letter is
      // an election candidate for its block's cell
      substrate::par_for(n, [&](std::size_t qi) {
        const auto q = static_cast<State>(qi);
        const std::uint32_t leader = frozen[q];
        for (std::size_t a = 0; a < letters; ++a) {
          if (frozen[rows[a][q]] != frozen[rows[a][leader]]) {
            substrate::elect(new_leader[leader], q, opt.policy);
            break;
          }
        }
      });
      // phase B: re-evaluate the same frozen condition and move split states
      // to the winner; each state writes only its own cell
      substrate::par_for(n, [&](std::size_t qi) {
        const auto q = static_cast<State>(qi);
        const std::uint32_t leader = frozen[q];
        for (std::size_t a = 0; a < letters; ++a) {
          if (frozen[rows[a][q]] != frozen[rows[a][leader]]) {
            block[q] = new_leader[leader].load(std::memory_order_relaxed);
            stable.store(false, std::memory_order_relaxed);
            break;
          }
        }
      });
    } else {
      // fused pass: first compare-and-swap on the block's cell wins the
      // election, losers read the winner from the cell
      substrate::par_for(n, [&](std::size_t qi) {
        const auto q = static_cast<State>(qi);
        const std::uint32_t leader = frozen[q];
        for (std::size_t a = 0; a < letters; ++a) {
          if (frozen[rows[a][q]] != frozen[rows[a][leader]]) {
            std::uint32_t expected = substrate::kNoLeader;
            std::uint32_t winner = q;
            if (!new_leader[leader].compare_exchange_strong(expected, q,
                                                            std::memory_order_relaxed)) {
              winner = expected;
            }
            block[q] = winner;
            stable.store(false, std::memory_order_relaxed);
            break;
          }
        }
      });
    }

    ++stats.iterations;
    substrate::par_for(n, [&](std::size_t q) {
      new_leader[q].store(substrate::kNoLeader, std::memory_order_relaxed);
    });
    if (opt.trace != nullptr) {
      opt.trace->leader_arrays.push_back(block);
      opt.trace->partitions.push_back(canonicalize(block));
    }
  }

  stats.elapsed_ms = elapsed_ms_since(start);
  stats.peak_memory_estimate = static_cast<std::uint64_t>(n) * 12;  // block + frozen + cells
  stats.status = RunStatus::ok;
  out.partition = canonicalize(block);
  out.stats = stats;
  return out;
}

}  // namespace detail

// Two-phase leader-election refinement.
inline MinResult naive_pr(const Dfa& d, const PrOptions& opt = {}) {
  return detail::leader_election_pr(d.num_states, d.delta, d.accepting, opt, false);
}

inline MinResult naive_pr(const Dfa& d, substrate::RacePolicy policy,
                          std::int64_t timeout_ms = 300'000) {
  PrOptions opt;
  opt.policy = policy;
  opt.timeout_ms = timeout_ms;
  return naive_pr(d, opt);
}

// Fused variant: election and split in one pass via compare-and-swap.
// Produces the same partition as naive_pr on every input.
inline MinResult naive_pr_cas(const Dfa& d, std::int64_t timeout_ms = 300'000,
                              PrTrace* trace = nullptr) {
  PrOptions opt;
  opt.timeout_ms = timeout_ms;
  opt.trace = trace;
  return detail::leader_election_pr(d.num_states, d.delta, d.accepting, opt, true);
}

}  // namespace dfamin
