#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "dfamin/generators.hpp"
#include "dfamin/min_partref.hpp"

using namespace dfamin;
using substrate::RacePolicy;

namespace {

PrOptions with_policy(RacePolicy policy, PrTrace* trace = nullptr) {
  PrOptions opt;
  opt.policy = policy;
  opt.trace = trace;
  return opt;
}

// new labels equal implies old labels equal
bool refines(const Partition& newer, const Partition& older) {
  std::vector<std::uint32_t> seen(newer.num_blocks, 0xFFFFFFFFu);
  for (std::size_t q = 0; q < newer.block.size(); ++q) {
    std::uint32_t& old_label = seen[newer.block[q]];
    if (old_label == 0xFFFFFFFFu) {
      old_label = older.block[q];
    } else if (old_label != older.block[q]) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("unary rings need one pass per splitting depth", "[partref]") {
  for (std::size_t n : {5, 6, 7, 8, 9}) {
    const Dfa d = fib_dfa(n);
    const MinResult r = naive_pr(d, with_policy(RacePolicy::deterministic_min));
    REQUIRE(r.stats.status == RunStatus::ok);
    REQUIRE(r.partition.num_blocks == d.num_states);
    REQUIRE(r.stats.iterations == d.num_states - 1);
  }
}

TEST_CASE("degenerate acceptance classes collapse immediately", "[partref]") {
  const Dfa all_acc = random_dfa(12, 2, 3, 1.0);
  const MinResult r = naive_pr(all_acc, with_policy(RacePolicy::deterministic_min));
  REQUIRE(r.partition.num_blocks == 1);
  REQUIRE(r.stats.iterations == 1);

  const Dfa none_acc = random_dfa(12, 2, 3, 0.0);
  const MinResult r2 = naive_pr(none_acc, with_policy(RacePolicy::deterministic_min));
  REQUIRE(r2.partition.num_blocks == 1);
  REQUIRE(r2.stats.iterations == 1);
}

TEST_CASE("bit splitters halve every block once per pass", "[partref]") {
  for (std::size_t n = 1; n <= 10; ++n) {
    const Dfa b = bit_splitter(n);
    const MinResult r = naive_pr(b, with_policy(RacePolicy::deterministic_min));
    REQUIRE(r.stats.status == RunStatus::ok);
    REQUIRE(r.partition.num_blocks == (1u << n));
    // n-1 splitting passes plus the final stable pass
    REQUIRE(r.stats.iterations == std::max<std::uint64_t>(n, 1));
  }
}

TEST_CASE("the refinement agrees with the sequential oracle", "[partref]") {
  SplitMix64 rng(51);
  for (int round = 0; round < 50; ++round) {
    const std::uint32_t n = 1 + static_cast<std::uint32_t>(rng.below(200));
    const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng.below(4));
    const double prob = std::vector<double>{0.0, 0.1, 0.5, 1.0}[round % 4];
    const Dfa d = random_dfa(n, k, rng.next(), prob);
    const Partition oracle = moore_oracle(d);
    const MinResult r = naive_pr(d, with_policy(RacePolicy::deterministic_min));
    REQUIRE(r.stats.status == RunStatus::ok);
    REQUIRE(partitions_equal(r.partition, oracle));
  }
}

TEST_CASE("election policy never changes the final partition", "[partref]") {
  SplitMix64 rng(52);
  for (int round = 0; round < 30; ++round) {
    const Dfa d = random_dfa(1 + static_cast<std::uint32_t>(rng.below(120)),
                             1 + static_cast<std::uint32_t>(rng.below(3)), rng.next(), 0.3);
    const MinResult lo = naive_pr(d, with_policy(RacePolicy::deterministic_min));
    const MinResult hi = naive_pr(d, with_policy(RacePolicy::deterministic_max));
    const MinResult any = naive_pr(d, with_policy(RacePolicy::arbitrary_winner));
    REQUIRE(partitions_equal(lo.partition, hi.partition));
    REQUIRE(partitions_equal(lo.partition, any.partition));
  }
}

TEST_CASE("per-pass traces expose the refinement invariants", "[partref]") {
  SplitMix64 rng(53);
  for (int round = 0; round < 10; ++round) {
    const Dfa d = random_dfa(2 + static_cast<std::uint32_t>(rng.below(60)),
                             1 + static_cast<std::uint32_t>(rng.below(3)), rng.next(), 0.4);
    PrTrace trace;
    naive_pr(d, with_policy(RacePolicy::deterministic_min, &trace));

    for (std::size_t i = 1; i < trace.partitions.size(); ++i) {
      REQUIRE(refines(trace.partitions[i], trace.partitions[i - 1]));
    }
    // a block splits into at most two blocks per pass
    for (std::size_t i = 0; i < trace.partitions.size(); ++i) {
      REQUIRE(trace.partitions[i].num_blocks <= (std::uint64_t{2} << (i + 1)));
      if (i > 0) {
        REQUIRE(trace.partitions[i].num_blocks <= 2 * trace.partitions[i - 1].num_blocks);
      }
    }
    // leaders lead themselves at every pass boundary
    for (const auto& leaders : trace.leader_arrays) {
      for (std::uint32_t label : leaders) {
        REQUIRE(leaders[label] == label);
      }
    }
  }
}

TEST_CASE("the fused compare-and-swap variant matches", "[partref]") {
  const MinResult two_phase = naive_pr(bit_splitter(10), with_policy(RacePolicy::deterministic_min));
  const MinResult fused = naive_pr_cas(bit_splitter(10));
  REQUIRE(fused.stats.status == RunStatus::ok);
  REQUIRE(partitions_equal(two_phase.partition, fused.partition));

  const MinResult chain = naive_pr_cas(chain_dfa(64));
  REQUIRE(chain.partition.num_blocks == 64);
  REQUIRE(partitions_equal(chain.partition, moore_oracle(chain_dfa(64))));

  Dfa lone;
  lone.num_states = 1;
  lone.alphabet_size = 1;
  lone.delta = {{0}};
  lone.accepting = {1};
  lone.initial = 0;
  const MinResult single = naive_pr_cas(lone);
  REQUIRE(single.partition.num_blocks == 1);
  REQUIRE(single.stats.iterations == 1);

  SplitMix64 rng(54);
  for (int round = 0; round < 25; ++round) {
    const Dfa d = random_dfa(1 + static_cast<std::uint32_t>(rng.below(150)),
                             1 + static_cast<std::uint32_t>(rng.below(3)), rng.next(), 0.5);
    REQUIRE(partitions_equal(naive_pr_cas(d).partition,
                             naive_pr(d, with_policy(RacePolicy::deterministic_min)).partition));
  }
}

TEST_CASE("a too-small deadline reports a timeout", "[partref]") {
  PrOptions opt;
  opt.policy = RacePolicy::deterministic_min;
  opt.timeout_ms = 1;
  const MinResult r = naive_pr(fib_dfa(18), opt);
  REQUIRE(r.stats.status == RunStatus::timeout);
  REQUIRE(r.partition.block.empty());
}
