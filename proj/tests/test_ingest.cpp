#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>
#include <vector>

#include "dfamin/core.hpp"
#include "dfamin/generators.hpp"
#include "dfamin/ingest.hpp"

using namespace dfamin;

namespace {

// direct nondeterministic simulation: does the word label a path from the
// initial state?
bool lts_has_path(const Lts& lts, const std::vector<std::uint32_t>& word) {
  std::set<State> current{lts.initial};
  for (std::uint32_t letter : word) {
    std::set<State> next;
    for (const auto& t : lts.transitions) {
      if (t.label == letter && current.count(t.src) != 0) next.insert(t.dst);
    }
    if (next.empty()) return false;
    current = std::move(next);
  }
  return true;
}

}  // namespace

TEST_CASE("parse_lts reads the line format", "[ingest]") {
  const Lts lts = parse_lts("des (0, 1, 2)\n(0, \"a\", 1)\n");
  REQUIRE(lts.num_states == 2);
  REQUIRE(lts.initial == 0);
  REQUIRE(lts.labels == std::vector<std::string>{"a"});
  REQUIRE(lts.transitions.size() == 1);
  REQUIRE(lts.transitions[0] == Lts::Transition{0, 0, 1});

  // unquoted labels are the same interchange format
  const Lts bare = parse_lts("des (0, 2, 3)\n(0, tau, 1)\n(1, \"send!x\", 2)\n");
  REQUIRE(bare.labels == std::vector<std::string>{"tau", "send!x"});

  // duplicates are kept, labels interned in first-appearance order
  const Lts dup = parse_lts("des (0, 3, 2)\n(0, \"b\", 1)\n(0, \"a\", 1)\n(0, \"b\", 1)\n");
  REQUIRE(dup.transitions.size() == 3);
  REQUIRE(dup.labels == std::vector<std::string>{"b", "a"});
}

TEST_CASE("parse_lts rejects malformed input with line numbers", "[ingest]") {
  REQUIRE_THROWS_AS(parse_lts("des (0, 2, 2)\n(0, \"a\", 1)\n"), ParseError);
  try {
    parse_lts("des (0, 1, 2)\n(0, \"a\", 1)\n(1, \"a\", 0)\n");
    FAIL("expected count mismatch");
  } catch (const ParseError& e) {
    REQUIRE(e.line() == 3);
  }
  try {
    parse_lts("des (0, 1, 2)\n(0, \"a\" 1)\n");
    FAIL("expected malformed transition");
  } catch (const ParseError& e) {
    REQUIRE(e.line() == 2);
  }
  REQUIRE_THROWS_AS(parse_lts("des (0, 1, 2)\n(0, \"a\", 5)\n"), ParseError);
  REQUIRE_THROWS_AS(parse_lts("des (9, 0, 2)\n"), ParseError);
  REQUIRE_THROWS_AS(parse_lts(""), ParseError);
}

TEST_CASE("determinize runs the subset construction", "[ingest]") {
  // a deterministic complete system maps to an isomorphic automaton
  const Lts det = parse_lts("des (0, 4, 2)\n(0, \"a\", 1)\n(1, \"a\", 0)\n(0, \"b\", 0)\n(1, \"b\", 1)\n");
  const PartialDfa p = determinize(det);
  REQUIRE(p.num_states == 2);
  REQUIRE(p.alphabet_size == 2);
  REQUIRE(p.delta[0] == std::vector<State>{1, 0});
  REQUIRE(p.delta[1] == std::vector<State>{0, 1});

  // nondeterministic branch creates the union subset
  const Lts branch = parse_lts("des (0, 2, 3)\n(0, \"a\", 1)\n(0, \"a\", 2)\n");
  const PartialDfa q = determinize(branch);
  REQUIRE(q.num_states == 2);  // {0} and {1,2}
  REQUIRE(q.delta[0][0] == 1);
  REQUIRE(q.delta[0][1] == PartialDfa::kMissing);

  // hand-executed subset expansion: {0} -a-> {1,2} -b-> {0,2} -b-> {2}
  const Lts manual =
      parse_lts("des (0, 4, 3)\n(0, \"a\", 1)\n(0, \"a\", 2)\n(1, \"b\", 0)\n(2, \"b\", 2)\n");
  const PartialDfa m = determinize(manual);
  REQUIRE(m.num_states == 4);
  REQUIRE(m.delta[0] ==
          std::vector<State>{1, PartialDfa::kMissing, 1, PartialDfa::kMissing});
  REQUIRE(m.delta[1] == std::vector<State>{PartialDfa::kMissing, 2, 3, 3});

  // explosion guard
  const Lts wide = parse_lts(
      "des (0, 6, 4)\n(0, \"a\", 1)\n(0, \"a\", 2)\n(1, \"a\", 0)\n(1, \"a\", 3)\n(2, \"a\", "
      "3)\n(3, \"a\", 1)\n");
  REQUIRE_THROWS_AS(determinize(wide, 2), SubsetBudgetExceeded);
}

TEST_CASE("complete adds one rejecting sink only when needed", "[ingest]") {
  const Lts det = parse_lts("des (0, 4, 2)\n(0, \"a\", 1)\n(1, \"a\", 0)\n(0, \"b\", 0)\n(1, \"b\", 1)\n");
  const Dfa full = complete(determinize(det));
  REQUIRE(full.num_states == 2);  // already complete, no sink
  REQUIRE(full.accepting == std::vector<std::uint8_t>{1, 1});

  const Lts lonely = parse_lts("des (0, 1, 1)\n(0, \"a\", 0)\n");
  const Dfa self = complete(determinize(lonely));
  REQUIRE(self.num_states == 1);

  // one state, one letter mentioned nowhere reachable: sink appears
  const Lts gap = parse_lts("des (0, 1, 2)\n(1, \"a\", 1)\n");
  const Dfa with_sink = complete(determinize(gap));
  REQUIRE(with_sink.num_states == 2);
  REQUIRE(with_sink.accepting == std::vector<std::uint8_t>{1, 0});
  REQUIRE(with_sink.delta[0] == std::vector<State>{1, 1});
  REQUIRE_NOTHROW(validate(with_sink));

  // chain-shaped partial system: enumerate every word up to length 6
  const Lts chainish = parse_lts(
      "des (0, 3, 3)\n(0, \"a\", 1)\n(1, \"b\", 2)\n(2, \"a\", 2)\n");
  const Dfa d = complete(determinize(chainish));
  REQUIRE_NOTHROW(validate(d));
  const std::uint32_t k = d.alphabet_size;
  std::vector<std::uint32_t> word;
  for (std::uint64_t len = 0; len <= 6; ++len) {
    std::uint64_t total = 1;
    for (std::uint64_t i = 0; i < len; ++i) total *= k;
    for (std::uint64_t code = 0; code < total; ++code) {
      word.clear();
      std::uint64_t c = code;
      for (std::uint64_t i = 0; i < len; ++i) {
        word.push_back(static_cast<std::uint32_t>(c % k));
        c /= k;
      }
      REQUIRE(accepts(d, word) == lts_has_path(chainish, word));
    }
  }
}

TEST_CASE("automaton files round-trip bit-exactly", "[ingest]") {
  REQUIRE(write_dfa(chain_dfa(3)) == "DFA 1 3 1 0\nACC 1 2\n0: 1 2 2\n");

  const Dfa fib7 = fib_dfa(7);
  REQUIRE(read_dfa(write_dfa(fib7)) == fib7);

  SplitMix64 rng(17);
  for (int round = 0; round < 25; ++round) {
    const Dfa d = random_dfa(1 + static_cast<std::uint32_t>(rng.below(80)),
                             1 + static_cast<std::uint32_t>(rng.below(4)), rng.next(), 0.3);
    const std::string text = write_dfa(d);
    REQUIRE(write_dfa(read_dfa(text)) == text);
  }

  const Dfa none = bit_splitter(1);  // empty alphabet still serializes
  REQUIRE(read_dfa(write_dfa(none)) == none);
}

TEST_CASE("read_dfa names the missing or broken section", "[ingest]") {
  REQUIRE_THROWS_WITH(read_dfa("DFA 1 3 1 0\nACC 1 2\n"),
                      Catch::Matchers::ContainsSubstring("transition row"));
  REQUIRE_THROWS_WITH(read_dfa("DFA 1 3 1 0\n"),
                      Catch::Matchers::ContainsSubstring("ACC"));
  REQUIRE_THROWS_WITH(read_dfa("DFA 2 3 1 0\nACC 1 2\n0: 1 2 2\n"),
                      Catch::Matchers::ContainsSubstring("version"));
  REQUIRE_THROWS_AS(read_dfa("DFA 1 3 1 0\nACC 1 2\n0: 1 2 9\n"), ParseError);
  REQUIRE_THROWS_AS(read_dfa("DFA 1 3 1 0\nACC 1 7\n0: 1 2 2\n"), ParseError);
  REQUIRE_THROWS_AS(read_dfa("DFA 1 3 1 0\nACC 1 2\n0: 1 2 2\nleftover\n"), ParseError);
  REQUIRE_THROWS_AS(read_dfa("DFA 1 3 1 0\nACC 1 2\n1: 1 2 2\n"), ParseError);
}

TEST_CASE("partition files round-trip and stay canonical", "[ingest]") {
  const Partition p = moore_oracle(fib_dfa(7));
  const std::string text = write_partition(p);
  REQUIRE(read_partition(text) == p);
  REQUIRE(write_partition(read_partition(text)) == text);

  REQUIRE(write_partition(canonicalize(std::vector<std::uint32_t>{0, 0, 1})) ==
          "0 0\n1 0\n2 1\n");

  REQUIRE_THROWS_AS(read_partition("0 1\n1 0\n"), ParseError);  // not canonical
  REQUIRE_THROWS_AS(read_partition("0 0\n2 1\n"), ParseError);  // state gap
}

TEST_CASE("the ingestion pipeline is deterministic", "[ingest]") {
  const std::string text =
      "des (0, 5, 4)\n(0, \"a\", 1)\n(0, \"a\", 2)\n(1, \"b\", 3)\n(2, \"b\", 0)\n(3, \"a\", 3)\n";
  const Dfa first = complete(determinize(parse_lts(text)));
  const Dfa second = complete(determinize(parse_lts(text)));
  REQUIRE(write_dfa(first) == write_dfa(second));
}
