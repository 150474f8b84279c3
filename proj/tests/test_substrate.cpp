#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <atomic>
#include <numeric>
#include <set>
#include <vector>

#include "dfamin/generators.hpp"
#include "dfamin/substrate.hpp"
#include "test_util.hpp"

using namespace dfamin;
using namespace dfamin::substrate;
using dfamin_test::WorkerGuard;

TEST_CASE("par_for visits every index exactly once", "[substrate]") {
  for (unsigned workers : {1u, 4u}) {
    WorkerGuard guard(workers);
    std::vector<std::uint32_t> cells(4, 99);
    par_for(4, [&](std::size_t i) { cells[i] = static_cast<std::uint32_t>(i); });
    REQUIRE(cells == std::vector<std::uint32_t>{0, 1, 2, 3});

    std::vector<std::atomic<std::uint32_t>> counts(1000);
    par_for(counts.size(), [&](std::size_t i) { counts[i].fetch_add(1); });
    for (auto& c : counts) REQUIRE(c.load() == 1);

    bool ran = false;
    par_for(0, [&](std::size_t) { ran = true; });
    REQUIRE_FALSE(ran);
  }
}

TEST_CASE("election policies resolve concurrent writes", "[substrate]") {
  for (unsigned workers : {1u, 4u}) {
    WorkerGuard guard(workers);

    std::atomic<std::uint32_t> cell{kNoLeader};
    par_for(4, [&](std::size_t i) {
      elect(cell, static_cast<std::uint32_t>(i), RacePolicy::deterministic_max);
    });
    REQUIRE(cell.load() == 3);

    cell.store(kNoLeader);
    par_for(4, [&](std::size_t i) {
      elect(cell, static_cast<std::uint32_t>(i), RacePolicy::deterministic_min);
    });
    REQUIRE(cell.load() == 0);

    cell.store(kNoLeader);
    par_for(4, [&](std::size_t i) {
      elect(cell, static_cast<std::uint32_t>(i), RacePolicy::arbitrary_winner);
    });
    REQUIRE(cell.load() <= 3);
  }
}

TEST_CASE("par_sort matches a sequential sort oracle", "[substrate]") {
  std::vector<int> small{3, 1, 2};
  par_sort(small, std::less<int>());
  REQUIRE(small == std::vector<int>{1, 2, 3});

  std::vector<int> empty;
  par_sort(empty, std::less<int>());
  REQUIRE(empty.empty());

  WorkerGuard guard(4);
  SplitMix64 rng(2024);
  std::vector<std::uint32_t> data(10000);
  for (auto& x : data) x = static_cast<std::uint32_t>(rng.below(500));
  std::vector<std::uint32_t> expected = data;
  std::sort(expected.begin(), expected.end());
  par_sort(data, std::less<std::uint32_t>());
  REQUIRE(data == expected);
}

TEST_CASE("adjacent_diff marks key changes", "[substrate]") {
  std::vector<char> items{'a', 'a', 'b', 'b', 'c'};
  auto neq = [](char x, char y) { return x != y; };
  REQUIRE(adjacent_diff(items, neq) == std::vector<std::uint32_t>{0, 0, 1, 0, 1});
  REQUIRE(adjacent_diff(std::vector<char>{'x'}, neq) == std::vector<std::uint32_t>{0});
}

TEST_CASE("inclusive_scan computes prefix sums", "[substrate]") {
  REQUIRE(inclusive_scan({0, 0, 1, 0, 1}) == std::vector<std::uint32_t>{0, 0, 1, 1, 2});
  REQUIRE(inclusive_scan({}).empty());
  REQUIRE(inclusive_scan({0, 0, 0, 0, 0}) == std::vector<std::uint32_t>{0, 0, 0, 0, 0});

  WorkerGuard guard(4);
  SplitMix64 rng(7);
  std::vector<std::uint32_t> data(10000);
  for (auto& x : data) x = static_cast<std::uint32_t>(rng.below(3));
  std::vector<std::uint32_t> expected(data.size());
  std::inclusive_scan(data.begin(), data.end(), expected.begin());
  REQUIRE(inclusive_scan(data) == expected);
}

TEST_CASE("scan of adjacent differences labels equal runs", "[substrate]") {
  SplitMix64 rng(99);
  for (int round = 0; round < 20; ++round) {
    const std::size_t n = 1 + rng.below(300);
    std::vector<std::uint32_t> sorted(n);
    for (auto& x : sorted) x = static_cast<std::uint32_t>(rng.below(8));
    std::sort(sorted.begin(), sorted.end());
    auto marks = adjacent_diff(sorted, [](std::uint32_t a, std::uint32_t b) { return a != b; });
    auto labels = inclusive_scan(marks);
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        if ((labels[i] == labels[j]) != (sorted[i] == sorted[j])) {
          ok = false;
          break;
        }
      }
    }
    REQUIRE(ok);
  }
}

TEST_CASE("worker count override round-trips", "[substrate]") {
  const unsigned base = worker_count();
  set_worker_count(3);
  REQUIRE(worker_count() == 3);
  set_worker_count(0);
  REQUIRE(worker_count() == base);
}
