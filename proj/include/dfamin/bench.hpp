#pragma once

// Benchmark records and the CSV schema shared by the CLI and the tests,
// plus the algorithm dispatcher and generator-suite expansion.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dfamin/core.hpp"
#include "dfamin/generators.hpp"
#include "dfamin/min_partref.hpp"
#include "dfamin/min_sort.hpp"
#include "dfamin/min_trans.hpp"
#include "dfamin/min_transpr.hpp"

namespace dfamin {

enum class Algo { trans, naive, naive_cas, sort, transpr, oracle };

inline const char* to_string(Algo a) {
  switch (a) {
    case Algo::trans: return "trans";
    case Algo::naive: return "naive";
    case Algo::naive_cas: return "naive-cas";
    case Algo::sort: return "sort";
    case Algo::transpr: return "transpr";
    case Algo::oracle: return "oracle";
  }
  return "unknown";
}

inline std::optional<Algo> parse_algo(std::string_view name) {
  if (name == "trans") return Algo::trans;
  if (name == "naive") return Algo::naive;
  if (name == "naive-cas") return Algo::naive_cas;
  if (name == "sort") return Algo::sort;
  if (name == "transpr") return Algo::transpr;
  if (name == "oracle") return Algo::oracle;
  return std::nullopt;
}

inline constexpr std::string_view kCsvHeader =
    "benchmark,n,k,algo,output_blocks,iterations,closure_steps,time_ms,status";

struct BenchRecord {
  std::string benchmark;
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  Algo algo = Algo::oracle;
  std::uint32_t output_blocks = 0;
  RunStats stats;
};

// One CSV row; output_blocks and iterations stay empty unless the run
// finished ok.
inline std::string to_csv_row(const BenchRecord& r) {
  std::string row = r.benchmark + ',' + std::to_string(r.n) + ',' + std::to_string(r.k) + ',' +
                    to_string(r.algo) + ',';
  if (r.stats.status == RunStatus::ok) {
    row += std::to_string(r.output_blocks) + ',' + std::to_string(r.stats.iterations) + ',';
  } else {
    row += ",,";
  }
  row += std::to_string(r.stats.closure_steps) + ',';
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", r.stats.elapsed_ms);
  row += buf;
  row += ',';
  row += to_string(r.stats.status);
  return row;
}

struct AlgoRunConfig {
  substrate::RacePolicy policy = substrate::RacePolicy::arbitrary_winner;
  Limits limits;
};

inline MinResult run_algorithm(Algo algo, const Dfa& d, const AlgoRunConfig& cfg = {}) {
  switch (algo) {
    case Algo::trans:
      return trans_minimize(d, cfg.limits);
    case Algo::naive: {
      PrOptions opt;
      opt.policy = cfg.policy;
      opt.timeout_ms = cfg.limits.timeout_ms;
      return naive_pr(d, opt);
    }
    case Algo::naive_cas:
      return naive_pr_cas(d, cfg.limits.timeout_ms);
    case Algo::sort:
      return sort_pr(d, cfg.limits.timeout_ms);
    case Algo::transpr: {
      PrOptions opt;
      opt.policy = cfg.policy;
      opt.timeout_ms = cfg.limits.timeout_ms;
      return trans_pr(d, opt, cfg.limits);
    }
    case Algo::oracle: {
      const auto start = std::chrono::steady_clock::now();
      MinResult out;
      out.partition = moore_oracle(d, &out.stats);
      out.stats.elapsed_ms = detail::elapsed_ms_since(start);
      return out;
    }
  }
  throw std::invalid_argument("unknown algorithm");
}

// First witness pair for two partitions that group states differently: two
// states together in one partition and apart in the other. Empty when the
// partitions agree.
inline std::optional<std::pair<State, State>> disagreement_witness(const Partition& a,
                                                                   const Partition& b) {
  std::unordered_map<std::uint32_t, std::pair<State, std::uint32_t>> first_in_a;
  for (State q = 0; q < a.block.size(); ++q) {
    auto [it, fresh] = first_in_a.try_emplace(a.block[q], std::make_pair(q, b.block[q]));
    if (!fresh && it->second.second != b.block[q]) return std::make_pair(it->second.first, q);
  }
  std::unordered_map<std::uint32_t, std::pair<State, std::uint32_t>> first_in_b;
  for (State q = 0; q < b.block.size(); ++q) {
    auto [it, fresh] = first_in_b.try_emplace(b.block[q], std::make_pair(q, a.block[q]));
    if (!fresh && it->second.second != a.block[q]) return std::make_pair(it->second.first, q);
  }
  return std::nullopt;
}

struct SuiteItem {
  std::string name;
  Dfa dfa;
};

// Expands a generator suite spec: "<family>:<values>" where family is one of
// fib, bits, chain and values is a comma list of integers or a..b ranges,
// e.g. "fib:5..15" or "chain:4,64,1024".
inline std::vector<SuiteItem> expand_suite(std::string_view spec) {
  const std::size_t colon = spec.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("suite spec needs '<family>:<values>'");
  const std::string_view family = spec.substr(0, colon);
  const std::string_view values = spec.substr(colon + 1);
  if (family != "fib" && family != "bits" && family != "chain")
    throw std::invalid_argument("unknown suite family '" + std::string(family) + "'");

  std::vector<std::uint64_t> params;
  std::size_t pos = 0;
  while (pos <= values.size()) {
    std::size_t comma = values.find(',', pos);
    std::string_view item =
        values.substr(pos, comma == std::string_view::npos ? values.size() - pos : comma - pos);
    if (item.empty()) throw std::invalid_argument("empty value in suite spec");
    const std::size_t dots = item.find("..");
    auto parse_one = [&](std::string_view s) {
      std::uint64_t v = 0;
      if (s.empty()) throw std::invalid_argument("empty bound in suite spec");
      for (char c : s) {
        if (c < '0' || c > '9') throw std::invalid_argument("bad number in suite spec");
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
      }
      return v;
    };
    if (dots == std::string_view::npos) {
      params.push_back(parse_one(item));
    } else {
      const std::uint64_t lo = parse_one(item.substr(0, dots));
      const std::uint64_t hi = parse_one(item.substr(dots + 2));
      if (lo > hi) throw std::invalid_argument("descending range in suite spec");
      for (std::uint64_t v = lo; v <= hi; ++v) params.push_back(v);
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (params.empty()) throw std::invalid_argument("empty suite spec");

  std::vector<SuiteItem> items;
  items.reserve(params.size());
  for (std::uint64_t p : params) {
    SuiteItem item;
    item.name = std::string(family) + '_' + std::to_string(p);
    if (family == "fib") {
      item.dfa = fib_dfa(static_cast<std::size_t>(p));
    } else if (family == "bits") {
      item.dfa = bit_splitter(static_cast<std::size_t>(p));
    } else {
      item.dfa = chain_dfa(static_cast<std::size_t>(p));
    }
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace dfamin
