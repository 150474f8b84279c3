// dfamin: generate benchmark automata, ingest transition systems, minimize
// with any of the implemented algorithms, cross-check them against the
// sequential oracle, and emit CSV benchmark records.
//
// Exit codes: 0 ok, 2 usage or input error, 3 timeout, 4 capacity exceeded,
// 5 cross-check disagreement.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dfamin/dfamin.hpp"

namespace fs = std::filesystem;
using namespace dfamin;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitTimeout = 3;
constexpr int kExitCapacity = 4;
constexpr int kExitDisagree = 5;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
}

std::optional<substrate::RacePolicy> parse_policy(const std::string& name) {
  if (name == "arbitrary") return substrate::RacePolicy::arbitrary_winner;
  if (name == "min") return substrate::RacePolicy::deterministic_min;
  if (name == "max") return substrate::RacePolicy::deterministic_max;
  return std::nullopt;
}

int status_exit_code(RunStatus s) {
  switch (s) {
    case RunStatus::ok: return kExitOk;
    case RunStatus::timeout: return kExitTimeout;
    case RunStatus::capacity_exceeded: return kExitCapacity;
  }
  return kExitUsage;
}

void append_stats_row(const std::string& path, const BenchRecord& record) {
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  if (fresh) out << kCsvHeader << '\n';
  out << to_csv_row(record) << '\n';
}

struct GenArgs {
  std::string family;
  std::vector<std::uint64_t> params;
  std::uint64_t seed = 0;
  double accept_prob = 0.5;
  std::string output;
};

int run_gen(const GenArgs& args) {
  Dfa d;
  try {
    if (args.family == "fib") {
      if (args.params.size() != 1) throw std::invalid_argument("gen fib expects <n>");
      d = fib_dfa(args.params[0]);
    } else if (args.family == "bits") {
      if (args.params.size() != 1) throw std::invalid_argument("gen bits expects <n>");
      d = bit_splitter(args.params[0]);
    } else if (args.family == "chain") {
      if (args.params.size() != 1) throw std::invalid_argument("gen chain expects <len>");
      d = chain_dfa(args.params[0]);
    } else if (args.family == "random") {
      if (args.params.size() != 2) throw std::invalid_argument("gen random expects <n> <k>");
      if (args.params[0] > 0xFFFFFFFFull || args.params[1] > 0xFFFFFFFFull)
        throw std::invalid_argument("gen random parameters out of range");
      if (args.accept_prob < 0.0 || args.accept_prob > 1.0)
        throw std::invalid_argument("--accept-prob must be in [0, 1]");
      d = random_dfa(static_cast<std::uint32_t>(args.params[0]),
                     static_cast<std::uint32_t>(args.params[1]), args.seed, args.accept_prob);
    } else {
      throw std::invalid_argument("unknown family '" + args.family +
                                  "' (expected fib, bits, chain or random)");
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "dfamin gen: " << e.what() << '\n';
    return kExitUsage;
  }
  write_output(args.output, write_dfa(d));
  return kExitOk;
}

struct IngestArgs {
  std::string input;
  std::string output;
  std::uint64_t budget = std::uint64_t{1} << 22;
};

int run_ingest(const IngestArgs& args) {
  std::string text;
  try {
    text = read_file(args.input);
  } catch (const std::exception& e) {
    std::cerr << "dfamin ingest: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    const Lts lts = parse_lts(text);
    const Dfa d = complete(determinize(lts, args.budget));
    write_output(args.output, write_dfa(d));
    return kExitOk;
  } catch (const SubsetBudgetExceeded& e) {
    std::cerr << "dfamin ingest: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const ParseError& e) {
    std::cerr << "dfamin ingest: " << args.input << ": " << e.what() << '\n';
    return kExitUsage;
  }
}

struct MinimizeArgs {
  std::string input;
  std::string algo = "naive";
  std::string policy = "arbitrary";
  std::int64_t timeout_ms = 300'000;
  std::uint64_t max_mem_bytes = std::uint64_t{16} << 30;
  std::string stats_path;
  std::string output;
};

int run_minimize(const MinimizeArgs& args) {
  const auto algo = parse_algo(args.algo);
  if (!algo) {
    std::cerr << "dfamin minimize: unknown algorithm '" << args.algo << "'\n";
    return kExitUsage;
  }
  const auto policy = parse_policy(args.policy);
  if (!policy) {
    std::cerr << "dfamin minimize: unknown policy '" << args.policy << "'\n";
    return kExitUsage;
  }
  Dfa d;
  try {
    d = read_dfa(read_file(args.input));
    validate(d);
  } catch (const std::exception& e) {
    std::cerr << "dfamin minimize: " << args.input << ": " << e.what() << '\n';
    return kExitUsage;
  }

  AlgoRunConfig cfg;
  cfg.policy = *policy;
  cfg.limits.timeout_ms = args.timeout_ms;
  cfg.limits.max_memory_bytes = args.max_mem_bytes;
  const MinResult result = run_algorithm(*algo, d, cfg);

  if (!args.stats_path.empty()) {
    BenchRecord record;
    record.benchmark = fs::path(args.input).stem().string();
    record.n = d.num_states;
    record.k = d.alphabet_size;
    record.algo = *algo;
    record.output_blocks = result.partition.num_blocks;
    record.stats = result.stats;
    append_stats_row(args.stats_path, record);
  }

  if (result.stats.status != RunStatus::ok) {
    std::cerr << "dfamin minimize: " << to_string(result.stats.status);
    if (result.stats.status == RunStatus::capacity_exceeded) {
      if (*algo == Algo::trans) {
        std::cerr << ": trans requires " << u128_to_string(trans_required_bytes(d.num_states))
                  << " bytes for the reachability matrix, limit is " << args.max_mem_bytes;
      } else if (*algo == Algo::transpr) {
        std::cerr << ": alphabet expansion requires "
                  << expand_required_bytes(d.num_states, d.alphabet_size)
                  << " bytes, limit is " << args.max_mem_bytes;
      }
    }
    std::cerr << '\n';
    return status_exit_code(result.stats.status);
  }
  write_output(args.output, write_partition(result.partition));
  return kExitOk;
}

struct CheckArgs {
  std::string input;
  std::string policy = "min";
  std::int64_t timeout_ms = 300'000;
  std::uint64_t max_mem_bytes = std::uint64_t{16} << 30;
  std::uint32_t trans_max_states = 64;
};

int run_check(const CheckArgs& args) {
  const auto policy = parse_policy(args.policy);
  if (!policy) {
    std::cerr << "dfamin check: unknown policy '" << args.policy << "'\n";
    return kExitUsage;
  }
  Dfa d;
  try {
    d = read_dfa(read_file(args.input));
    validate(d);
  } catch (const std::exception& e) {
    std::cerr << "dfamin check: " << args.input << ": " << e.what() << '\n';
    return kExitUsage;
  }

  AlgoRunConfig cfg;
  cfg.policy = *policy;
  cfg.limits.timeout_ms = args.timeout_ms;
  cfg.limits.max_memory_bytes = args.max_mem_bytes;

  std::vector<Algo> algos = {Algo::oracle, Algo::naive, Algo::naive_cas, Algo::sort,
                             Algo::transpr};
  if (d.num_states <= args.trans_max_states &&
      trans_required_bytes(d.num_states) <= cfg.limits.max_memory_bytes) {
    algos.push_back(Algo::trans);
  }

  std::vector<std::pair<Algo, MinResult>> results;
  for (Algo algo : algos) {
    MinResult r = run_algorithm(algo, d, cfg);
    std::cout << to_string(algo) << ": status=" << to_string(r.stats.status);
    if (r.stats.status == RunStatus::ok) {
      std::cout << " blocks=" << r.partition.num_blocks << " iterations=" << r.stats.iterations;
    }
    std::cout << '\n';
    if (r.stats.status != RunStatus::ok) {
      std::cerr << "dfamin check: " << to_string(algo) << " did not finish: "
                << to_string(r.stats.status) << '\n';
      return status_exit_code(r.stats.status);
    }
    results.emplace_back(algo, std::move(r));
  }

  for (std::size_t i = 1; i < results.size(); ++i) {
    const Partition& base = results[0].second.partition;
    const Partition& other = results[i].second.partition;
    if (!partitions_equal(base, other)) {
      const auto witness = disagreement_witness(base, other);
      std::cerr << "dfamin check: " << to_string(results[0].first) << " and "
                << to_string(results[i].first) << " disagree";
      if (witness) {
        std::cerr << " on states " << witness->first << " and " << witness->second;
      }
      std::cerr << '\n';
      return kExitDisagree;
    }
  }

  const Dfa quot = quotient(d, results[0].second.partition);
  if (!language_equivalent(d, quot)) {
    std::cerr << "dfamin check: quotient is not language-equivalent to the input\n";
    return kExitDisagree;
  }
  std::cout << "all algorithms agree: " << results[0].second.partition.num_blocks << " blocks\n";
  return kExitOk;
}

struct BenchArgs {
  std::vector<std::string> suites;
  std::string algos = "naive,naive-cas,sort,transpr,oracle";
  std::string policy = "arbitrary";
  std::int64_t timeout_ms = 300'000;
  std::uint64_t max_mem_bytes = std::uint64_t{16} << 30;
  int repeats = 5;
  std::string output;
};

int run_bench(const BenchArgs& args) {
  const auto policy = parse_policy(args.policy);
  if (!policy) {
    std::cerr << "dfamin bench: unknown policy '" << args.policy << "'\n";
    return kExitUsage;
  }
  if (args.repeats < 1) {
    std::cerr << "dfamin bench: --repeats must be positive\n";
    return kExitUsage;
  }

  std::vector<Algo> algos;
  {
    std::stringstream ss(args.algos);
    std::string name;
    while (std::getline(ss, name, ',')) {
      const auto algo = parse_algo(name);
      if (!algo) {
        std::cerr << "dfamin bench: unknown algorithm '" << name << "'\n";
        return kExitUsage;
      }
      algos.push_back(*algo);
    }
  }
  if (algos.empty()) {
    std::cerr << "dfamin bench: empty algorithm list\n";
    return kExitUsage;
  }

  std::vector<SuiteItem> items;
  for (const std::string& spec : args.suites) {
    if (fs::is_directory(spec)) {
      std::vector<fs::path> paths;
      for (const auto& entry : fs::directory_iterator(spec)) {
        const std::string ext = entry.path().extension().string();
        if (ext == ".dfa" || ext == ".aut") paths.push_back(entry.path());
      }
      std::sort(paths.begin(), paths.end());
      for (const auto& path : paths) {
        try {
          SuiteItem item;
          item.name = path.stem().string();
          if (path.extension() == ".aut") {
            item.dfa = complete(determinize(parse_lts(read_file(path.string()))));
          } else {
            item.dfa = read_dfa(read_file(path.string()));
          }
          validate(item.dfa);
          items.push_back(std::move(item));
        } catch (const std::exception& e) {
          std::cerr << "dfamin bench: " << path.string() << ": " << e.what() << '\n';
          return kExitUsage;
        }
      }
      continue;
    }
    try {
      auto expanded = expand_suite(spec);
      for (auto& item : expanded) items.push_back(std::move(item));
    } catch (const std::invalid_argument& e) {
      std::cerr << "dfamin bench: " << e.what() << '\n';
      return kExitUsage;
    }
  }
  if (items.empty()) {
    std::cerr << "dfamin bench: empty suite\n";
    return kExitUsage;
  }

  AlgoRunConfig cfg;
  cfg.policy = *policy;
  cfg.limits.timeout_ms = args.timeout_ms;
  cfg.limits.max_memory_bytes = args.max_mem_bytes;

  std::string csv(kCsvHeader);
  csv += '\n';
  for (const SuiteItem& item : items) {
    for (Algo algo : algos) {
      double total_ms = 0.0;
      int runs = 0;
      MinResult last;
      for (int r = 0; r < args.repeats; ++r) {
        last = run_algorithm(algo, item.dfa, cfg);
        total_ms += last.stats.elapsed_ms;
        ++runs;
        if (last.stats.status != RunStatus::ok) break;  // don't repeat failures
      }
      BenchRecord record;
      record.benchmark = item.name;
      record.n = item.dfa.num_states;
      record.k = item.dfa.alphabet_size;
      record.algo = algo;
      record.output_blocks = last.partition.num_blocks;
      record.stats = last.stats;
      record.stats.elapsed_ms = total_ms / runs;
      csv += to_csv_row(record);
      csv += '\n';
    }
  }
  write_output(args.output, csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parallel DFA minimization toolkit"};
  app.require_subcommand(1);

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "generate a benchmark automaton");
  gen->add_option("family", gen_args.family, "fib | bits | chain | random")->required();
  gen->add_option("params", gen_args.params, "family parameters");
  gen->add_option("--seed", gen_args.seed, "random family seed");
  gen->add_option("--accept-prob", gen_args.accept_prob, "random family acceptance probability");
  gen->add_option("-o,--output", gen_args.output, "output path (default stdout)");

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "determinize and complete a transition system");
  ingest->add_option("input", ingest_args.input, "input .aut file")->required();
  ingest->add_option("-o,--output", ingest_args.output, "output path (default stdout)");
  ingest->add_option("--budget", ingest_args.budget, "subset-state cap (default 2^22)");

  MinimizeArgs min_args;
  auto* minimize = app.add_subcommand("minimize", "minimize an automaton file");
  minimize->add_option("input", min_args.input, "input .dfa file")->required();
  minimize->add_option("--algo", min_args.algo, "trans | naive | naive-cas | sort | transpr | oracle")
      ->required();
  minimize->add_option("--timeout-ms", min_args.timeout_ms, "timeout in ms (default 300000)");
  minimize->add_option("--max-mem-bytes", min_args.max_mem_bytes,
                       "memory guard in bytes (default 16 GiB)");
  minimize->add_option("--policy", min_args.policy, "arbitrary | min | max (default arbitrary)");
  minimize->add_option("--stats", min_args.stats_path, "append a CSV benchmark record here");
  minimize->add_option("-o,--output", min_args.output, "partition output path (default stdout)");

  CheckArgs check_args;
  auto* check = app.add_subcommand("check", "cross-check all algorithms against the oracle");
  check->add_option("input", check_args.input, "input .dfa file")->required();
  check->add_option("--timeout-ms", check_args.timeout_ms, "timeout in ms (default 300000)");
  check->add_option("--max-mem-bytes", check_args.max_mem_bytes,
                    "memory guard in bytes (default 16 GiB)");
  check->add_option("--policy", check_args.policy, "arbitrary | min | max (default min)");
  check->add_option("--trans-max-states", check_args.trans_max_states,
                    "include trans only up to this state count (default 64)");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "run benchmark suites and emit CSV records");
  bench->add_option("--suite", bench_args.suites,
                    "generator spec (fib:5..15, bits:3..12, chain:4,64,1024) or a directory "
                    "of .dfa/.aut files; repeatable")
      ->required();
  bench->add_option("--algos", bench_args.algos, "comma-separated algorithm list");
  bench->add_option("--policy", bench_args.policy, "arbitrary | min | max (default arbitrary)");
  bench->add_option("--timeout-ms", bench_args.timeout_ms, "timeout in ms (default 300000)");
  bench->add_option("--max-mem-bytes", bench_args.max_mem_bytes,
                    "memory guard in bytes (default 16 GiB)");
  bench->add_option("--repeats", bench_args.repeats, "timing repeats per record (default 5)");
  bench->add_option("-o,--output", bench_args.output, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return run_gen(gen_args);
    if (ingest->parsed()) return run_ingest(ingest_args);
    if (minimize->parsed()) return run_minimize(min_args);
    if (check->parsed()) return run_check(check_args);
    if (bench->parsed()) return run_bench(bench_args);
  } catch (const std::exception& e) {
    std::cerr << "dfamin: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
