#pragma once

// Ingestion pipeline and serialization: parse labelled transition systems in
// the line-oriented interchange format, determinize by subset construction,
// complete with a sink state, and read/write the automaton and partition
// file formats.

#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dfamin/core.hpp"

namespace dfamin {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Subset construction passed the configured state cap.
class SubsetBudgetExceeded : public std::runtime_error {
 public:
  explicit SubsetBudgetExceeded(std::size_t budget)
      : std::runtime_error("subset construction exceeded " + std::to_string(budget) + " states"),
        budget_(budget) {}
  std::size_t budget() const { return budget_; }

 private:
  std::size_t budget_;
};

namespace detail {

struct LineCursor {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line;

  explicit LineCursor(std::string_view t, std::size_t line_no) : text(t), line(line_no) {}

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }
  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }
  void expect(char c, const char* what) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c)
      throw ParseError(line, std::string("expected '") + c + "' " + what);
    ++pos;
  }
  std::uint64_t parse_uint(const char* what) {
    skip_ws();
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
      throw ParseError(line, std::string("expected number for ") + what);
    std::uint64_t v = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      v = v * 10 + static_cast<std::uint64_t>(text[pos] - '0');
      if (v > 0xFFFFFFFFull) throw ParseError(line, std::string(what) + " out of range");
      ++pos;
    }
    return v;
  }
  // quoted string, or a bare token up to the next comma
  std::string parse_label() {
    skip_ws();
    if (pos < text.size() && text[pos] == '"') {
      ++pos;
      std::size_t close = text.find('"', pos);
      if (close == std::string_view::npos) throw ParseError(line, "unterminated label quote");
      std::string label(text.substr(pos, close - pos));
      pos = close + 1;
      return label;
    }
    std::size_t stop = text.find(',', pos);
    if (stop == std::string_view::npos) throw ParseError(line, "missing label field");
    std::size_t end = stop;
    while (end > pos && (text[end - 1] == ' ' || text[end - 1] == '\t')) --end;
    if (end == pos) throw ParseError(line, "empty label");
    std::string label(text.substr(pos, end - pos));
    pos = stop;
    return label;
  }
};

inline std::vector<std::pair<std::size_t, std::string_view>> nonempty_lines(
    std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t line_no = 0;
  std::size_t i = 0;
  while (i <= text.size()) {
    std::size_t nl = text.find('\n', i);
    std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    ++line_no;
    std::string_view line = text.substr(i, end - i);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    bool blank = true;
    for (char c : line) {
      if (c != ' ' && c != '\t') {
        blank = false;
        break;
      }
    }
    if (!blank) lines.emplace_back(line_no, line);
    if (nl == std::string_view::npos) break;
    i = nl + 1;
  }
  return lines;
}

}  // namespace detail

// Line-oriented transition-system format:
//   des (<initial>, <num_transitions>, <num_states>)
//   (<src>, "<label>", <dst>)        one line per transition
// Labels may also appear unquoted. Duplicate transitions are kept; labels
// are interned to dense indices in first-appearance order.
inline Lts parse_lts(std::string_view text) {
  const auto lines = detail::nonempty_lines(text);
  if (lines.empty()) throw ParseError(1, "missing des header");

  detail::LineCursor header(lines[0].second, lines[0].first);
  header.skip_ws();
  if (header.text.substr(header.pos, 3) != "des")
    throw ParseError(header.line, "expected des header");
  header.pos += 3;
  header.expect('(', "after des");
  const std::uint64_t initial = header.parse_uint("initial state");
  header.expect(',', "after initial state");
  const std::uint64_t num_transitions = header.parse_uint("transition count");
  header.expect(',', "after transition count");
  const std::uint64_t num_states = header.parse_uint("state count");
  header.expect(')', "closing header");
  if (!header.at_end()) throw ParseError(header.line, "trailing characters after header");
  if (num_states == 0) throw ParseError(header.line, "state count must be positive");
  if (initial >= num_states) throw ParseError(header.line, "initial state out of range");

  Lts lts;
  lts.num_states = static_cast<std::uint32_t>(num_states);
  lts.initial = static_cast<State>(initial);
  std::unordered_map<std::string, std::uint32_t> label_ids;
  lts.transitions.reserve(num_transitions);

  for (std::size_t li = 1; li < lines.size(); ++li) {
    detail::LineCursor cur(lines[li].second, lines[li].first);
    cur.expect('(', "starting transition");
    const std::uint64_t src = cur.parse_uint("source state");
    cur.expect(',', "after source state");
    std::string label = cur.parse_label();
    cur.expect(',', "after label");
    const std::uint64_t dst = cur.parse_uint("target state");
    cur.expect(')', "closing transition");
    if (!cur.at_end()) throw ParseError(cur.line, "trailing characters after transition");
    if (src >= num_states) throw ParseError(cur.line, "source state out of range");
    if (dst >= num_states) throw ParseError(cur.line, "target state out of range");
    auto [it, fresh] = label_ids.try_emplace(std::move(label),
                                             static_cast<std::uint32_t>(label_ids.size()));
    if (fresh) lts.labels.push_back(it->first);
    lts.transitions.push_back({static_cast<State>(src), it->second, static_cast<State>(dst)});
  }
  if (lts.transitions.size() != num_transitions) {
    throw ParseError(lines.back().first,
                     "header declares " + std::to_string(num_transitions) + " transitions, found " +
                         std::to_string(lts.transitions.size()));
  }
  return lts;
}

// Deterministic but possibly incomplete automaton produced by determinize;
// every state is accepting and missing transitions are marked kMissing.
struct PartialDfa {
  static constexpr State kMissing = 0xFFFFFFFFu;

  std::uint32_t num_states = 0;
  std::uint32_t alphabet_size = 0;
  std::vector<std::vector<State>> delta;
  State initial = 0;
};

// Subset construction from {initial}. Reachable non-empty subsets become
// states, numbered in breadth-first discovery order with labels scanned in
// index order; labels whose successor set is empty yield no transition.
// Throws SubsetBudgetExceeded when more than max_subset_states subsets
// appear, the signal for state-space explosion.
inline PartialDfa determinize(const Lts& lts, std::size_t max_subset_states = std::size_t{1}
                                                                              << 22) {
  const std::uint32_t num_labels = static_cast<std::uint32_t>(lts.labels.size());

  // successor lists per (state, label)
  std::vector<std::vector<std::vector<State>>> succ(lts.num_states,
                                                    std::vector<std::vector<State>>(num_labels));
  for (const auto& t : lts.transitions) succ[t.src][t.label].push_back(t.dst);

  std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, detail::U32VecHash> ids;
  std::vector<std::vector<State>> subsets;
  auto intern = [&](std::vector<State>&& subset) {
    auto [it, fresh] = ids.try_emplace(subset, static_cast<std::uint32_t>(subsets.size()));
    if (fresh) {
      if (subsets.size() >= max_subset_states) throw SubsetBudgetExceeded(max_subset_states);
      subsets.push_back(std::move(subset));
    }
    return it->second;
  };
  intern({lts.initial});

  PartialDfa out;
  out.alphabet_size = num_labels;
  out.delta.assign(num_labels, {});
  out.initial = 0;

  std::vector<std::uint8_t> member(lts.num_states, 0);
  for (std::size_t cur = 0; cur < subsets.size(); ++cur) {
    for (std::uint32_t label = 0; label < num_labels; ++label) {
      std::vector<State> target;
      for (State s : subsets[cur]) {
        for (State t : succ[s][label]) {
          if (!member[t]) {
            member[t] = 1;
            target.push_back(t);
          }
        }
      }
      for (State t : target) member[t] = 0;
      if (target.empty()) {
        out.delta[label].push_back(PartialDfa::kMissing);
        continue;
      }
      std::sort(target.begin(), target.end());
      out.delta[label].push_back(intern(std::move(target)));
    }
  }
  out.num_states = static_cast<std::uint32_t>(subsets.size());
  return out;
}

// Completes a partial automaton. When transitions are missing, one new
// rejecting sink state is appended (numbered last) and every gap plus the
// sink's own letters point to it; an already-complete automaton is returned
// unchanged. The result accepts exactly the label sequences that trace a
// path through the original system.
inline Dfa complete(const PartialDfa& p) {
  bool missing = false;
  for (const auto& row : p.delta) {
    for (State t : row) {
      if (t == PartialDfa::kMissing) {
        missing = true;
        break;
      }
    }
    if (missing) break;
  }
  Dfa d;
  d.alphabet_size = p.alphabet_size;
  d.initial = p.initial;
  if (!missing) {
    d.num_states = p.num_states;
    d.delta = p.delta;
    d.accepting.assign(p.num_states, 1);
    return d;
  }
  const State sink = p.num_states;
  d.num_states = p.num_states + 1;
  d.delta.assign(p.alphabet_size, std::vector<State>(d.num_states, sink));
  for (std::uint32_t a = 0; a < p.alphabet_size; ++a) {
    for (State q = 0; q < p.num_states; ++q) {
      if (p.delta[a][q] != PartialDfa::kMissing) d.delta[a][q] = p.delta[a][q];
    }
  }
  d.accepting.assign(d.num_states, 1);
  d.accepting[sink] = 0;
  return d;
}

// Automaton file format, version 1 (ASCII, LF endings, single spaces):
//   DFA 1 <n> <k> <initial>
//   ACC <count> <sorted accepting ids...>
//   <a>: <n targets>          one line per letter a = 0..k-1
inline std::string write_dfa(const Dfa& d) {
  std::string out = "DFA 1 " + std::to_string(d.num_states) + ' ' +
                    std::to_string(d.alphabet_size) + ' ' + std::to_string(d.initial) + '\n';
  std::size_t acc_count = 0;
  for (State q = 0; q < d.num_states; ++q) acc_count += d.accepting[q] != 0 ? 1 : 0;
  out += "ACC " + std::to_string(acc_count);
  for (State q = 0; q < d.num_states; ++q) {
    if (d.accepting[q] != 0) out += ' ' + std::to_string(q);
  }
  out += '\n';
  for (std::uint32_t a = 0; a < d.alphabet_size; ++a) {
    out += std::to_string(a) + ':';
    for (State q = 0; q < d.num_states; ++q) out += ' ' + std::to_string(d.delta[a][q]);
    out += '\n';
  }
  return out;
}

inline Dfa read_dfa(std::string_view text) {
  const auto lines = detail::nonempty_lines(text);
  std::size_t li = 0;
  auto next_line = [&](const char* section) -> detail::LineCursor {
    if (li >= lines.size())
      throw ParseError(lines.empty() ? 1 : lines.back().first + 1,
                       std::string("missing ") + section);
    detail::LineCursor cur(lines[li].second, lines[li].first);
    ++li;
    return cur;
  };

  detail::LineCursor header = next_line("DFA header");
  header.skip_ws();
  if (header.text.substr(header.pos, 3) != "DFA") throw ParseError(header.line, "expected DFA header");
  header.pos += 3;
  const std::uint64_t version = header.parse_uint("format version");
  if (version != 1)
    throw ParseError(header.line, "unsupported format version " + std::to_string(version));
  const std::uint64_t n = header.parse_uint("state count");
  const std::uint64_t k = header.parse_uint("alphabet size");
  const std::uint64_t initial = header.parse_uint("initial state");
  if (!header.at_end()) throw ParseError(header.line, "trailing characters after header");
  if (n == 0) throw ParseError(header.line, "state count must be positive");
  if (initial >= n) throw ParseError(header.line, "initial state out of range");

  Dfa d;
  d.num_states = static_cast<std::uint32_t>(n);
  d.alphabet_size = static_cast<std::uint32_t>(k);
  d.initial = static_cast<State>(initial);
  d.accepting.assign(d.num_states, 0);

  detail::LineCursor acc = next_line("ACC line");
  acc.skip_ws();
  if (acc.text.substr(acc.pos, 3) != "ACC") throw ParseError(acc.line, "expected ACC line");
  acc.pos += 3;
  const std::uint64_t acc_count = acc.parse_uint("accepting count");
  if (acc_count > n) throw ParseError(acc.line, "accepting count exceeds state count");
  for (std::uint64_t i = 0; i < acc_count; ++i) {
    const std::uint64_t q = acc.parse_uint("accepting state id");
    if (q >= n) throw ParseError(acc.line, "accepting state out of range");
    d.accepting[q] = 1;
  }
  if (!acc.at_end()) throw ParseError(acc.line, "trailing characters after ACC line");

  d.delta.assign(d.alphabet_size, std::vector<State>(d.num_states));
  for (std::uint32_t a = 0; a < d.alphabet_size; ++a) {
    detail::LineCursor row = next_line(("transition row for letter " + std::to_string(a)).c_str());
    const std::uint64_t letter = row.parse_uint("letter index");
    if (letter != a)
      throw ParseError(row.line, "expected transition row for letter " + std::to_string(a));
    row.expect(':', "after letter index");
    for (std::uint32_t q = 0; q < d.num_states; ++q) {
      const std::uint64_t t = row.parse_uint("transition target");
      if (t >= n) throw ParseError(row.line, "transition target out of range");
      d.delta[a][q] = static_cast<State>(t);
    }
    if (!row.at_end()) throw ParseError(row.line, "trailing characters after transition row");
  }
  if (li != lines.size()) throw ParseError(lines[li].first, "unexpected trailing line");
  return d;
}

// Partition file: one "<state> <block>" line per state, states ascending.
inline std::string write_partition(const Partition& p) {
  std::string out;
  for (std::size_t q = 0; q < p.block.size(); ++q) {
    out += std::to_string(q) + ' ' + std::to_string(p.block[q]) + '\n';
  }
  return out;
}

inline Partition read_partition(std::string_view text) {
  const auto lines = detail::nonempty_lines(text);
  Partition p;
  p.block.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    detail::LineCursor cur(lines[i].second, lines[i].first);
    const std::uint64_t state = cur.parse_uint("state id");
    if (state != i) throw ParseError(cur.line, "states must be ascending from 0");
    const std::uint64_t label = cur.parse_uint("block label");
    if (!cur.at_end()) throw ParseError(cur.line, "trailing characters after block label");
    p.block.push_back(static_cast<std::uint32_t>(label));
  }
  const Partition canon = canonicalize(p.block);
  if (canon.block != p.block)
    throw ParseError(lines.empty() ? 1 : lines.back().first, "partition is not in canonical form");
  p.num_blocks = canon.num_blocks;
  return p;
}

}  // namespace dfamin
