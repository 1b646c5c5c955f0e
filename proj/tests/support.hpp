#pragma once

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "aa/distance.hpp"
#include "aa/eventlog.hpp"
#include "aa/petri.hpp"
#include "aa/rational.hpp"

namespace support {

using aa::ActivityId;
using aa::Rational;
using Word = std::vector<ActivityId>;

inline std::string fixture_path(const std::string& name) { return std::string(AA_FIXTURES) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline aa::PetriNet fixture_net(const std::string& name) {
  return aa::parse_net(slurp(fixture_path(name)), aa::NetFormat::Tnet);
}

inline aa::EventLog fixture_log(const std::string& name, const aa::PetriNet& net) {
  return aa::parse_log(slurp(fixture_path(name)), aa::LogFormat::Tlog, net.alphabet());
}

// p0 -a-> p1 -b-> p2
inline aa::PetriNet net_seq() {
  aa::PetriNet net;
  const auto p0 = net.add_place("p0"), p1 = net.add_place("p1"), p2 = net.add_place("p2");
  const auto a = net.add_transition("a", "a"), b = net.add_transition("b", "b");
  net.add_input(a, p0);
  net.add_output(a, p1);
  net.add_input(b, p1);
  net.add_output(b, p2);
  net.set_initial({p0});
  net.set_final({p2});
  return net;
}

// a, b: p0 -> p1
inline aa::PetriNet net_choice() {
  aa::PetriNet net;
  const auto p0 = net.add_place("p0"), p1 = net.add_place("p1");
  for (const char* name : {"a", "b"}) {
    const auto t = net.add_transition(name, name);
    net.add_input(t, p0);
    net.add_output(t, p1);
  }
  net.set_initial({p0});
  net.set_final({p1});
  return net;
}

// a: p0->p1, b: p1->p0, c: p1->p2
inline aa::PetriNet net_loop(bool with_c = true) {
  aa::PetriNet net;
  const auto p0 = net.add_place("p0"), p1 = net.add_place("p1"), p2 = net.add_place("p2");
  const auto a = net.add_transition("a", "a"), b = net.add_transition("b", "b");
  net.add_input(a, p0);
  net.add_output(a, p1);
  net.add_input(b, p1);
  net.add_output(b, p0);
  if (with_c) {
    const auto c = net.add_transition("c", "c");
    net.add_input(c, p1);
    net.add_output(c, p2);
  }
  net.set_initial({p0});
  net.set_final({p2});
  return net;
}

inline aa::EventLog log_of(const aa::PetriNet& net, std::initializer_list<std::initializer_list<std::string_view>> traces) {
  aa::EventLog log(net.alphabet());
  for (const auto& t : traces) log.add(t);
  return log;
}

inline Word word(const aa::Alphabet& alphabet, std::initializer_list<std::string_view> names) {
  Word w;
  for (auto n : names) w.push_back(*alphabet.find(n));
  return w;
}

// Plain recursive LCS with memo.
inline std::size_t lcs_oracle(const Word& u, const Word& v) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == u.size() || j == v.size()) return 0;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t best = u[i] == v[j] ? 1 + go(i + 1, j + 1) : std::max(go(i + 1, j), go(i, j + 1));
    return memo[key] = best;
  };
  return go(0, 0);
}

inline Rational levenshtein_oracle(const Word& u, const Word& v) {
  const auto total = static_cast<std::int64_t>(u.size() + v.size());
  return Rational(total - 2 * static_cast<std::int64_t>(lcs_oracle(u, v)), std::max<std::int64_t>(1, total));
}

inline Rational hamming_oracle(const Word& u, const Word& v) {
  const ActivityId pad = static_cast<ActivityId>(-7);
  const std::size_t n = std::max(u.size(), v.size());
  if (n == 0) return Rational(0);
  std::int64_t diff = 0;
  for (std::size_t k = 0; k < n; ++k) diff += (k < u.size() ? u[k] : pad) != (k < v.size() ? v[k] : pad);
  return Rational(diff, static_cast<std::int64_t>(n));
}

inline Rational distance_oracle(aa::DistanceKind kind, const Word& u, const Word& v) {
  return kind == aa::DistanceKind::Hamming ? hamming_oracle(u, v) : levenshtein_oracle(u, v);
}

inline Rational log_distance_oracle(aa::DistanceKind kind, const Word& u, const aa::EventLog& log) {
  Rational best(1);
  for (const auto& [trace, count] : log.entries()) best = std::min(best, distance_oracle(kind, u, trace));
  return best;
}

struct OracleRun {
  std::vector<aa::TransitionId> firings;
  Word visible;
};

// Depth-first token game over sets of places, independent of the library's explorer.
inline std::vector<OracleRun> runs_oracle(const aa::PetriNet& net, std::size_t length) {
  std::vector<OracleRun> out;
  const auto target_places = net.final_marking().places();
  const std::set<aa::PlaceId> target(target_places.begin(), target_places.end());
  const auto initial_places = net.initial().places();
  std::vector<aa::TransitionId> stack;
  std::function<void(const std::set<aa::PlaceId>&)> go = [&](const std::set<aa::PlaceId>& m) {
    if (stack.size() == length) {
      if (m == target) {
        OracleRun r{stack, {}};
        for (auto t : stack)
          if (!net.is_silent(t)) r.visible.push_back(net.label(t));
        out.push_back(std::move(r));
      }
      return;
    }
    for (aa::TransitionId t = 0; t < net.transition_count(); ++t) {
      const auto pre = net.pre(t);
      if (!std::all_of(pre.begin(), pre.end(), [&](auto p) { return m.count(p) > 0; })) continue;
      std::set<aa::PlaceId> next = m;
      for (auto p : pre) next.erase(p);
      for (auto p : net.post(t)) next.insert(p);
      stack.push_back(t);
      go(next);
      stack.pop_back();
    }
  };
  go(std::set<aa::PlaceId>(initial_places.begin(), initial_places.end()));
  return out;
}

inline std::optional<Rational> max_distance_oracle(const aa::PetriNet& net, const aa::EventLog& log, std::size_t n,
                                                   aa::DistanceKind kind) {
  std::optional<Rational> best;
  for (const auto& r : runs_oracle(net, n)) {
    const auto d = log_distance_oracle(kind, r.visible, log);
    if (!best || d > *best) best = d;
  }
  return best;
}

inline Word random_word(std::mt19937_64& rng, std::size_t max_len, std::size_t letters) {
  Word w(std::uniform_int_distribution<std::size_t>(0, max_len)(rng));
  for (auto& a : w) a = static_cast<ActivityId>(std::uniform_int_distribution<std::size_t>(0, letters - 1)(rng));
  return w;
}

}  // namespace support
