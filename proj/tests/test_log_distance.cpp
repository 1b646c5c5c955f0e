#include "doctest.h"

#include "aa/distance.hpp"
#include "aa/errors.hpp"
#include "aa/eventlog.hpp"
#include "support.hpp"

using namespace aa;
using support::Word;

namespace {

Alphabet letters(std::initializer_list<std::string_view> names) {
  Alphabet a;
  for (auto n : names) a.intern(n);
  return a;
}

}  // namespace

TEST_CASE("tlog parsing") {
  const auto log = parse_log("3x a,b,c\n", LogFormat::Tlog);
  REQUIRE(log.unique_count() == 1);
  CHECK(log.entries().begin()->second == 3);
  CHECK(log.total_count() == 3);

  const auto empty = parse_log("", LogFormat::Tlog);
  CHECK(empty.empty());

  const auto branching = parse_log(support::slurp(support::fixture_path("branching.tlog")), LogFormat::Tlog);
  CHECK(branching.unique_count() == 7);
  for (const auto& [trace, count] : branching.entries()) CHECK(count == 1);

  const auto commented = parse_log("# header\n\na\n2x a\n  b , c  \n", LogFormat::Tlog);
  CHECK(commented.unique_count() == 2);
  CHECK(commented.total_count() == 4);

  CHECK_THROWS_AS(parse_log("a,,b\n", LogFormat::Tlog), ParseError);
  CHECK_THROWS_AS(parse_log("tau\n", LogFormat::Tlog), ParseError);
}

TEST_CASE("xes parsing") {
  Alphabet seed = letters({"a", "b"});
  const auto log = parse_log(support::slurp(support::fixture_path("netchoice.xes")), LogFormat::Xes, seed);
  CHECK(log.alphabet().find("a") == ActivityId{0});
  CHECK(log.total_count() >= 1);
  for (const auto& [trace, count] : log.entries())
    for (auto a : trace) CHECK(log.alphabet().name(a) != "start");
  CHECK_THROWS_AS(parse_log("<log><trace>", LogFormat::Xes), ParseError);
}

TEST_CASE("unique traces") {
  EventLog log;
  log.add({"a"});
  log.add({"a", "b", "c", "d"});
  log.add({"a", "f", "g", "h"});
  log.add({"a", "b", "i", "b", "c", "d"});
  const auto entries = unique_traces(log);
  REQUIRE(entries.size() == 4);
  for (const auto& e : entries) CHECK(e.second == 1);
  CHECK(entries.front().first.size() == 1);
  CHECK(entries.back().first.size() == 6);

  EventLog twice;
  twice.add({"a"}, 2);
  CHECK(unique_traces(twice) == std::vector<std::pair<Trace, std::size_t>>{{Trace{0}, 2}});
  CHECK(unique_traces(EventLog{}).empty());
}

TEST_CASE("log membership") {
  EventLog log;
  log.add({"a"});
  log.add({"a", "b", "c", "d"});
  log.add({"a", "f", "g", "h"});
  log.add({"a", "b", "i", "b", "c", "d"});
  const auto& al = log.alphabet();
  CHECK(contains(log, support::word(al, {"a"})));
  log.alphabet().intern("e");
  CHECK_FALSE(contains(log, support::word(log.alphabet(), {"a", "c", "b", "e"})));
  CHECK_FALSE(contains(EventLog{}, Word{}));
}

TEST_CASE("tlog round trip on random logs") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 200; ++k) {
    EventLog log(letters({"a", "b", "c", "d"}));
    const int traces = std::uniform_int_distribution<int>(0, 6)(rng);
    std::size_t total = 0;
    for (int t = 0; t < traces; ++t) {
      const std::size_t mult = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
      total += mult;
      log.add(support::random_word(rng, 6, 4), mult);
    }
    const auto again = parse_log(serialize_tlog(log), LogFormat::Tlog, log.alphabet());
    CHECK(again.entries() == log.entries());
    std::size_t sum = 0;
    for (const auto& e : unique_traces(log)) sum += e.second;
    CHECK(sum == total);
  }
}

TEST_CASE("distance examples") {
  const Alphabet al = letters({"a", "b", "c", "d", "e", "f", "g", "h", "i", "k"});
  const auto g = support::word(al, {"a", "b", "c", "f", "i", "k"});
  const auto s = support::word(al, {"a", "b", "c", "f", "g", "h", "k"});
  CHECK(hamming(g, s) == Rational(3, 7));
  CHECK(levenshtein(g, s) == Rational(3, 13));
  CHECK(hamming(g, g) == Rational(0));
  CHECK(hamming(support::word(al, {"a"}), support::word(al, {"b", "b", "b"})) == Rational(1));
  CHECK(levenshtein(Word{}, Word{}) == Rational(0));
  CHECK(hamming(Word{}, Word{}) == Rational(0));

  const auto long_run = support::word(al, {"a", "c", "b", "i", "b", "i", "b", "i", "b", "i", "b", "i", "b", "i", "b",
                                           "i", "b", "e"});
  const auto trace = support::word(al, {"a", "b", "i", "b", "c", "d"});
  CHECK(long_run.size() == 18);
  CHECK(support::lcs_oracle(long_run, trace) == 4);
  CHECK(levenshtein(long_run, trace) == Rational(2, 3));
  CHECK(edit_count(long_run, trace) == 16);
}

TEST_CASE("distance to a log") {
  EventLog log = parse_log(support::slurp(support::fixture_path("branching.tlog")), LogFormat::Tlog);
  const auto g = support::word(log.alphabet(), {"a", "b", "c", "f", "i", "k"});
  CHECK(dist_to_log(g, log, DistanceKind::Levenshtein) == Rational(3, 13));
  CHECK(dist_to_log(g, log, DistanceKind::Hamming) == Rational(3, 7));
  CHECK(dist_to_log(g, EventLog{}, DistanceKind::Levenshtein) == Rational(1));
  CHECK(dist_to_log(g, EventLog{}, DistanceKind::Hamming) == Rational(1));
  const auto inside = log.entries().begin()->first;
  CHECK(dist_to_log(inside, log, DistanceKind::Levenshtein) == Rational(0));
  CHECK(dist_to_log(inside, log, DistanceKind::Hamming) == Rational(0));
}

TEST_CASE("silent projection") {
  Alphabet al = letters({"a", "b"});
  const ActivityId tau = al.silent();
  CHECK(project_visible(Word{tau, 0, tau, 1}, al) == Word{0, 1});
  CHECK(project_visible(Word{tau, tau}, al).empty());
  CHECK(project_visible(Word{0, 1}, al) == Word{0, 1});
}

TEST_CASE("Levenshtein never exceeds Hamming") {
  std::mt19937_64 rng(2024);
  int violations = 0;
  for (int k = 0; k < 10000; ++k) {
    const std::size_t alphabet = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    Word u = support::random_word(rng, 12, alphabet), v = support::random_word(rng, 12, alphabet);
    if (u.empty() && v.empty()) u.push_back(0);
    violations += levenshtein(u, v) > hamming(u, v);
  }
  CHECK(violations == 0);
}

TEST_CASE("distances agree with oracles and are symmetric") {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 1000; ++k) {
    const Word u = support::random_word(rng, 9, 3), v = support::random_word(rng, 9, 3);
    CHECK(levenshtein(u, v) == support::levenshtein_oracle(u, v));
    CHECK(hamming(u, v) == support::hamming_oracle(u, v));
    CHECK(levenshtein(u, v) == levenshtein(v, u));
    CHECK(hamming(u, v) == hamming(v, u));
    CHECK(mismatch_count(u, v) * static_cast<std::size_t>(hamming(u, v).denominator()) ==
          static_cast<std::size_t>(hamming(u, v).numerator()) * std::max(u.size(), v.size()));
  }
}

TEST_CASE("distances approach 1 for long foreign runs") {
  const Word sigma{0, 1, 2, 3, 0};
  const Word run(50, 9);
  CHECK(levenshtein(run, sigma) >= Rational(45, 55));
  CHECK(hamming(run, sigma) == Rational(1));
}

TEST_CASE("rational helpers") {
  CHECK(parse_rational("3/13") == Rational(3, 13));
  CHECK(parse_rational("0.05") == Rational(1, 20));
  CHECK(parse_rational("1") == Rational(1));
  CHECK_THROWS(parse_rational("1/0"));
  CHECK_THROWS(parse_rational("abc"));
  CHECK(discount(Rational(1, 20), 2) == Score(441) / 400);
  CHECK(round3(to_score(Rational(3, 13))) == doctest::Approx(0.231));
  CHECK(round3(Score(1) / 2000) == doctest::Approx(0.0));
  CHECK(round3(Score(3) / 2000) == doctest::Approx(0.002));
}
