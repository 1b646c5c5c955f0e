#include "doctest.h"

#include <filesystem>

#include "aa/errors.hpp"
#include "aa/oracle.hpp"
#include "aa/precision.hpp"
#include "support.hpp"

using namespace aa;

TEST_CASE("brute force maximum") {
  const auto choice = support::net_choice();
  const auto log = support::log_of(choice, {{"a"}});
  const auto best = brute_force_max(choice, log, 3, DistanceKind::Levenshtein, Rational(1, 20));
  REQUIRE(best.has_value());
  CHECK(best->run.firings == std::vector<TransitionId>{1});
  CHECK(best->distance == Rational(1));
  CHECK(best->score == Score(20, 21));

  const auto seq = support::net_seq();
  const auto none = brute_force_max(seq, support::log_of(seq, {{"a", "b"}}), 1, DistanceKind::Hamming, Rational(0));
  CHECK_FALSE(none.has_value());

  const auto dev = brute_force_deviating_run(choice, log);
  REQUIRE(dev.has_value());
  CHECK(dev->firings == std::vector<TransitionId>{1});
  CHECK_FALSE(brute_force_deviating_run(seq, support::log_of(seq, {{"a", "b"}})).has_value());
}

TEST_CASE("generator is deterministic and honours its flags") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    RandomModelSpec spec;
    spec.seed = seed;
    spec.free_form = seed % 2 == 0;
    spec.acyclic = seed % 3 == 0;
    spec.fitting = seed % 5 != 0;
    const auto a = generate_instance(spec);
    const auto b = generate_instance(spec);
    CHECK(serialize_tnet(a.net) == serialize_tnet(b.net));
    CHECK(serialize_tlog(a.log) == serialize_tlog(b.log));
    CHECK(a.net.place_count() <= spec.max_places);
    CHECK(a.net.transition_count() <= spec.max_transitions);
    CHECK(check_safe(a.net));
    CHECK(a.log.unique_count() <= spec.max_traces);
    CHECK(a.log.max_length() <= spec.max_trace_length);
    if (spec.acyclic) CHECK_FALSE(has_executable_loop(a.net));
    if (spec.fitting)
      for (const auto& [trace, count] : a.log.entries()) {
        bool fits = false;
        for (std::size_t n = trace.size(); n <= trace.size() + 6 && !fits; ++n)
          for (const auto& r : support::runs_oracle(a.net, n)) fits = fits || r.visible == trace;
        CHECK(fits);
      }
  }
  RandomModelSpec s1, s2;
  s2.seed = 2;
  CHECK(serialize_tnet(generate_instance(s1).net) != serialize_tnet(generate_instance(s2).net));
}

TEST_CASE("language preserving rewrites") {
  const auto loop = support::net_loop();
  const auto words = [](const PetriNet& net, std::size_t max_len) {
    std::set<support::Word> out;
    for (const auto& r : full_runs(net, max_len)) out.insert(r.visible);
    return out;
  };
  CHECK(words(with_duplicate_place(loop, 1), 7) == words(loop, 7));
  CHECK(words(with_duplicate_transition(loop, 0), 7) == words(loop, 7));
  CHECK(with_duplicate_transition(loop, 0).transition_count() == loop.transition_count() + 1);
  const auto silent = with_silent_step(loop, 0);
  CHECK(words(silent, 12).count(support::word(loop.alphabet(), {"a", "b", "a", "c"})) == 1);
  const auto more = with_parallel_transition(loop, 2, *loop.alphabet().find("a"));
  CHECK(words(more, 2).count(support::word(loop.alphabet(), {"a", "a"})) == 1);
}

TEST_CASE("axiom harness rejects a broken metric") {
  std::vector<Instance> family;
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    RandomModelSpec spec;
    spec.seed = seed;
    spec.fitting = true;
    family.push_back(generate_instance(spec));
  }
  // rewards extra behaviour whenever the number of transitions is even
  const PrecisionMetric parity = [](const PetriNet& net, const EventLog&) {
    return net.transition_count() % 2 == 0 ? Score(1) : Score(0);
  };
  AxiomOptions opts;
  const auto dump = std::filesystem::temp_directory_path() / "aa-axiom-test";
  std::filesystem::remove_all(dump);
  opts.dump_dir = dump;
  const auto report = axiom_suite(family, parity, opts);
  CHECK_FALSE(report.passed());
  CHECK(report["A1"].passed);
  CHECK_FALSE(report["A2"].passed);
  CHECK_FALSE(report["A2"].counterexamples.empty());
  CHECK(std::filesystem::exists(dump));
  bool has_verdict = false;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dump))
    has_verdict = has_verdict || entry.path().filename() == "verdict.json";
  CHECK(has_verdict);
  std::filesystem::remove_all(dump);

  const auto empty = axiom_suite(std::span<const Instance>{}, parity);
  CHECK(empty.vacuous);
}

TEST_CASE("the SAT metric satisfies the axioms on a small family") {
  std::vector<Instance> family;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RandomModelSpec spec;
    spec.seed = seed;
    spec.fitting = true;
    spec.free_form = seed % 2 == 0;
    family.push_back(generate_instance(spec));
  }
  PrecisionConfig cfg;
  const auto report = axiom_suite(family, sat_metric(cfg));
  for (const auto& v : report.verdicts) {
    INFO(v.axiom);
    CHECK(v.passed);
    CHECK(v.checked > 0);
  }
  CHECK_FALSE(report.vacuous);

  PrecisionConfig zero;
  zero.epsilon = Rational(0);
  std::vector<Instance> acyclic;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RandomModelSpec spec;
    spec.seed = seed;
    spec.fitting = true;
    spec.acyclic = true;
    acyclic.push_back(generate_instance(spec));
  }
  AxiomOptions opts;
  opts.silent_insertion = true;
  CHECK(axiom_suite(acyclic, sat_metric(zero), opts).passed());
}
