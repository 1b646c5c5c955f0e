// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <set>
#include <string>

#include "aa/antialign.hpp"
#include "aa/encoding.hpp"
#include "aa/errors.hpp"
#include "aa/oracle.hpp"
#include "aa/precision.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace aa;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
};

Verdict fail(std::string why) { return {false, std::move(why)}; }

Verdict c1_distances() {
  Alphabet al;
  for (const char* n : {"a", "b", "c", "f", "g", "h", "i", "k"}) al.intern(n);
  const auto g = support::word(al, {"a", "b", "c", "f", "i", "k"});
  const auto s = support::word(al, {"a", "b", "c", "f", "g", "h", "k"});
  if (levenshtein(g, s) != Rational(3, 13)) return fail("levenshtein " + to_string(levenshtein(g, s)));
  if (hamming(g, s) != Rational(3, 7)) return fail("hamming " + to_string(hamming(g, s)));
  return {true, "3/13 and 3/7"};
}

Verdict c2_lev_below_ham() {
  std::mt19937_64 rng(2024);
  std::size_t violations = 0;
  for (int k = 0; k < 10000; ++k) {
    const std::size_t letters = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    const auto u = support::random_word(rng, 12, letters), v = support::random_word(rng, 12, letters);
    violations += levenshtein(u, v) > hamming(u, v);
  }
  if (violations) return fail(std::to_string(violations) + " violations");
  return {true, "10000 pairs, 0 violations"};
}

Verdict c3_oracle_equivalence() {
  std::size_t nets = 0, queries = 0, enumerated = 0;
  for (std::uint64_t seed = 1; nets < 60; ++seed) {
    RandomModelSpec spec;
    spec.seed = seed;
    spec.free_form = seed % 3 == 0;
    const auto inst = generate_instance(spec);
    ++nets;
    for (auto kind : {DistanceKind::Hamming, DistanceKind::Levenshtein})
      for (std::size_t n = 2; n <= 8; ++n) {
        ++queries;
        const auto expected = support::max_distance_oracle(inst.net, inst.log, n, kind);
        const auto got = max_anti_alignment_at_length(inst.net, inst.log, n, kind);
        if (got.found() != expected.has_value() || (expected && got.distance != *expected))
          return fail("seed " + std::to_string(seed) + " n=" + std::to_string(n) + " " + std::string(to_string(kind)));
      }
    if (ReachabilityGraph::build(inst.net).size() > 10) continue;
    ++enumerated;
    for (std::size_t n = 0; n <= 8; ++n) {
      std::set<std::vector<TransitionId>> expected;
      for (const auto& r : full_runs(inst.net, n))
        if (r.firings.size() == n) expected.insert(r.firings);
      auto enc = encode_run(inst.net, n, true);
      sat::CdclSolver solver;
      solver.add_cnf(sat::tseytin(enc.formula, enc.vars.var_count()));
      std::set<std::vector<TransitionId>> models;
      while (solver.solve()) {
        const auto run = decode_run(solver.model(), enc);
        if (!models.insert(run.firings).second) return fail("duplicate model");
        sat::Clause block;
        for (std::size_t i = 1; i <= n; ++i) block.push_back(-enc.vars.tau(i, run.firings[i - 1]));
        if (block.empty() || !solver.add_clause(block)) break;
      }
      if (models != expected) return fail("run enumeration differs, seed " + std::to_string(seed));
    }
  }
  return {true, std::to_string(nets) + " nets, " + std::to_string(queries) + " queries, " +
                    std::to_string(enumerated) + " nets enumerated"};
}

Verdict c4_spot_checks() {
  auto value = [](const Rational& d, const Rational& eps, std::size_t len) {
    return to_double(Score(1) - to_score(d) / discount(eps, len));
  };
  Alphabet al;
  for (const char* n : {"a", "b", "c", "d", "e", "i"}) al.intern(n);
  const auto run = support::word(al, {"a", "c", "b", "i", "b", "i", "b", "i", "b", "i", "b", "i", "b", "i", "b", "i",
                                      "b", "e"});
  const auto trace = support::word(al, {"a", "b", "i", "b", "c", "d"});
  const auto lcs = support::lcs_oracle(run, trace);
  const Rational d(static_cast<std::int64_t>(run.size() + trace.size() - 2 * lcs),
                   static_cast<std::int64_t>(run.size() + trace.size()));
  if (d != Rational(2, 3) || levenshtein(run, trace) != d) return fail("18-step distance " + to_string(d));
  const double v1 = value(Rational(1, 2), Rational(1, 20), 4);
  const double v2 = value(Rational(10, 18), Rational(1, 20), 12);
  const double v3 = value(d, Rational(1, 50), 18);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.4f %.4f %.4f", v1, v2, v3);
  if (std::abs(v1 - 0.589) > 0.001 || std::abs(v2 - 0.691) > 0.001 || std::abs(v3 - 0.533) > 0.001) return fail(buf);
  return {true, buf};
}

Verdict c5_depth_bound() {
  const Rational eps(1, 20);
  const auto n = depth_bound(Rational(1, 2), eps);
  if (n != 14 || !(discount(eps, 14) <= 2 && discount(eps, 15) > 2)) return fail("got " + std::to_string(n));
  const auto b = depth_bound(Score(1) / discount(eps, 7), eps);
  if (b != 7) return fail("boundary got " + std::to_string(b));
  return {true, "14 and 7"};
}

Verdict c6_axioms() {
  std::vector<Instance> family;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    RandomModelSpec spec;
    spec.seed = seed;
    spec.fitting = true;
    spec.free_form = seed % 2 == 0;
    family.push_back(generate_instance(spec));
  }
  PrecisionConfig cfg;
  const auto report = axiom_suite(family, sat_metric(cfg));
  std::string detail;
  for (const auto& v : report.verdicts) {
    detail += v.axiom + "=" + (v.passed ? "ok" : "FAIL") + "/" + std::to_string(v.checked) + " ";
    if (!v.passed || v.checked < 100) return fail(detail + (v.counterexamples.empty() ? "" : v.counterexamples[0]));
  }
  const PrecisionMetric parity = [](const PetriNet& net, const EventLog&) {
    return net.transition_count() % 2 == 0 ? Score(1) : Score(0);
  };
  const auto broken = axiom_suite(family, parity);
  if (broken["A2"].passed) return fail(detail + "self-test did not fail A2");
  return {true, detail + "self-test fails A2"};
}

EventLog whole_language(const PetriNet& net) {
  EventLog log(net.alphabet());
  for (std::size_t n = 0; n <= *longest_full_run(net); ++n)
    for (const auto& r : full_runs(net, n))
      if (r.firings.size() == n && !contains(log, r.visible)) log.add(r.visible);
  return log;
}

Verdict c7_perfect_precision() {
  std::size_t included = 0, compared = 0;
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    RandomModelSpec spec;
    spec.seed = seed;
    spec.free_form = seed % 2 == 0;
    spec.acyclic = seed % 4 == 0;
    spec.fitting = true;
    auto inst = generate_instance(spec);
    if (spec.acyclic && seed % 8 == 0) inst.log = whole_language(inst.net);

    const bool reachable = find_run_outside_log(inst.net, inst.log).has_value();
    std::optional<Run> deviating;
    try {
      deviating = brute_force_deviating_run(inst.net, inst.log, ExplorationLimits{2'000'000});
      ++compared;
      if (reachable != deviating.has_value()) return fail("reachability differs, seed " + std::to_string(seed));
    } catch (const ExplosionGuard&) {
    }
    if (reachable) continue;
    ++included;
    PrecisionConfig cfg;
    const auto r = compute_precision(inst.net, inst.log, cfg);
    if (r.value != 1 || r.status != PrecisionStatus::Exact) return fail("precision below 1, seed " + std::to_string(seed));
  }
  if (included < 10 || compared < 50)
    return fail("too few instances: " + std::to_string(included) + " included, " + std::to_string(compared));
  return {true, std::to_string(compared) + " compared, " + std::to_string(included) + " with precision 1"};
}

Verdict c8_lower_bound() {
  std::size_t confirmed = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    RandomModelSpec spec;
    spec.seed = seed;
    spec.acyclic = true;
    spec.free_form = seed % 2 == 0;
    const auto inst = generate_instance(spec);
    const auto log = whole_language(inst.net);
    for (const Rational m : {Rational(1, 2), Rational(1, 5), Rational(1)}) {
      PrecisionConfig cfg;
      cfg.threshold = m;
      const auto n = depth_bound(m, cfg.epsilon);
      const auto brute = brute_force_max(inst.net, log, n, cfg.kind, cfg.epsilon);
      if (brute && brute->distance.numerator() != 0) continue;
      ++confirmed;
      const auto r = compute_precision(inst.net, log, cfg);
      if (r.status != PrecisionStatus::LowerBound || r.value != Score(1) - to_score(m))
        return fail("seed " + std::to_string(seed) + " reported " + to_string(r.value));
    }
  }
  const auto seq = support::net_seq();
  PrecisionConfig cfg;
  cfg.threshold = Rational(1, 2);
  const auto r = compute_precision(seq, support::log_of(seq, {{"a", "b"}}), cfg);
  if (r.status != PrecisionStatus::LowerBound || r.value != Score(1, 2)) return fail("sequence net");
  if (confirmed < 60) return fail("only " + std::to_string(confirmed) + " instances");
  return {true, std::to_string(confirmed + 1) + " instances"};
}

Verdict c9_edit_table() {
  Alphabet al;
  for (const char* n : {"s", "g", "c", "b", "a"}) al.intern(n);
  const auto u = support::word(al, {"s", "g", "c"});
  const auto v = support::word(al, {"s", "b", "c", "a"});
  const auto table = encode_edit_table(u, v);
  sat::CdclSolver solver;
  solver.add_cnf(sat::tseytin(table.formula, table.var_count()));
  if (!solver.solve()) return fail("unsatisfiable");
  if (!solver.model_value(table.var(1, 1, 0)) || !solver.model_value(table.var(2, 2, 2)) ||
      solver.model_value(table.var(2, 2, 3)))
    return fail("wrong model");
  sat::Clause block;
  for (std::size_t x = 1; x <= table.var_count(); ++x)
    block.push_back(solver.model_value(static_cast<int>(x)) ? -static_cast<int>(x) : static_cast<int>(x));
  solver.add_clause(block);
  if (solver.solve()) return fail("second model");
  return {true, "unique model"};
}

std::pair<int, std::string> run_cli(const std::string& args) {
  const std::string cmd = std::string(AA_CLI_PATH) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  char buffer[4096];
  std::size_t got;
  while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0) out.append(buffer, got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Verdict c10_determinism() {
  struct Pair {
    std::string model, log;
  };
  const std::vector<Pair> corpus{{"branching.tnet", "branching.tlog"},       {"netseq.tnet", "netseq.tlog"},
                                 {"netchoice.tnet", "netchoice.tlog"}, {"netchoice.pnml", "netchoice.xes"},
                                 {"netloop.tnet", "netloop.tlog"},   {"flower.tnet", "flower.tlog"},
                                 {"silent.tnet", "silent.tlog"}};
  const std::vector<std::string> commands{"check", "antialign --length-budget 6 --epsilon 1/10 --dist both",
                                          "antialign --n 4 --dist both", "precision", "precision --m 1/2",
                                          "precision --epsilon 0", "oracle", "oracle --epsilon 0"};
  std::size_t invocations = 0;
  for (const auto& p : corpus)
    for (const auto& c : commands) {
      const auto args = c + " --model " + support::fixture_path(p.model) + " --log " + support::fixture_path(p.log);
      const auto first = run_cli(args);
      if (first.first == 0 && !nlohmann::json::accept(first.second)) return fail("not JSON: " + args);
      for (int k = 0; k < 2; ++k)
        if (run_cli(args) != first) return fail("differs: " + args);
      invocations += 3;
    }
  return {true, std::to_string(invocations) + " invocations identical"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    Verdict (*check)();
  };
  const Criterion criteria[] = {
      {1, "distance examples", 1, c1_distances},
      {2, "levenshtein <= hamming", 5, c2_lev_below_ham},
      {3, "SAT search equals brute force", 300, c3_oracle_equivalence},
      {4, "precision formula spot checks", 1, c4_spot_checks},
      {5, "depth bound", 1, c5_depth_bound},
      {6, "axiom suite", 600, c6_axioms},
      {7, "perfect precision branch", 60, c7_perfect_precision},
      {8, "threshold lower bound branch", 60, c8_lower_bound},
      {9, "edit table example", 1, c9_edit_table},
      {10, "CLI determinism", 60, c10_determinism},
  };
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = fail(std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = v.ok && seconds < c.limit_seconds;
    all = all && ok;
    std::printf("%s %2d %-32s %8.3fs (limit %gs)  %s\n", ok ? "PASS" : "FAIL", c.id, c.name, seconds, c.limit_seconds,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
