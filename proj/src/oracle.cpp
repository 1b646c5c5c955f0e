#include "aa/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "aa/errors.hpp"

namespace aa {

namespace {

bool is_zero(const Rational& r) { return r.numerator() == 0; }

struct StopEnumeration {};

PrecisionReport oracle_report(const PrecisionConfig& cfg) {
  PrecisionReport report;
  report.metric = is_zero(cfg.epsilon) ? "P_aa" : "P_aa^eps";
  report.kind = cfg.kind;
  report.epsilon = cfg.epsilon;
  return report;
}

void set_witness(PrecisionReport& report, const std::optional<OracleBest>& best) {
  if (!best) return;
  report.witness.run = best->run;
  report.witness.distance = best->distance;
  report.witness.score = best->score;
}

std::size_t tree_node_count(const EventLog& log) {
  std::set<Trace> prefixes;
  for (const auto& [trace, count] : log.entries())
    for (std::size_t k = 0; k <= trace.size(); ++k) prefixes.emplace(trace.begin(), trace.begin() + k);
  return prefixes.size();
}

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

void intern_letters(Alphabet& alphabet, std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) {
    std::string name;
    std::size_t v = k;
    do {
      name.insert(name.begin(), static_cast<char>('a' + v % 26));
      v /= 26;
    } while (v-- > 0);
    alphabet.intern(name);
  }
}

class TreeBuilder {
 public:
  TreeBuilder(const RandomModelSpec& spec, std::mt19937_64& rng) : spec_(spec), rng_(rng) {
    intern_letters(net_.alphabet(), spec.alphabet_size);
  }

  std::optional<PetriNet> build() {
    const PlaceId in = place();
    const PlaceId out = place();
    node(in, out, 0);
    if (overflow_) return std::nullopt;
    net_.set_initial({in});
    net_.set_final({out});
    return std::move(net_);
  }

 private:
  PlaceId place() {
    if (net_.place_count() >= spec_.max_places) overflow_ = true;
    return net_.add_place("p" + std::to_string(net_.place_count()));
  }

  TransitionId transition(bool silent) {
    if (net_.transition_count() >= spec_.max_transitions) overflow_ = true;
    const std::string name = "t" + std::to_string(net_.transition_count());
    if (silent) return net_.add_transition(name, net_.alphabet().silent());
    return net_.add_transition(name, static_cast<ActivityId>(uniform(rng_, 0, spec_.alphabet_size - 1)));
  }

  void leaf(PlaceId in, PlaceId out) {
    const TransitionId t = transition(spec_.allow_silent && coin(rng_, 0.125));
    net_.add_input(t, in);
    net_.add_output(t, out);
  }

  void node(PlaceId in, PlaceId out, int depth) {
    if (overflow_) return;
    std::vector<double> weights{3, 3, 2, 1, spec_.acyclic ? 0.0 : 1.0};
    if (depth >= 3) weights = {1, 0, 0, 0, 0};
    const std::size_t op = std::discrete_distribution<std::size_t>(weights.begin(), weights.end())(rng_);
    switch (op) {
      case 0:
        leaf(in, out);
        break;
      case 1: {
        const PlaceId mid = place();
        node(in, mid, depth + 1);
        node(mid, out, depth + 1);
        break;
      }
      case 2:
        node(in, out, depth + 1);
        node(in, out, depth + 1);
        break;
      case 3: {
        const PlaceId a = place(), b = place(), c = place(), d = place();
        const TransitionId split = transition(true);
        net_.add_input(split, in);
        net_.add_output(split, a);
        net_.add_output(split, c);
        node(a, b, depth + 1);
        node(c, d, depth + 1);
        const TransitionId join = transition(true);
        net_.add_input(join, b);
        net_.add_input(join, d);
        net_.add_output(join, out);
        break;
      }
      default:
        node(in, out, depth + 1);
        node(out, in, depth + 1);
        break;
    }
  }

  const RandomModelSpec& spec_;
  std::mt19937_64& rng_;
  PetriNet net_;
  bool overflow_ = false;
};

std::optional<PetriNet> free_form_net(const RandomModelSpec& spec, std::mt19937_64& rng, ExplorationLimits limits) {
  PetriNet net;
  intern_letters(net.alphabet(), spec.alphabet_size);
  const std::size_t places = uniform(rng, 2, std::max<std::size_t>(2, spec.max_places));
  const std::size_t transitions = uniform(rng, 2, std::max<std::size_t>(2, spec.max_transitions));
  for (std::size_t p = 0; p < places; ++p) net.add_place("p" + std::to_string(p));
  for (std::size_t k = 0; k < transitions; ++k) {
    const bool silent = spec.allow_silent && coin(rng, 0.125);
    const std::string name = "t" + std::to_string(k);
    const TransitionId t = silent ? net.add_transition(name, net.alphabet().silent())
                                  : net.add_transition(name, static_cast<ActivityId>(uniform(rng, 0, spec.alphabet_size - 1)));
    for (std::size_t a = uniform(rng, 1, 2); a > 0; --a) net.add_input(t, static_cast<PlaceId>(uniform(rng, 0, places - 1)));
    for (std::size_t a = uniform(rng, 1, 2); a > 0; --a) net.add_output(t, static_cast<PlaceId>(uniform(rng, 0, places - 1)));
  }
  net.set_initial({0});
  if (!check_safe(net, limits)) return std::nullopt;
  const auto graph = ReachabilityGraph::build(net, limits);
  if (graph.size() < std::min<std::size_t>(3, spec.max_places)) return std::nullopt;
  std::vector<std::size_t> dead;
  for (std::size_t s = 1; s < graph.size(); ++s)
    if (graph.successors(s).empty()) dead.push_back(s);
  const std::size_t chosen = dead.empty() ? uniform(rng, 1, graph.size() - 1) : dead[uniform(rng, 0, dead.size() - 1)];
  const auto final_places = graph.marking(chosen).places();
  net.set_final(final_places);
  if (spec.acyclic && has_executable_loop(net, limits)) return std::nullopt;
  return net;
}

std::optional<EventLog> random_log(const PetriNet& net, const RandomModelSpec& spec, std::mt19937_64& rng,
                                   ExplorationLimits limits) {
  std::vector<Trace> words;
  std::set<Trace> seen;
  enumerate_full_runs(
      net, spec.max_trace_length + 4,
      [&](const Run& run) {
        if (run.visible.size() <= spec.max_trace_length && seen.insert(run.visible).second) words.push_back(run.visible);
      },
      limits);
  if (words.empty() && spec.fitting) return std::nullopt;
  EventLog log(net.alphabet());
  const std::size_t traces = uniform(rng, 1, std::max<std::size_t>(1, spec.max_traces));
  for (std::size_t k = 0; k < traces; ++k) {
    if (!words.empty() && (spec.fitting || coin(rng, 0.5))) {
      log.add(words[uniform(rng, 0, words.size() - 1)]);
    } else {
      Trace trace(uniform(rng, 0, spec.max_trace_length));
      for (auto& a : trace) a = static_cast<ActivityId>(uniform(rng, 0, spec.alphabet_size - 1));
      log.add(std::move(trace));
    }
  }
  return log;
}

PetriNet rebuild(const PetriNet& net, const std::function<void(PetriNet&, TransitionId)>& transition_hook) {
  PetriNet out(net.alphabet());
  for (PlaceId p = 0; p < net.place_count(); ++p) out.add_place(net.place_name(p));
  for (TransitionId t = 0; t < net.transition_count(); ++t) transition_hook(out, t);
  const auto initial = net.initial().places();
  const auto final_places = net.final_marking().places();
  out.set_initial(initial);
  out.set_final(final_places);
  return out;
}

void copy_transition(const PetriNet& from, PetriNet& to, TransitionId t, const std::string& name) {
  const TransitionId u = to.add_transition(name, from.label(t));
  for (PlaceId p : from.pre(t)) to.add_input(u, p);
  for (PlaceId p : from.post(t)) to.add_output(u, p);
}

std::string fresh_name(const PetriNet& net, std::string base, bool place) {
  std::string name = base;
  for (std::size_t k = 1; place ? net.find_place(name).has_value() : net.find_transition(name).has_value(); ++k)
    name = base + "_" + std::to_string(k);
  return name;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

class Dumper {
 public:
  explicit Dumper(const std::optional<std::filesystem::path>& dir) : dir_(dir) {}

  std::string dump(const std::string& axiom, std::size_t index, const PetriNet& n1, const EventLog& l1,
                   const PetriNet& n2, const EventLog& l2, const Score& v1, const Score& v2) {
    const std::string id = axiom + "-" + std::to_string(index);
    std::string message = id + ": " + to_string(v1) + " vs " + to_string(v2);
    if (!dir_) return message;
    const auto dir = *dir_ / id;
    std::filesystem::create_directories(dir);
    write_file(dir / "first.tnet", serialize_tnet(n1));
    write_file(dir / "first.tlog", serialize_tlog(l1));
    write_file(dir / "second.tnet", serialize_tnet(n2));
    write_file(dir / "second.tlog", serialize_tlog(l2));
    nlohmann::ordered_json verdict;
    verdict["axiom"] = axiom;
    verdict["instance"] = index;
    verdict["first_value"] = to_string(v1);
    verdict["second_value"] = to_string(v2);
    verdict["passed"] = false;
    write_file(dir / "verdict.json", verdict.dump(2) + "\n");
    return message + " (" + dir.string() + ")";
  }

 private:
  std::optional<std::filesystem::path> dir_;
};

}  // namespace

std::optional<OracleBest> brute_force_max(const PetriNet& net, const EventLog& log, std::size_t max_len,
                                          DistanceKind kind, const Rational& epsilon, ExplorationLimits limits) {
  std::optional<OracleBest> best;
  std::vector<Score> discounts;
  enumerate_full_runs(
      net, max_len,
      [&](const Run& run) {
        const std::size_t len = run.firings.size();
        while (discounts.size() <= len) discounts.push_back(discount(epsilon, discounts.size()));
        const Rational d = dist_to_log(run.visible, log, kind);
        const Score score = to_score(d) / discounts[len];
        if (!best || score > best->score) best = OracleBest{run, d, score};
      },
      limits);
  return best;
}

std::optional<Run> brute_force_deviating_run(const PetriNet& net, const EventLog& log, ExplorationLimits limits) {
  const auto graph = ReachabilityGraph::build(net, limits);
  const std::size_t bound = graph.size() * (tree_node_count(log) + 1);
  std::optional<Run> found;
  try {
    enumerate_full_runs(
        net, bound,
        [&](const Run& run) {
          if (!contains(log, run.visible)) {
            found = run;
            throw StopEnumeration{};
          }
        },
        limits);
  } catch (const StopEnumeration&) {
  }
  return found;
}

PrecisionReport oracle_precision(const PetriNet& net, const EventLog& log, const PrecisionConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const auto limits = cfg.search.limits;
  (void)merged(net.alphabet(), log.alphabet());
  PrecisionReport report = oracle_report(cfg);

  auto finish = [&](PrecisionReport& r) -> PrecisionReport& {
    try {
      r.flower_flag = flower_check(net, merged(net.alphabet(), log.alphabet()), cfg.flower_horizon, limits);
    } catch (const ExplosionGuard&) {
      r.flower_flag = false;
    }
    if (r.flower_flag && cfg.flower_patch) r.value = 0;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  };

  auto bounded = [&](std::size_t n, const Score& m) {
    report.depth_used = n;
    const auto best = brute_force_max(net, log, n, cfg.kind, cfg.epsilon, limits);
    set_witness(report, best);
    const Score beyond = Score(1) / discount(cfg.epsilon, n + 1);
    if (best && best->distance > Rational(0) && best->score >= beyond) {
      report.value = 1 - best->score;
    } else {
      report.status = PrecisionStatus::LowerBound;
      report.value = 1 - m;
    }
  };

  if (is_zero(cfg.epsilon)) {
    if (has_executable_loop(net, limits)) throw LoopWithZeroEpsilon("epsilon = 0 needs a net without executable loops");
    const auto graph = ReachabilityGraph::build(net, limits);
    const auto best = brute_force_max(net, log, graph.size(), cfg.kind, cfg.epsilon, limits);
    if (best) {
      report.depth_used = best->run.firings.size();
      report.value = 1 - best->score;
      set_witness(report, best);
    }
    return finish(report);
  }
  if (cfg.threshold) {
    const Score m = to_score(*cfg.threshold);
    bounded(cfg.length_budget.value_or(depth_bound(m, cfg.epsilon)), m);
    return finish(report);
  }
  const auto gamma0 = brute_force_deviating_run(net, log, limits);
  if (!gamma0) {
    report.value = 1;
    return finish(report);
  }
  const Score m = to_score(dist_to_log(gamma0->visible, log, cfg.kind)) / discount(cfg.epsilon, gamma0->firings.size());
  bounded(cfg.length_budget.value_or(depth_bound(m, cfg.epsilon)), m);
  return finish(report);
}

Instance generate_instance(const RandomModelSpec& spec) {
  if (spec.alphabet_size == 0) throw EmptyAlphabet("random model needs at least one activity");
  if (spec.max_places < 2 || spec.max_transitions < 1) throw std::invalid_argument("random model bounds too small");
  std::mt19937_64 rng(spec.seed);
  const ExplorationLimits limits{100'000};
  for (std::size_t attempt = 0; attempt < spec.max_attempts; ++attempt) {
    try {
      std::optional<PetriNet> net =
          spec.free_form ? free_form_net(spec, rng, limits) : TreeBuilder(spec, rng).build();
      if (!net || net->transition_count() < std::min<std::size_t>(3, spec.max_transitions)) continue;
      if (!check_safe(*net, limits)) continue;
      auto log = random_log(*net, spec, rng, limits);
      if (!log) continue;
      return Instance{std::move(*net), std::move(*log)};
    } catch (const ExplosionGuard&) {
    }
  }
  throw GenerationRetryExceeded("no instance after " + std::to_string(spec.max_attempts) + " attempts");
}

PrecisionMetric sat_metric(PrecisionConfig cfg) {
  return [cfg](const PetriNet& net, const EventLog& log) { return compute_precision(net, log, cfg).value; };
}

PetriNet with_parallel_transition(const PetriNet& net, TransitionId t, ActivityId label) {
  PetriNet out = net;
  const TransitionId u = out.add_transition(fresh_name(net, net.transition_name(t) + "_par", false), label);
  for (PlaceId p : net.pre(t)) out.add_input(u, p);
  for (PlaceId p : net.post(t)) out.add_output(u, p);
  return out;
}

PetriNet with_duplicate_transition(const PetriNet& net, TransitionId t) {
  PetriNet out = net;
  copy_transition(net, out, t, fresh_name(net, net.transition_name(t) + "_dup", false));
  return out;
}

PetriNet with_duplicate_place(const PetriNet& net, PlaceId p) {
  PetriNet out = net;
  const PlaceId q = out.add_place(fresh_name(net, net.place_name(p) + "_dup", true));
  for (TransitionId t = 0; t < net.transition_count(); ++t) {
    const auto pre = net.pre(t);
    const auto post = net.post(t);
    if (std::find(pre.begin(), pre.end(), p) != pre.end()) out.add_input(t, q);
    if (std::find(post.begin(), post.end(), p) != post.end()) out.add_output(t, q);
  }
  auto with_copy = [&](const Marking& m) {
    auto places = m.places();
    if (m.contains(p)) places.push_back(q);
    return places;
  };
  const auto initial = with_copy(net.initial());
  const auto final_places = with_copy(net.final_marking());
  out.set_initial(initial);
  out.set_final(final_places);
  return out;
}

PetriNet with_silent_step(const PetriNet& net, TransitionId t) {
  const std::string place_name = fresh_name(net, "q_" + net.transition_name(t), true);
  const std::string step_name = fresh_name(net, "tau_" + net.transition_name(t), false);
  PetriNet out = rebuild(net, [&](PetriNet& to, TransitionId u) {
    if (u != t) {
      copy_transition(net, to, u, net.transition_name(u));
      return;
    }
    const TransitionId v = to.add_transition(net.transition_name(u), net.label(u));
    for (PlaceId p : net.pre(u)) to.add_input(v, p);
  });
  const PlaceId q = out.add_place(place_name);
  out.add_output(t, q);
  const TransitionId step = out.add_transition(step_name, out.alphabet().silent());
  out.add_input(step, q);
  for (PlaceId p : net.post(t)) out.add_output(step, p);
  return out;
}

bool AxiomReport::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const AxiomVerdict& v) { return v.passed; });
}

const AxiomVerdict& AxiomReport::operator[](std::string_view axiom) const {
  for (const auto& v : verdicts)
    if (v.axiom == axiom) return v;
  throw std::out_of_range("unknown axiom " + std::string(axiom));
}

AxiomReport axiom_suite(std::span<const Instance> family, const PrecisionMetric& metric, const AxiomOptions& options) {
  AxiomReport report;
  for (const char* name : {"A1", "A2", "A4", "A5"}) report.verdicts.push_back(AxiomVerdict{name, true, 0, {}});
  AxiomVerdict& a1 = report.verdicts[0];
  AxiomVerdict& a2 = report.verdicts[1];
  AxiomVerdict& a4 = report.verdicts[2];
  AxiomVerdict& a5 = report.verdicts[3];
  report.vacuous = family.empty();
  std::mt19937_64 rng(options.seed);
  Dumper dumper(options.dump_dir);

  auto fail = [&](AxiomVerdict& v, std::string message) {
    v.passed = false;
    v.counterexamples.push_back(std::move(message));
  };

  for (std::size_t i = 0; i < family.size(); ++i) {
    const PetriNet& net = family[i].net;
    const EventLog& log = family[i].log;
    const Score value = metric(net, log);

    ++a1.checked;
    const Score again = metric(net, log);
    if (again != value) fail(a1, dumper.dump("A1", i, net, log, net, log, value, again));

    if (net.transition_count() > 0) {
      const auto t = static_cast<TransitionId>(uniform(rng, 0, net.transition_count() - 1));
      PetriNet wider = net;
      const std::size_t letters = wider.alphabet().visible().size();
      const ActivityId label = coin(rng, 0.25) || letters == 0
                                   ? wider.alphabet().intern("extra")
                                   : wider.alphabet().visible()[uniform(rng, 0, letters - 1)];
      wider = with_parallel_transition(wider, t, label);
      ++a2.checked;
      const Score wide_value = metric(wider, log);
      if (value < wide_value) fail(a2, dumper.dump("A2", i, net, log, wider, log, value, wide_value));
    }

    {
      PetriNet rewritten;
      const std::size_t choice = uniform(rng, 0, options.silent_insertion ? 2 : 1);
      bool done = false;
      if (choice == 2 && net.transition_count() > 0) {
        rewritten = with_silent_step(net, static_cast<TransitionId>(uniform(rng, 0, net.transition_count() - 1)));
        done = check_safe(rewritten, options.limits);
      }
      if (!done && choice == 1 && net.place_count() > 0) {
        rewritten = with_duplicate_place(net, static_cast<PlaceId>(uniform(rng, 0, net.place_count() - 1)));
        done = true;
      }
      if (!done && net.transition_count() > 0) {
        rewritten = with_duplicate_transition(net, static_cast<TransitionId>(uniform(rng, 0, net.transition_count() - 1)));
        done = true;
      }
      if (done) {
        ++a4.checked;
        const Score same = metric(rewritten, log);
        if (same != value) fail(a4, dumper.dump("A4", i, net, log, rewritten, log, value, same));
      }
    }

    {
      const auto support = unique_traces(log);
      EventLog smaller(log.alphabet());
      for (const auto& [trace, count] : support)
        if (coin(rng, 0.5)) smaller.add(trace, count);
      if (smaller.empty() && !support.empty()) smaller.add(support[uniform(rng, 0, support.size() - 1)].first);
      if (!smaller.empty()) {
        ++a5.checked;
        const Score small_value = metric(net, smaller);
        if (small_value > value) fail(a5, dumper.dump("A5", i, net, smaller, net, log, small_value, value));
      }
    }
  }
  return report;
}

}  // namespace aa
