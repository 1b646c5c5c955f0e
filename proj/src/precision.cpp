#include "aa/precision.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <stdexcept>

#include "aa/errors.hpp"

namespace aa {

namespace {

bool is_zero(const Rational& r) { return r.numerator() == 0; }

PrecisionReport base_report(const PrecisionConfig& cfg) {
  PrecisionReport report;
  report.metric = is_zero(cfg.epsilon) ? "P_aa" : "P_aa^eps";
  report.kind = cfg.kind;
  report.epsilon = cfg.epsilon;
  return report;
}

Alphabet combined_alphabet(const PetriNet& net, const EventLog& log) { return merged(net.alphabet(), log.alphabet()); }

void apply_flower(PrecisionReport& report, const PetriNet& net, const EventLog& log, const PrecisionConfig& cfg) {
  try {
    report.flower_flag = flower_check(net, combined_alphabet(net, log), cfg.flower_horizon, cfg.search.limits);
  } catch (const ExplosionGuard&) {
    report.flower_flag = false;
  }
  if (report.flower_flag && cfg.flower_patch) report.value = 0;
}

// Maximization up to depth n; exact when no longer run can do better.
PrecisionReport explore(const PetriNet& net, const EventLog& log, const PrecisionConfig& cfg, std::size_t n,
                        const Score& m) {
  PrecisionReport report = base_report(cfg);
  report.depth_used = n;
  report.witness = max_anti_alignment(net, log, cfg.kind, n, cfg.epsilon, cfg.search);
  const bool deviating = report.witness.found() && report.witness.distance > Rational(0);
  const Score beyond = Score(1) / discount(cfg.epsilon, n + 1);
  if (deviating && report.witness.score >= beyond && !report.witness.is_lower_bound) {
    report.status = PrecisionStatus::Exact;
    report.value = 1 - report.witness.score;
  } else {
    report.status = PrecisionStatus::LowerBound;
    report.value = 1 - m;
  }
  return report;
}

}  // namespace

std::string_view to_string(PrecisionStatus status) {
  return status == PrecisionStatus::Exact ? "exact" : "lower_bound";
}

std::size_t depth_bound(const Score& m, const Rational& epsilon) {
  if (is_zero(epsilon)) throw EpsilonZero("depth bound needs epsilon > 0");
  if (epsilon < Rational(0)) throw std::invalid_argument("epsilon must be positive");
  if (m <= 0 || m > 1) throw std::invalid_argument("threshold must lie in (0, 1]");
  const Score limit = 1 / m;
  const double estimate = -std::log(to_double(m)) / std::log1p(boost::rational_cast<double>(epsilon));
  std::size_t n = estimate > 2 ? static_cast<std::size_t>(estimate) - 2 : 0;
  while (n > 0 && discount(epsilon, n) > limit) --n;
  while (discount(epsilon, n + 1) <= limit) ++n;
  return n;
}

std::optional<std::size_t> longest_full_run(const PetriNet& net, ExplorationLimits limits) {
  const auto graph = ReachabilityGraph::build(net, limits);
  const std::size_t target = graph.find(net.final_marking());
  if (target == ReachabilityGraph::npos) return std::nullopt;
  const auto to_final = graph.distance_to(target);
  if (to_final[0] == ReachabilityGraph::npos) return std::nullopt;
  // Longest path over co-reachable states, memoized depth-first.
  std::vector<std::size_t> longest(graph.size(), ReachabilityGraph::npos);
  std::vector<std::uint8_t> state(graph.size(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  state[0] = 1;
  while (!stack.empty()) {
    auto& [s, next] = stack.back();
    const auto edges = graph.successors(s);
    if (next < edges.size()) {
      const std::size_t t = edges[next++].target;
      if (to_final[t] == ReachabilityGraph::npos) continue;
      if (state[t] == 1) throw HasLoop("net has an executable loop");
      if (state[t] == 0) {
        state[t] = 1;
        stack.emplace_back(t, 0);
      }
      continue;
    }
    std::size_t best = s == target ? 0 : ReachabilityGraph::npos;
    for (const auto& e : edges) {
      if (to_final[e.target] == ReachabilityGraph::npos) continue;
      const std::size_t via = longest[e.target] + 1;
      if (best == ReachabilityGraph::npos || via > best) best = via;
    }
    longest[s] = best;
    state[s] = 2;
    stack.pop_back();
  }
  return longest[0];
}

PrecisionReport precision_exact_loopfree(const PetriNet& net, const EventLog& log, DistanceKind kind,
                                         const SearchOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (has_executable_loop(net, options.limits)) throw HasLoop("net has an executable loop; use epsilon > 0");
  PrecisionConfig cfg;
  cfg.epsilon = Rational(0);
  cfg.kind = kind;
  cfg.search = options;
  PrecisionReport report = base_report(cfg);
  const auto longest = longest_full_run(net, options.limits);
  if (longest) {
    report.depth_used = *longest;
    report.witness = max_anti_alignment(net, log, kind, *longest, Rational(0), options);
    report.value = 1 - report.witness.score;
    if (report.witness.is_lower_bound) report.status = PrecisionStatus::LowerBound;
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

PrecisionReport precision_epsilon(const PetriNet& net, const EventLog& log, const PrecisionConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  PrecisionReport report;
  if (is_zero(cfg.epsilon)) {
    if (has_executable_loop(net, cfg.search.limits))
      throw LoopWithZeroEpsilon("epsilon = 0 needs a net without executable loops");
    report = precision_exact_loopfree(net, log, cfg.kind, cfg.search);
  } else {
    if (!cfg.threshold) throw std::invalid_argument("the threshold algorithm needs a threshold m");
    const Score m = to_score(*cfg.threshold);
    const std::size_t n = cfg.length_budget.value_or(depth_bound(m, cfg.epsilon));
    report = explore(net, log, cfg, n, m);
  }
  apply_flower(report, net, log, cfg);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

PrecisionReport precision_gamma0(const PetriNet& net, const EventLog& log, const PrecisionConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  if (is_zero(cfg.epsilon)) return precision_epsilon(net, log, cfg);

  std::optional<Run> gamma0;
  bool inclusion = false;
  try {
    gamma0 = find_run_outside_log(net, log, cfg.search.limits);
    inclusion = !gamma0;
  } catch (const ExplosionGuard&) {
    std::size_t budget = 2 + log.max_length();
    std::size_t tried = 0;
    while (!gamma0) {
      for (std::size_t len = tried; len <= budget && !gamma0; ++len) {
        AntiAlignmentQuery q;
        q.n = len;
        q.kind = cfg.kind;
        q.threshold = Rational(1, static_cast<std::int64_t>(len + log.max_length() + 1));
        q.options = cfg.search;
        q.epsilon = cfg.epsilon;
        auto found = find_anti_alignment(net, log, q);
        if (found.found()) gamma0 = found.run;
      }
      if (gamma0 || budget >= cfg.bootstrap_cap) break;
      tried = budget + 1;
      budget = std::min(cfg.bootstrap_cap, budget * 2);
    }
    if (!gamma0) {
      PrecisionReport report = base_report(cfg);
      report.status = PrecisionStatus::LowerBound;
      report.depth_used = budget;
      report.value = 1 - Score(1) / discount(cfg.epsilon, budget + 1);
      apply_flower(report, net, log, cfg);
      report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return report;
    }
  }

  PrecisionReport report;
  if (inclusion) {
    report = base_report(cfg);
    report.value = 1;
  } else {
    const Rational d = dist_to_log(gamma0->visible, log, cfg.kind);
    const Score m = to_score(d) / discount(cfg.epsilon, gamma0->firings.size());
    const std::size_t n = cfg.length_budget.value_or(depth_bound(m, cfg.epsilon));
    report = explore(net, log, cfg, n, m);
  }
  apply_flower(report, net, log, cfg);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

PrecisionReport compute_precision(const PetriNet& net, const EventLog& log, const PrecisionConfig& cfg) {
  if (is_zero(cfg.epsilon) || cfg.threshold) return precision_epsilon(net, log, cfg);
  return precision_gamma0(net, log, cfg);
}

bool flower_check(const PetriNet& net, const Alphabet& alphabet, std::size_t horizon, ExplorationLimits limits) {
  const auto graph = ReachabilityGraph::build(net, limits);
  const std::size_t target = graph.find(net.final_marking());
  if (target == ReachabilityGraph::npos) return false;

  using StateSet = std::vector<std::size_t>;
  auto closure = [&](StateSet seed) {
    std::vector<bool> seen(graph.size(), false);
    for (std::size_t s : seed) seen[s] = true;
    for (std::size_t k = 0; k < seed.size(); ++k)
      for (const auto& e : graph.successors(seed[k]))
        if (net.is_silent(e.transition) && !seen[e.target]) {
          seen[e.target] = true;
          seed.push_back(e.target);
        }
    std::sort(seed.begin(), seed.end());
    return seed;
  };

  const auto letters = alphabet.visible();
  std::set<StateSet> level{closure({0})};
  for (std::size_t depth = 0;; ++depth) {
    for (const auto& set : level)
      if (!std::binary_search(set.begin(), set.end(), target)) return false;
    if (depth == horizon) return true;
    std::set<StateSet> next;
    for (const auto& set : level) {
      for (ActivityId a : letters) {
        StateSet step;
        for (std::size_t s : set)
          for (const auto& e : graph.successors(s))
            if (net.label(e.transition) == a) step.push_back(e.target);
        std::sort(step.begin(), step.end());
        step.erase(std::unique(step.begin(), step.end()), step.end());
        next.insert(closure(std::move(step)));
      }
    }
    level = std::move(next);
  }
}

}  // namespace aa
