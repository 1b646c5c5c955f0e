#include "aa/antialign.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <memory>
#include <stdexcept>

#include "aa/errors.hpp"

namespace aa {

namespace {

std::size_t denominator(DistanceKind kind, std::size_t visible, std::size_t trace) {
  const std::size_t d = kind == DistanceKind::Hamming ? std::max(visible, trace) : visible + trace;
  return std::max<std::size_t>(1, d);
}

std::size_t ceil_times(const Rational& r, std::size_t d) {
  const auto num = r.numerator() * static_cast<std::int64_t>(d);
  return static_cast<std::size_t>((num + r.denominator() - 1) / r.denominator());
}

void prepare(const PetriNet& net, const EventLog& log, const SearchOptions& options) {
  merged(net.alphabet(), log.alphabet());
  if (!check_safe(net, options.limits)) throw UnsafeNet("net is not safe; the encoding needs 1-bounded places");
}

struct Candidate {
  Run run;
  Rational distance;
};

/// One SAT instance for runs of a fixed length, queried at several thresholds.
class LengthSearch {
 public:
  LengthSearch(const PetriNet& net, const EventLog& log, std::size_t n, DistanceKind kind, const SearchOptions& options,
               SearchStats& stats)
      : n_(n),
        kind_(kind),
        options_(options),
        stats_(stats),
        traces_(search_traces(log, n, options.prefix_mode)),
        run_(encode_run(net, n, !options.prefix_mode)),
        tseytin_(cnf_) {
    for (const auto& t : traces_) {
      std::size_t cap = n + t.size();
      if (kind == DistanceKind::Levenshtein && options.max_d) cap = std::min(cap, *options.max_d);
      caps_.push_back(cap);
    }
    dist_ = encode_distance(run_, kind, traces_, caps_);
    cnf_.var_count = run_.vars.var_count();
    tseytin_.assert_formula(run_.formula);
    tseytin_.assert_formula(dist_.structure);
    if (!default_backend_ && !options.backend) default_backend_ = sat::make_cdcl_backend();
    const sat::SolverBackend& backend = options.backend ? *options.backend : *default_backend_;
    session_ = backend.open(cnf_);
    pushed_ = cnf_.clauses.size();
    stats_.variables = cnf_.var_count;
    stats_.clauses = cnf_.clauses.size();
  }

  const std::vector<Trace>& traces() const { return traces_; }

  /// Some requirement at r exceeds max_d.
  bool clamped(const Rational& r) const {
    for (std::size_t s = 0; s < traces_.size(); ++s)
      for (std::size_t v = 0; v <= n_; ++v)
        if (ceil_times(r, denominator(kind_, v, traces_[s].size())) > caps_[s]) return true;
    return false;
  }

  Rational distance(const Run& run) const { return distance_to(run.visible, traces_, kind_); }

  /// A run at distance >= r (up to clamping), rechecked independently.
  std::optional<Candidate> check(const Rational& r) {
    const sat::Lit sel = selector(r);
    const bool loose = clamped(r);
    for (;;) {
      auto model = solve(sel ? std::vector<sat::Lit>{sel} : std::vector<sat::Lit>{});
      if (!model) return std::nullopt;
      Run run = decode_run(*model, run_);
      Rational d = distance(run);
      if (loose || d >= r) return Candidate{std::move(run), d};
      ++stats_.refinements;
      block(run, sel);
    }
  }

  /// Lexicographically least run satisfying the requirement at r, given that
  /// one exists.
  Run least_run(const Rational& r) {
    const sat::Lit sel = selector(r);
    std::vector<sat::Lit> assumptions;
    if (sel) assumptions.push_back(sel);
    auto model = solve(assumptions);
    if (!model) throw SolverFailure("requirement became unsatisfiable during witness selection");
    for (std::size_t i = 1; i <= n_; ++i) {
      const Run current = decode_run(*model, run_);
      const TransitionId reached = current.firings[i - 1];
      TransitionId chosen = reached;
      for (TransitionId t = 0; t < reached; ++t) {
        assumptions.push_back(run_.vars.tau(i, t));
        auto attempt = solve(assumptions);
        assumptions.pop_back();
        if (attempt) {
          model = std::move(attempt);
          chosen = t;
          break;
        }
      }
      assumptions.push_back(run_.vars.tau(i, chosen));
    }
    Run run = decode_run(*model, run_);
    if (!clamped(r) && distance(run) < r)
      throw SolverFailure("witness distance falls below the encoded threshold");
    return run;
  }

  /// Largest distance over runs of this length, strictly above `floor`
  /// once scaled, with its least witness.
  std::optional<Candidate> maximize(const std::optional<Score>& floor, const Score& scale, bool& loose) {
    auto first = check(Rational(0));
    if (!first) return std::nullopt;
    std::vector<Rational> cands;
    for (const auto& t : traces_)
      for (std::size_t v = 0; v <= n_; ++v) {
        const std::size_t d = denominator(kind_, v, t.size());
        for (std::size_t k = 0; k <= d; ++k)
          cands.emplace_back(static_cast<std::int64_t>(k), static_cast<std::int64_t>(d));
      }
    if (traces_.empty()) cands.emplace_back(1);
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    auto above = [&](const Rational& c) { return !floor || to_score(c) / scale > *floor; };
    std::erase_if(cands, [&](const Rational& c) { return c <= first->distance || !above(c); });

    std::ptrdiff_t lo = -1;
    auto hi = static_cast<std::ptrdiff_t>(cands.size());
    while (hi - lo > 1) {
      const std::ptrdiff_t mid = lo + (hi - lo) / 2;
      auto found = check(cands[static_cast<std::size_t>(mid)]);
      if (!found) {
        hi = mid;
        continue;
      }
      const auto reach = std::upper_bound(cands.begin(), cands.end(), found->distance) - cands.begin() - 1;
      lo = std::max(mid, std::min<std::ptrdiff_t>(reach, hi - 1));
    }
    const Rational target = lo >= 0 ? cands[static_cast<std::size_t>(lo)] : first->distance;
    if (!above(target)) return std::nullopt;
    loose = clamped(target);
    Run run = least_run(target);
    Rational d = distance(run);
    return Candidate{std::move(run), d};
  }

 private:
  std::optional<sat::Model> solve(const std::vector<sat::Lit>& assumptions) {
    flush();
    ++stats_.queries;
    return session_->solve(assumptions);
  }

  void flush() {
    for (; pushed_ < cnf_.clauses.size(); ++pushed_) session_->add_clause(cnf_.clauses[pushed_]);
    stats_.variables = cnf_.var_count;
    stats_.clauses = cnf_.clauses.size();
  }

  sat::Lit selector(const Rational& r) {
    if (r.numerator() == 0) return 0;
    if (auto it = selectors_.find(r); it != selectors_.end()) return it->second;
    const sat::Lit sel = cnf_.new_var();
    for (std::size_t s = 0; s < traces_.size(); ++s) {
      std::vector<std::size_t> need;
      for (std::size_t v = 0; v <= n_; ++v)
        need.push_back(std::min(ceil_times(r, denominator(kind_, v, traces_[s].size())), caps_[s] + 1));
      if (clamped(r))
        for (auto& x : need) x = std::min(x, caps_[s]);
      tseytin_.assert_formula(requirement(run_, dist_, s, need, sel));
    }
    selectors_.emplace(r, sel);
    return sel;
  }

  void block(const Run& run, sat::Lit sel) {
    sat::Clause clause;
    if (sel) clause.push_back(-sel);
    for (std::size_t i = 1; i <= n_; ++i) clause.push_back(-run_.vars.tau(i, run.firings[i - 1]));
    cnf_.add(std::move(clause));
  }

  std::size_t n_;
  DistanceKind kind_;
  const SearchOptions& options_;
  SearchStats& stats_;
  std::vector<Trace> traces_;
  std::vector<std::size_t> caps_;
  RunEncoding run_;
  DistanceEncoding dist_;
  sat::CnfFormula cnf_;
  sat::TseytinEncoder tseytin_;
  std::unique_ptr<sat::SolverBackend> default_backend_;
  std::unique_ptr<sat::SolverSession> session_;
  std::size_t pushed_ = 0;
  std::map<Rational, sat::Lit> selectors_;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<Trace> search_traces(const EventLog& log, std::size_t n, bool prefix_mode) {
  std::vector<Trace> out;
  for (const auto& [trace, mult] : log.entries()) {
    Trace t = trace;
    if (prefix_mode && t.size() > n) t.resize(n);
    out.push_back(std::move(t));
  }
  std::sort(out.begin(), out.end(), ShortLex{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Rational distance_to(std::span<const ActivityId> visible, std::span<const Trace> traces, DistanceKind kind) {
  Rational best(1);
  for (const auto& t : traces) best = std::min(best, distance(kind, visible, t));
  return best;
}

AntiAlignmentResult find_anti_alignment(const PetriNet& net, const EventLog& log, const AntiAlignmentQuery& q) {
  const auto start = std::chrono::steady_clock::now();
  const Rational r = q.threshold.value_or(Rational(0));
  if (r < Rational(0) || r > Rational(1)) throw std::invalid_argument("threshold must lie in [0, 1]");
  prepare(net, log, q.options);
  AntiAlignmentResult result;
  LengthSearch search(net, log, q.n, q.kind, q.options, result.stats);
  if (search.check(r)) {
    Run run = search.least_run(r);
    result.distance = search.distance(run);
    result.score = to_score(result.distance) / discount(q.epsilon, run.firings.size());
    result.run = std::move(run);
    result.is_lower_bound = q.options.prefix_mode || search.clamped(r);
  }
  result.stats.seconds = seconds_since(start);
  return result;
}

AntiAlignmentResult max_anti_alignment_at_length(const PetriNet& net, const EventLog& log, std::size_t n,
                                                 DistanceKind kind, const SearchOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  prepare(net, log, options);
  AntiAlignmentResult result;
  LengthSearch search(net, log, n, kind, options, result.stats);
  bool loose = false;
  if (auto best = search.maximize(std::nullopt, Score(1), loose)) {
    result.distance = best->distance;
    result.score = to_score(best->distance);
    result.run = std::move(best->run);
    result.is_lower_bound = options.prefix_mode || loose;
  }
  result.stats.seconds = seconds_since(start);
  return result;
}

AntiAlignmentResult max_anti_alignment(const PetriNet& net, const EventLog& log, DistanceKind kind,
                                       std::size_t length_budget, const Rational& epsilon,
                                       const SearchOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (epsilon < Rational(0)) throw std::invalid_argument("epsilon must be non-negative");
  if (epsilon.numerator() == 0 && has_executable_loop(net, options.limits))
    throw LoopWithZeroEpsilon("epsilon = 0 needs a net without executable loops");
  prepare(net, log, options);
  AntiAlignmentResult result;
  std::optional<Score> best;
  for (std::size_t n = 0; n <= length_budget; ++n) {
    const Score scale = discount(epsilon, n);
    if (best && Score(1) / scale <= *best) break;
    LengthSearch search(net, log, n, kind, options, result.stats);
    bool loose = false;
    auto found = search.maximize(best, scale, loose);
    if (!found) continue;
    const Score score = to_score(found->distance) / scale;
    if (best && score <= *best) continue;
    best = score;
    result.distance = found->distance;
    result.score = score;
    result.run = std::move(found->run);
    result.is_lower_bound = options.prefix_mode || loose;
  }
  result.stats.seconds = seconds_since(start);
  return result;
}

ThresholdCnf build_threshold_cnf(const PetriNet& net, const EventLog& log, std::size_t n, DistanceKind kind,
                                 const Rational& threshold, const SearchOptions& options) {
  prepare(net, log, options);
  ThresholdCnf out;
  const auto traces = search_traces(log, n, options.prefix_mode);
  out.run = encode_run(net, n, !options.prefix_mode);
  std::vector<std::size_t> caps;
  for (const auto& t : traces) {
    std::size_t cap = n + t.size();
    if (kind == DistanceKind::Levenshtein && options.max_d) cap = std::min(cap, *options.max_d);
    caps.push_back(cap);
  }
  out.distance = encode_distance(out.run, kind, traces, caps);
  out.cnf.var_count = out.run.vars.var_count();
  sat::TseytinEncoder tseytin(out.cnf);
  tseytin.assert_formula(out.run.formula);
  tseytin.assert_formula(out.distance.structure);
  for (std::size_t s = 0; s < traces.size(); ++s) {
    std::vector<std::size_t> need;
    for (std::size_t v = 0; v <= n; ++v)
      need.push_back(std::min(ceil_times(threshold, denominator(kind, v, traces[s].size())), caps[s]));
    tseytin.assert_formula(requirement(out.run, out.distance, s, need));
  }
  return out;
}

}  // namespace aa
