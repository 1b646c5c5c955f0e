#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "aa/distance.hpp"
#include "aa/encoding.hpp"
#include "aa/eventlog.hpp"
#include "aa/petri.hpp"
#include "aa/rational.hpp"
#include "aa/solver.hpp"

namespace aa {

struct SearchOptions {
  /// Levenshtein only: edits required per trace are clamped to this value.
  std::optional<std::size_t> max_d;
  /// Drop the final-marking constraint; traces are cut to the run length.
  bool prefix_mode = false;
  /// Defaults to the embedded CDCL solver.
  const sat::SolverBackend* backend = nullptr;
  ExplorationLimits limits;
};

struct SearchStats {
  std::size_t queries = 0;
  /// Models rejected by the independent distance recheck.
  std::size_t refinements = 0;
  std::size_t variables = 0;
  std::size_t clauses = 0;
  double seconds = 0;
};

struct AntiAlignmentQuery {
  std::size_t n = 0;
  DistanceKind kind = DistanceKind::Levenshtein;
  std::optional<Rational> threshold;
  SearchOptions options;
  Rational epsilon{0};
};

struct AntiAlignmentResult {
  std::optional<Run> run;
  /// dist(run, L), recomputed by the distance module.
  Rational distance{0};
  /// distance / (1+eps)^|run|.
  Score score{0};
  bool is_lower_bound = false;
  SearchStats stats;

  bool found() const { return run.has_value(); }
};

/// Lexicographically least run of length q.n (by transition id) at distance
/// >= threshold (0 when unset); no run when none exists.
AntiAlignmentResult find_anti_alignment(const PetriNet& net, const EventLog& log, const AntiAlignmentQuery& q);

/// Maximal distance over runs of length n, witnessed by the lexicographically
/// least maximizing run.
AntiAlignmentResult max_anti_alignment_at_length(const PetriNet& net, const EventLog& log, std::size_t n,
                                                 DistanceKind kind, const SearchOptions& options = {});

/// Best dist/(1+eps)^len over lengths 0..length_budget. Ties keep the shorter
/// run. Throws LoopWithZeroEpsilon for eps = 0 on a net with a loop.
AntiAlignmentResult max_anti_alignment(const PetriNet& net, const EventLog& log, DistanceKind kind,
                                       std::size_t length_budget, const Rational& epsilon,
                                       const SearchOptions& options = {});

/// Traces the search compares against: the log's support, cut to `n` and
/// deduplicated in prefix mode.
std::vector<Trace> search_traces(const EventLog& log, std::size_t n, bool prefix_mode);

/// Minimum distance to `traces`, 1 when there are none.
Rational distance_to(std::span<const ActivityId> visible, std::span<const Trace> traces, DistanceKind kind);

/// Full clause set asking for a run of length n at distance >= threshold, as
/// solved by find_anti_alignment (for DIMACS export).
struct ThresholdCnf {
  RunEncoding run;
  DistanceEncoding distance;
  sat::CnfFormula cnf;
};

ThresholdCnf build_threshold_cnf(const PetriNet& net, const EventLog& log, std::size_t n, DistanceKind kind,
                                 const Rational& threshold, const SearchOptions& options = {});

}  // namespace aa
