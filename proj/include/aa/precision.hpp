#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "aa/antialign.hpp"
#include "aa/distance.hpp"
#include "aa/eventlog.hpp"
#include "aa/petri.hpp"
#include "aa/rational.hpp"

namespace aa {

enum class PrecisionStatus { Exact, LowerBound };

std::string_view to_string(PrecisionStatus status);

struct PrecisionConfig {
  Rational epsilon{1, 20};
  DistanceKind kind = DistanceKind::Levenshtein;
  /// Threshold m of the threshold algorithm, 0 < m <= 1.
  std::optional<Rational> threshold;
  /// Replaces the depth derived from the threshold or from gamma0.
  std::optional<std::size_t> length_budget;
  std::size_t flower_horizon = 2;
  bool flower_patch = false;
  /// Longest bootstrap length tried when the product net is too large.
  std::size_t bootstrap_cap = 64;
  SearchOptions search;
};

struct PrecisionReport {
  /// "P_aa" for eps = 0, "P_aa^eps" otherwise.
  std::string metric;
  DistanceKind kind = DistanceKind::Levenshtein;
  Rational epsilon{0};
  /// Exact value, or the lower bound when status is LowerBound.
  Score value{1};
  PrecisionStatus status = PrecisionStatus::Exact;
  AntiAlignmentResult witness;
  std::size_t depth_used = 0;
  bool flower_flag = false;
  double seconds = 0;
};

/// Largest n with (1+eps)^n <= 1/m, i.e. floor(-ln m / ln(1+eps)), decided
/// by exact power comparison. Throws EpsilonZero for eps = 0.
std::size_t depth_bound(const Score& m, const Rational& epsilon);
inline std::size_t depth_bound(const Rational& m, const Rational& epsilon) { return depth_bound(to_score(m), epsilon); }

/// Threshold algorithm: maximize up to depth_bound(m, eps). Exact when the
/// best score is at least (1+eps)^-(n+1), otherwise LowerBound 1 - m.
PrecisionReport precision_epsilon(const PetriNet& net, const EventLog& log, const PrecisionConfig& cfg);

/// gamma0 algorithm: a deviating run gamma0 from the log-tree product fixes
/// m = dist(gamma0)/(1+eps)^|gamma0|; Exact 1 when the language is inside the log.
PrecisionReport precision_gamma0(const PetriNet& net, const EventLog& log, const PrecisionConfig& cfg);

/// 1 - max distance over all full runs. Throws HasLoop on a net with an
/// executable loop.
PrecisionReport precision_exact_loopfree(const PetriNet& net, const EventLog& log, DistanceKind kind,
                                         const SearchOptions& options = {});

/// eps = 0: exact loop-free value (LoopWithZeroEpsilon on loops); otherwise
/// the threshold algorithm when a threshold is set, else the gamma0 one.
PrecisionReport compute_precision(const PetriNet& net, const EventLog& log, const PrecisionConfig& cfg);

/// Every word over the visible activities of `alphabet` of length <= horizon
/// is a word of the net's language.
bool flower_check(const PetriNet& net, const Alphabet& alphabet, std::size_t horizon, ExplorationLimits limits = {});

/// Length of the longest full run of a net without executable loops.
std::optional<std::size_t> longest_full_run(const PetriNet& net, ExplorationLimits limits = {});

}  // namespace aa
