#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "aa/alphabet.hpp"
#include "aa/eventlog.hpp"
#include "aa/rational.hpp"

namespace aa {

enum class DistanceKind { Hamming, Levenshtein };

std::string_view to_string(DistanceKind kind);

/// Positional mismatches after padding the shorter word with a symbol outside
/// the alphabet, over the padded length. Two empty words are at distance 0.
Rational hamming(std::span<const ActivityId> g, std::span<const ActivityId> s);

/// Insertions plus deletions (no substitution), over max(1, |g| + |s|).
Rational levenshtein(std::span<const ActivityId> g, std::span<const ActivityId> s);

/// Unnormalized insert/delete edit count: |g| + |s| - 2 LCS(g, s).
std::size_t edit_count(std::span<const ActivityId> g, std::span<const ActivityId> s);

/// Unnormalized positional mismatch count, padding included.
std::size_t mismatch_count(std::span<const ActivityId> g, std::span<const ActivityId> s);

Rational distance(DistanceKind kind, std::span<const ActivityId> g, std::span<const ActivityId> s);

/// Minimum over the support of the log; 1 for the empty log.
Rational dist_to_log(std::span<const ActivityId> g, const EventLog& log, DistanceKind kind);

/// Drops silent labels, keeping order.
std::vector<ActivityId> project_visible(std::span<const ActivityId> labels, const Alphabet& alphabet);

}  // namespace aa
