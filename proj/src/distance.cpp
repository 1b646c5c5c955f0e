#include "aa/distance.hpp"

#include <algorithm>

namespace aa {

std::string_view to_string(DistanceKind kind) { return kind == DistanceKind::Hamming ? "hamming" : "levenshtein"; }

std::size_t mismatch_count(std::span<const ActivityId> g, std::span<const ActivityId> s) {
  const std::size_t n = std::max(g.size(), s.size());
  std::size_t diff = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (i >= g.size() || i >= s.size() || g[i] != s[i]) ++diff;
  return diff;
}

Rational hamming(std::span<const ActivityId> g, std::span<const ActivityId> s) {
  const std::size_t n = std::max(g.size(), s.size());
  if (n == 0) return Rational(0);
  return Rational(static_cast<std::int64_t>(mismatch_count(g, s)), static_cast<std::int64_t>(n));
}

std::size_t edit_count(std::span<const ActivityId> g, std::span<const ActivityId> s) {
  // Rolling-row LCS.
  std::vector<std::size_t> prev(s.size() + 1, 0), cur(s.size() + 1, 0);
  for (std::size_t i = 1; i <= g.size(); ++i) {
    for (std::size_t j = 1; j <= s.size(); ++j)
      cur[j] = g[i - 1] == s[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return g.size() + s.size() - 2 * prev[s.size()];
}

Rational levenshtein(std::span<const ActivityId> g, std::span<const ActivityId> s) {
  const auto total = static_cast<std::int64_t>(std::max<std::size_t>(1, g.size() + s.size()));
  return Rational(static_cast<std::int64_t>(edit_count(g, s)), total);
}

Rational distance(DistanceKind kind, std::span<const ActivityId> g, std::span<const ActivityId> s) {
  return kind == DistanceKind::Hamming ? hamming(g, s) : levenshtein(g, s);
}

Rational dist_to_log(std::span<const ActivityId> g, const EventLog& log, DistanceKind kind) {
  Rational best(1);
  for (const auto& [trace, k] : log.entries()) best = std::min(best, distance(kind, g, trace));
  return best;
}

std::vector<ActivityId> project_visible(std::span<const ActivityId> labels, const Alphabet& alphabet) {
  std::vector<ActivityId> out;
  for (ActivityId a : labels)
    if (!alphabet.is_silent(a)) out.push_back(a);
  return out;
}

}  // namespace aa
