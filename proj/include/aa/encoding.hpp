#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <tuple>
#include <vector>

#include "aa/cnf.hpp"
#include "aa/distance.hpp"
#include "aa/eventlog.hpp"
#include "aa/petri.hpp"
#include "aa/solver.hpp"

namespace aa {

enum class VarRole { Tau, Mark, Mismatch, Edit, Visible, Aux };

std::string_view to_string(VarRole role);

/// Coordinates of one variable. Unused coordinates stay 0.
///   Tau      step i, index = transition
///   Mark     step i, index = place
///   Mismatch step i (mismatch source), index = trace, k
///   Edit     step i, index = trace, j = trace position, k = edit bound d
///   Visible  step i, k = number of visible firings among the first i
struct VarInfo {
  VarRole role = VarRole::Aux;
  std::size_t step = 0;
  std::size_t index = 0;
  std::size_t j = 0;
  std::size_t k = 0;
  bool operator==(const VarInfo&) const = default;
};

/// Bidirectional map between encoding variables and solver variables.
/// tau and mark variables are allocated up front (1..n|T| then n|T|+1..),
/// every other family on demand.
class VarMap {
 public:
  VarMap() = default;
  VarMap(std::size_t length, std::size_t transitions, std::size_t places);

  std::size_t length() const { return length_; }
  std::size_t transitions() const { return transitions_; }
  std::size_t places() const { return places_; }

  /// i in 1..n.
  int tau(std::size_t i, TransitionId t) const;
  /// i in 0..n.
  int mark(std::size_t i, PlaceId p) const;

  int add(const VarInfo& info);
  std::optional<int> find(const VarInfo& info) const;
  const VarInfo& info(int var) const { return roles_.at(static_cast<std::size_t>(var)); }

  std::size_t var_count() const { return roles_.size() - 1; }
  std::size_t count(VarRole role) const;

 private:
  std::size_t length_ = 0;
  std::size_t transitions_ = 0;
  std::size_t places_ = 0;
  std::vector<VarInfo> roles_{VarInfo{}};
  std::map<std::tuple<int, std::size_t, std::size_t, std::size_t, std::size_t>, int> index_;
};

/// Run part of the formula: initial marking, optional final marking,
/// exactly-one transition per step, enabledness and the safe token game.
struct RunEncoding {
  const PetriNet* net = nullptr;
  std::size_t length = 0;
  bool require_final = true;
  sat::Formula formula;
  VarMap vars;
  /// visible[i][v]: exactly v of the first i firings are visible. Constant
  /// when the net has no silent transitions.
  std::vector<std::vector<sat::Formula>> visible;

  /// Some visible (resp. silent) transition fires at step i (index 0 unused).
  std::vector<sat::Formula> visible_steps;
  std::vector<sat::Formula> silent_steps;
  /// A visible transition labeled (resp. not labeled) `a` fires at step i.
  /// kPadding never matches.
  sat::Formula label_eq(std::size_t i, ActivityId a) const;
  sat::Formula label_neq(std::size_t i, ActivityId a) const;

  static constexpr ActivityId kPadding = static_cast<ActivityId>(-1);

  mutable std::map<std::pair<std::size_t, ActivityId>, std::pair<sat::Formula, sat::Formula>> label_cache;
};

/// Pairwise at-most-one up to this many transitions, commander encoding above.
inline constexpr std::size_t kPairwiseLimit = 30;

RunEncoding encode_run(const PetriNet& net, std::size_t n, bool require_final);

/// Distance family for a set of traces on top of a run encoding.
///   Hamming: mismatch selectors delta_{i,s,k}; the sources i are the n steps
///   followed by |s| tail slots, a tail slot j counting when the run has fewer
///   than j visible labels.
///   Levenshtein: DP table delta_{i,s,j,d} meaning "visible prefix of length i
///   and s_1..s_j need at least d edits", capped at d = cap.
struct DistanceEncoding {
  DistanceKind kind = DistanceKind::Levenshtein;
  std::vector<Trace> traces;
  std::vector<std::size_t> caps;
  sat::Formula structure;
  /// at_least[s][k] is satisfiable alongside a run exactly when the run needs
  /// at least k mismatches or edits against traces[s]; k in 0..caps[s].
  std::vector<std::vector<sat::Formula>> at_least;
};

DistanceEncoding encode_distance(RunEncoding& run, DistanceKind kind, std::vector<Trace> traces,
                                 std::vector<std::size_t> caps);

/// For every visible length v of the run: at least need[v] against trace s.
/// `guard` literals are prepended to every clause (0 = unguarded).
sat::Formula requirement(const RunEncoding& run, const DistanceEncoding& dist, std::size_t s,
                         std::span<const std::size_t> need, sat::Lit guard = 0);

struct ThresholdFormula {
  sat::Formula formula;
  /// Some trace needs more mismatches than positions exist; formula is false.
  bool infeasible = false;
};

/// At least m mismatches against every trace of the log's support.
ThresholdFormula encode_hamming_threshold(const EventLog& log, std::size_t m, RunEncoding& run);

/// At least required_edits[s] edits against every trace s (missing traces: 0).
sat::Formula encode_levenshtein(const EventLog& log, const std::map<Trace, std::size_t, ShortLex>& required_edits,
                                RunEncoding& run);

/// Throws MalformedModel unless every step has exactly one true tau variable.
Run decode_run(const sat::Model& model, const RunEncoding& run);

/// Stand-alone DP table for two fixed words: delta(i, j, d) for i <= |u|,
/// j <= |v|, d <= |u|+|v|; the formula has exactly one model.
struct EditTableEncoding {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t depth = 0;
  sat::Formula formula;
  int var(std::size_t i, std::size_t j, std::size_t d) const {
    return static_cast<int>(1 + (i * (cols + 1) + j) * (depth + 1) + d);
  }
  std::size_t var_count() const { return (rows + 1) * (cols + 1) * (depth + 1); }
};

EditTableEncoding encode_edit_table(std::span<const ActivityId> u, std::span<const ActivityId> v);

/// JSON sidecar describing every variable of `vars` by role, followed by the
/// auxiliary range up to `cnf.var_count`.
void write_var_map(std::ostream& out, const VarMap& vars, const sat::CnfFormula& cnf, const PetriNet& net,
                   std::span<const Trace> traces);

}  // namespace aa
